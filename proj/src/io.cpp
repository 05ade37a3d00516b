#include "riskalloc/io.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "riskalloc/errors.hpp"

namespace riskalloc {

namespace {

using nlohmann::json;

std::string format_value(double v) {
    // Shortest representation that round-trips exactly.
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_gap(double v) {
    if (std::abs(v) < 0.5e-9) v = 0.0;  // below the printed precision
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    while (ptr != last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    require(ec == std::errc{} && ptr == last, ErrorCode::parse,
            "non-numeric cell at row " + std::to_string(row) + ", column " +
                std::to_string(col));
    return value;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open '" + path + "' for reading");
    return in;
}

json parse_json_file(const std::string& path) {
    auto in = open_for_read(path);
    json j = json::parse(in, nullptr, false);
    require(!j.is_discarded(), ErrorCode::parse, "malformed JSON in '" + path + "'");
    return j;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path dir = target.parent_path().empty() ? "." : target.parent_path();
    require(fs::exists(dir), ErrorCode::io,
            "output directory '" + dir.string() + "' does not exist");
    const fs::path tmp = dir / (target.filename().string() + ".tmp" +
                                std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::io, "cannot open '" + tmp.string() + "'");
        out << contents;
        out.flush();
        require(out.good(), ErrorCode::io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        raise(ErrorCode::io, "rename to '" + path + "' failed: " + ec.message());
    }
}

ExposurePanel load_panel_csv(const std::string& path) {
    auto in = open_for_read(path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse,
            "empty scenario file '" + path + "'");
    const auto header = split_line(strip_cr(line));
    require(header.size() >= 2 && header[0] == "unit_id", ErrorCode::parse,
            "scenario CSV must start with 'unit_id,s1,...'");
    const std::size_t m = header.size() - 1;

    std::vector<std::string> ids;
    std::vector<double> values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_line(line);
        require(cells.size() == m + 1, ErrorCode::parse,
                "row " + std::to_string(row) + " has " +
                    std::to_string(cells.size() - 1) + " scenario cells, expected " +
                    std::to_string(m));
        require(!cells[0].empty(), ErrorCode::parse,
                "row " + std::to_string(row) + " has an empty unit id");
        ids.push_back(cells[0]);
        for (std::size_t c = 1; c <= m; ++c)
            values.push_back(parse_number(cells[c], row, c + 1));
    }
    require(!ids.empty(), ErrorCode::parse, "scenario file has no unit rows");
    try {
        return ExposurePanel(std::move(ids), std::move(values), m);
    } catch (const Error& e) {
        raise(ErrorCode::parse, std::string("invalid panel in '") + path +
                                    "': " + e.what());
    }
}

void write_panel_csv(const ExposurePanel& panel, const std::string& path) {
    std::string out = "unit_id";
    for (std::size_t j = 1; j <= panel.scenarios(); ++j)
        out += ",s" + std::to_string(j);
    out += "\n";
    for (std::size_t i = 0; i < panel.units(); ++i) {
        out += panel.unit_id(i);
        for (double v : panel.row(i)) {
            out += ',';
            out += format_value(v);
        }
        out += "\n";
    }
    write_file_atomic(path, out);
}

namespace {

HierarchyNode parse_hierarchy_node(const json& j, const std::string& where) {
    require(j.is_object(), ErrorCode::parse, "hierarchy node must be an object" + where);
    HierarchyNode node;
    require(j.contains("label") && j["label"].is_string(), ErrorCode::parse,
            "hierarchy node needs a string label" + where);
    node.label = j["label"].get<std::string>();
    const bool has_children = j.contains("children");
    const bool has_units = j.contains("units");
    require(has_children != has_units, ErrorCode::parse,
            "node '" + node.label + "' must have exactly one of children/units");
    if (has_children) {
        require(j["children"].is_array() && !j["children"].empty(), ErrorCode::parse,
                "node '" + node.label + "' children must be a non-empty array");
        for (const auto& child : j["children"])
            node.children.push_back(
                parse_hierarchy_node(child, " under '" + node.label + "'"));
    } else {
        require(j["units"].is_array(), ErrorCode::parse,
                "node '" + node.label + "' units must be an array");
        for (const auto& u : j["units"]) {
            require(u.is_number_integer(), ErrorCode::parse,
                    "node '" + node.label + "' units must be integers");
            node.units.push_back(u.get<int>());
        }
    }
    return node;
}

}  // namespace

Hierarchy load_hierarchy_json(const std::string& path) {
    return Hierarchy(parse_hierarchy_node(parse_json_file(path), ""));
}

SbaParams load_sba_params_json(const std::string& path) {
    const json j = parse_json_file(path);
    SbaParams params;
    try {
        params.bucket_count = j.at("bucket_count").get<std::size_t>();
        const auto other = j.at("other_bucket").get<std::size_t>();
        require(other >= 1, ErrorCode::parse, "other_bucket is 1-based");
        params.other_bucket = other - 1;
        params.risk_weights = j.at("risk_weights").get<std::vector<double>>();
        for (const auto& matrix : j.at("intra_corr")) {
            std::vector<double> flat;
            std::size_t dim = matrix.size();
            for (const auto& row : matrix) {
                require(row.size() == dim, ErrorCode::parse,
                        "intra_corr matrices must be square");
                for (const auto& x : row) flat.push_back(x.get<double>());
            }
            params.intra_corr.push_back(std::move(flat));
            params.factors_per_bucket.push_back(dim);
        }
        for (const auto& row : j.at("cross_corr"))
            for (const auto& x : row) params.cross_corr.push_back(x.get<double>());
    } catch (const json::exception& e) {
        raise(ErrorCode::parse, "bad SBA parameter file '" + path + "': " + e.what());
    }
    params.validate();
    return params;
}

SensitivitySet load_sensitivities_csv(const std::string& path,
                                      const SbaParams& params) {
    auto in = open_for_read(path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse,
            "empty sensitivity file '" + path + "'");
    require(strip_cr(line) == "unit_id,bucket,factor,sensitivity", ErrorCode::parse,
            "sensitivity CSV header must be 'unit_id,bucket,factor,sensitivity'");

    std::vector<std::string> ids;
    std::map<std::string, std::size_t> index_of;
    std::vector<std::map<std::size_t, std::vector<double>>> per_unit;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_line(line);
        require(cells.size() == 4, ErrorCode::parse,
                "row " + std::to_string(row) + " must have 4 cells");
        const std::string& id = cells[0];
        const auto bucket1 = static_cast<std::size_t>(parse_number(cells[1], row, 2));
        const auto factor1 = static_cast<std::size_t>(parse_number(cells[2], row, 3));
        const double value = parse_number(cells[3], row, 4);
        require(bucket1 >= 1 && bucket1 <= params.bucket_count, ErrorCode::parse,
                "row " + std::to_string(row) + ": bucket out of range");
        const std::size_t bucket = bucket1 - 1;
        require(factor1 >= 1 && factor1 <= params.factors_per_bucket[bucket],
                ErrorCode::parse, "row " + std::to_string(row) + ": factor out of range");

        auto it = index_of.find(id);
        if (it == index_of.end()) {
            it = index_of.emplace(id, ids.size()).first;
            ids.push_back(id);
            per_unit.emplace_back();
        }
        auto& slot = per_unit[it->second][bucket];
        if (slot.empty()) slot.assign(params.factors_per_bucket[bucket], 0.0);
        slot[factor1 - 1] += value;
    }
    require(!ids.empty(), ErrorCode::parse, "sensitivity file has no rows");
    return SensitivitySet(std::move(ids), std::move(per_unit));
}

void write_result_csv(const AllocationResult& result,
                      const std::vector<std::string>& unit_ids,
                      const std::string& path) {
    require(unit_ids.size() == result.units(), ErrorCode::invalid_argument,
            "unit id count mismatch");
    const std::string gap = format_gap(result.full_allocation_gap());
    std::string out = "unit_id,strategy,allocation,std_error,full_allocation_gap\n";
    for (std::size_t i = 0; i < result.units(); ++i) {
        out += unit_ids[i];
        out += ',';
        out += result.label();
        out += ',';
        out += format_value(result.allocations[i]);
        out += ',';
        if (result.std_errors) out += format_value((*result.std_errors)[i]);
        out += ',';
        out += gap;
        out += "\n";
    }
    write_file_atomic(path, out);
}

void write_result_json(const AllocationResult& result,
                       const std::vector<std::string>& unit_ids,
                       const std::string& path) {
    require(unit_ids.size() == result.units(), ErrorCode::invalid_argument,
            "unit id count mismatch");
    json j;
    j["strategy"] = result.label();
    j["total"] = result.total;
    j["fair"] = result.fair;
    j["full_allocation_gap"] = result.full_allocation_gap();
    if (result.diagnostics) {
        j["diagnostics"] = {
            {"method", result.diagnostics->method},
            {"full_allocation_gap", result.diagnostics->full_allocation_gap},
            {"fell_back_to_first_order", result.diagnostics->fell_back_to_first_order},
        };
    }
    j["allocations"] = json::array();
    for (std::size_t i = 0; i < result.units(); ++i) {
        json row;
        row["unit_id"] = unit_ids[i];
        row["allocation"] = result.allocations[i];
        if (result.std_errors)
            row["std_error"] = (*result.std_errors)[i];
        else
            row["std_error"] = nullptr;
        j["allocations"].push_back(std::move(row));
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

void write_multilevel_csv(const MultiLevelResult& result, const std::string& path) {
    std::string out = "node_path,method,allocation\n";
    for (const auto& node : result.nodes) {
        out += node.path;
        out += ',';
        out += multilevel_method_name(result.method);
        out += ',';
        out += format_value(node.allocation);
        out += "\n";
    }
    write_file_atomic(path, out);
}

namespace {

json multilevel_node_json(const MultiLevelResult& result, std::size_t index) {
    const auto& node = result.nodes[index];
    json j;
    // Last path segment; the full path is reconstructable from nesting.
    const auto pos = node.path.rfind('/');
    j["label"] = pos == std::string::npos ? node.path : node.path.substr(pos + 1);
    j["allocation"] = node.allocation;
    if (!node.is_leaf) {
        j["consistency_gap"] = node.consistency_gap;
        j["children"] = json::array();
        for (std::size_t c = index + 1; c < result.nodes.size(); ++c) {
            if (result.nodes[c].parent == static_cast<std::ptrdiff_t>(index))
                j["children"].push_back(multilevel_node_json(result, c));
        }
    } else {
        j["units"] = node.leaf_units;
    }
    return j;
}

}  // namespace

void write_multilevel_json(const MultiLevelResult& result, const std::string& path) {
    json j;
    j["method"] = multilevel_method_name(result.method);
    j["strategy"] = strategy_name(result.strategy);
    j["total"] = result.total;
    j["tree"] = multilevel_node_json(result, 0);
    write_file_atomic(path, j.dump(2) + "\n");
}

void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::vector<std::string>& unit_ids,
                     const std::string& path) {
    std::string out = "pairs,unit_id,estimate,std_error\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.estimates.size(); ++i) {
            out += std::to_string(row.pairs);
            out += ',';
            out += unit_ids[i];
            out += ',';
            out += format_value(row.estimates[i]);
            out += ',';
            out += format_value(row.std_errors[i]);
            out += "\n";
        }
    }
    write_file_atomic(path, out);
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& unit_ids,
                     const std::string& path) {
    std::string out = "m,unit_id,estimate\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.estimates.size(); ++i) {
            out += std::to_string(row.scenarios);
            out += ',';
            out += unit_ids[i];
            out += ',';
            out += format_value(row.estimates[i]);
            out += "\n";
        }
    }
    write_file_atomic(path, out);
}

void write_bench_csv(const std::vector<ScalingRow>& rows, const std::string& path) {
    std::string out = "n,strategy,evals,median_seconds\n";
    for (const auto& row : rows) {
        if (row.exact_run) {
            out += std::to_string(row.n) + ",shapley," +
                   std::to_string(row.exact_evals) + ',' +
                   format_value(row.exact_seconds) + "\n";
        }
        out += std::to_string(row.n) + ",shapley-mc," + std::to_string(row.mc_evals) +
               ',' + format_value(row.mc_seconds) + "\n";
    }
    write_file_atomic(path, out);
}

}  // namespace riskalloc
