#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "riskalloc/errors.hpp"
#include "riskalloc/io.hpp"
#include "riskalloc/rng.hpp"

using namespace riskalloc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("riskalloc_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("panel csv: well-formed file round-trips exactly") {
    TempDir dir;
    const auto p = dir.file("panel.csv");
    write_text(p,
               "unit_id,s1,s2,s3\n"
               "desk_a,1.5,-2.25,0.125\n"
               "desk_b,3,4,5\n");
    const auto panel = load_panel_csv(p);
    CHECK(panel.units() == 2);
    CHECK(panel.scenarios() == 3);
    CHECK(panel.unit_id(0) == "desk_a");
    CHECK(panel.row(0)[1] == -2.25);

    // write -> load gives a bit-identical panel (17-digit round trip).
    const auto spec = GaussianSpec::iid_standard(3, 7);
    const auto original = sample_gaussian(spec, 40);
    const auto q = dir.file("roundtrip.csv");
    write_panel_csv(original, q);
    const auto reloaded = load_panel_csv(q);
    CHECK(reloaded.unit_ids() == original.unit_ids());
    CHECK(reloaded.values() == original.values());
}

TEST_CASE("panel csv: a missing cell is reported with its row") {
    TempDir dir;
    const auto p = dir.file("ragged.csv");
    write_text(p,
               "unit_id,s1,s2\n"
               "a,1,2\n"
               "b,1,2\n"
               "c,1,2\n"
               "d,1\n"
               "e,1,2\n");
    CHECK_THROWS_WITH_AS(load_panel_csv(p), doctest::Contains("row 5"), Error);
}

TEST_CASE("panel csv: non-numeric cells and duplicate ids are rejected") {
    TempDir dir;
    const auto p = dir.file("bad.csv");
    write_text(p, "unit_id,s1\na,oops\n");
    CHECK_THROWS_WITH_AS(load_panel_csv(p), doctest::Contains("non-numeric"), Error);

    const auto q = dir.file("dup.csv");
    write_text(q, "unit_id,s1\na,1\na,2\n");
    CHECK_THROWS_AS(load_panel_csv(q), Error);

    CHECK_THROWS_AS(load_panel_csv(dir.file("missing.csv")), Error);
}

TEST_CASE("hierarchy json loads and validates") {
    TempDir dir;
    const auto p = dir.file("tree.json");
    write_text(p, R"({"label":"root","children":[
        {"label":"A","units":[0,1]},
        {"label":"B","children":[{"label":"B1","units":[2]},
                                 {"label":"B2","units":[3]}]}]})");
    const auto h = load_hierarchy_json(p);
    CHECK(h.root().label == "root");
    CHECK(h.max_depth() == 2);
    CHECK(!h.validate(4).has_value());
    CHECK(h.validate(5).has_value());  // unit 4 uncovered

    const auto q = dir.file("bad.json");
    write_text(q, R"({"label":"root"})");
    CHECK_THROWS_AS(load_hierarchy_json(q), Error);

    write_text(q, "{not json");
    CHECK_THROWS_AS(load_hierarchy_json(q), Error);
}

TEST_CASE("sba parameter and sensitivity files load against each other") {
    const auto params = load_sba_params_json("data/sba_params_sample.json");
    CHECK(params.bucket_count == 3);
    CHECK(params.other_bucket == 2);  // 1-based 3 in the file
    CHECK(params.risk_weights[0] == 0.5);
    CHECK(params.factors_per_bucket == std::vector<std::size_t>{2, 1, 2});
    CHECK(params.gamma(0, 1) == 0.3);

    const auto sens =
        load_sensitivities_csv("data/sba_sensitivities_sample.csv", params);
    CHECK(sens.units() == 4);
    CHECK(sens.unit_ids()[0] == "PTF_1");
    // PTF_1: bucket 1 (0-based 0), factors (2.0, 1.0).
    const auto& u0 = sens.unit(0);
    REQUIRE(u0.count(0) == 1);
    CHECK(u0.at(0) == std::vector<double>{2.0, 1.0});

    // net over everyone: bucket 0 factor 0: 2 + 1.5 - 2.5 = 1.
    const auto net = sens.net(Coalition::grand(4), params);
    CHECK(net[0][0] == doctest::Approx(1.0));
    CHECK(net[0][1] == doctest::Approx(1.5));
    CHECK(net[1][0] == doctest::Approx(1.5));
    CHECK(net[2][0] == doctest::Approx(1.0));
    CHECK(net[2][1] == doctest::Approx(-2.0));
}

TEST_CASE("sensitivity csv rejects out-of-range buckets and factors") {
    const auto params = load_sba_params_json("data/sba_params_sample.json");
    TempDir dir;
    const auto p = dir.file("bad_sens.csv");
    write_text(p, "unit_id,bucket,factor,sensitivity\nx,9,1,1.0\n");
    CHECK_THROWS_WITH_AS(load_sensitivities_csv(p, params),
                         doctest::Contains("bucket"), Error);
    write_text(p, "unit_id,bucket,factor,sensitivity\nx,2,2,1.0\n");
    CHECK_THROWS_WITH_AS(load_sensitivities_csv(p, params),
                         doctest::Contains("factor"), Error);
}

TEST_CASE("result csv schema is stable") {
    AllocationResult r;
    r.strategy = Strategy::proportional;
    r.allocations = {1.25, 0.75};
    r.total = 2.0;
    r.fair = true;

    TempDir dir;
    const auto p = dir.file("result.csv");
    write_result_csv(r, {"a", "b"}, p);
    const auto text = read_text(p);
    CHECK(text ==
          "unit_id,strategy,allocation,std_error,full_allocation_gap\n"
          "a,proportional,1.25,,0.000000000\n"
          "b,proportional,0.75,,0.000000000\n");

    r.std_errors = std::vector<double>{0.5, 0.25};
    r.strategy = Strategy::shapley_mc;
    const auto q = dir.file("result_mc.csv");
    write_result_csv(r, {"a", "b"}, q);
    CHECK(read_text(q).find("a,shapley-mc,1.25,0.5,") != std::string::npos);
}

TEST_CASE("result json carries totals, gaps and per-unit rows") {
    AllocationResult r;
    r.strategy = Strategy::shapley;
    r.allocations = {3.5, 1.5};
    r.total = 5.0;
    r.fair = true;

    TempDir dir;
    const auto p = dir.file("result.json");
    write_result_json(r, {"x", "y"}, p);
    const auto text = read_text(p);
    CHECK(text.find("\"strategy\": \"shapley\"") != std::string::npos);
    CHECK(text.find("\"total\": 5.0") != std::string::npos);
    CHECK(text.find("\"unit_id\": \"x\"") != std::string::npos);
    CHECK(text.find("\"std_error\": null") != std::string::npos);
}

TEST_CASE("multilevel serialization mirrors the tree") {
    MultiLevelResult r;
    r.method = MultiLevelMethod::ptd;
    r.strategy = Strategy::proportional;
    r.total = 10.0;
    r.nodes = {
        {"root", 0, -1, 10.0, 0.0, false, {0, 1}},
        {"root/A", 1, 0, 4.0, 0.0, true, {0}},
        {"root/B", 1, 0, 6.0, 0.0, true, {1}},
    };
    TempDir dir;
    const auto p = dir.file("ml.csv");
    write_multilevel_csv(r, p);
    CHECK(read_text(p) ==
          "node_path,method,allocation\n"
          "root,ptd,10\n"
          "root/A,ptd,4\n"
          "root/B,ptd,6\n");

    const auto q = dir.file("ml.json");
    write_multilevel_json(r, q);
    const auto text = read_text(q);
    CHECK(text.find("\"method\": \"ptd\"") != std::string::npos);
    CHECK(text.find("\"label\": \"A\"") != std::string::npos);
    CHECK(text.find("\"children\"") != std::string::npos);
}

TEST_CASE("trace and bench csv schemas") {
    TempDir dir;
    std::vector<TraceRow> rows(1);
    rows[0].pairs = 100;
    rows[0].estimates = {1.0, 2.0};
    rows[0].std_errors = {0.1, 0.2};
    const auto p = dir.file("trace.csv");
    write_trace_csv(rows, {"a", "b"}, p);
    CHECK(read_text(p) ==
          "pairs,unit_id,estimate,std_error\n"
          "100,a,1,0.1\n"
          "100,b,2,0.2\n");

    std::vector<ScalingRow> bench(1);
    bench[0].n = 8;
    bench[0].exact_run = true;
    bench[0].exact_seconds = 0.5;
    bench[0].exact_evals = 1024;
    bench[0].mc_seconds = 0.25;
    bench[0].mc_evals = 4000;
    const auto q = dir.file("bench.csv");
    write_bench_csv(bench, q);
    CHECK(read_text(q) ==
          "n,strategy,evals,median_seconds\n"
          "8,shapley,1024,0.5\n"
          "8,shapley-mc,4000,0.25\n");
}

TEST_CASE("atomic writes never leave partial outputs") {
    TempDir dir;
    const auto missing_dir = (dir.path / "nope" / "out.csv").string();
    AllocationResult r;
    r.strategy = Strategy::standalone;
    r.allocations = {1.0};
    r.total = 1.0;
    CHECK_THROWS_AS(write_result_csv(r, {"a"}, missing_dir), Error);
    CHECK(!fs::exists(missing_dir));
    // No stray temp files either.
    CHECK(fs::is_empty(dir.path));
}
