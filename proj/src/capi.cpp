#include "riskalloc.h"

#include <cstring>
#include <memory>
#include <string>

#include "riskalloc/adjust.hpp"
#include "riskalloc/bench.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/io.hpp"
#include "riskalloc/multilevel.hpp"
#include "riskalloc/runner.hpp"

using namespace riskalloc;

struct ra_panel {
    std::shared_ptr<const ExposurePanel> impl;
};
struct ra_measure {
    RiskMeasureSpec impl;
};
struct ra_hierarchy {
    Hierarchy impl;
};
struct ra_sba_params {
    std::shared_ptr<const SbaParams> impl;
};
struct ra_sensitivities {
    std::shared_ptr<const SensitivitySet> impl;
};
struct ra_result {
    AllocationResult impl;
};
struct ra_mlresult {
    MultiLevelResult impl;
};

namespace {

thread_local std::string g_error_message;
thread_local ra_status g_error_code = RA_OK;

ra_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return RA_ERR_INVALID_ARGUMENT;
        case ErrorCode::parse: return RA_ERR_PARSE;
        case ErrorCode::io: return RA_ERR_IO;
        case ErrorCode::insufficient_data: return RA_ERR_INSUFFICIENT_DATA;
        case ErrorCode::degenerate: return RA_ERR_DEGENERATE;
        case ErrorCode::limit: return RA_ERR_LIMIT;
    }
    return RA_ERR_INTERNAL;
}

ra_status set_error(ra_status code, const std::string& message) {
    g_error_code = code;
    g_error_message = message;
    return code;
}

/// Runs the body, mapping exceptions to status codes.
template <typename Fn>
ra_status guarded(Fn&& body) {
    try {
        body();
        g_error_code = RA_OK;
        return RA_OK;
    } catch (const Error& e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::exception& e) {
        return set_error(RA_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(RA_ERR_INTERNAL, "unknown error");
    }
}

void check_arg(bool ok, const char* message) {
    require(ok, ErrorCode::invalid_argument, message);
}

RunOptions to_run_options(const ra_options* options) {
    RunOptions out;
    if (options) {
        check_arg(options->pairs >= 1, "options.pairs must be >= 1");
        check_arg(options->threads >= 1, "options.threads must be >= 1");
        check_arg(options->shapley_cap >= 1, "options.shapley_cap must be >= 1");
        out.pairs = options->pairs;
        out.seed = options->seed;
        out.threads = options->threads;
        out.shapley_cap = options->shapley_cap;
    }
    return out;
}

Strategy parse_strategy(const char* name) {
    check_arg(name != nullptr, "strategy must not be null");
    const auto s = strategy_from_name(name);
    require(s.has_value(), ErrorCode::invalid_argument,
            std::string("unknown strategy '") + name + "'");
    return *s;
}

MultiLevelMethod parse_method(const char* name) {
    check_arg(name != nullptr, "method must not be null");
    const std::string m = name;
    if (m == "ptd") return MultiLevelMethod::ptd;
    if (m == "ctd") return MultiLevelMethod::ctd;
    if (m == "bu") return MultiLevelMethod::bu;
    raise(ErrorCode::invalid_argument, "unknown multilevel method '" + m + "'");
}

}  // namespace

extern "C" {

const char* ra_version(void) { return "0.1.0"; }

const char* ra_last_error_message(void) { return g_error_message.c_str(); }

ra_status ra_last_error_code(void) { return g_error_code; }

void ra_options_init(ra_options* options) {
    if (!options) return;
    options->pairs = 1000;
    options->seed = 0;
    options->threads = 1;
    options->shapley_cap = 20;
}

/* ----- panels ----- */

ra_status ra_panel_load_csv(const char* path, ra_panel** out) {
    return guarded([&] {
        check_arg(path && out, "path and out must not be null");
        *out = new ra_panel{std::make_shared<ExposurePanel>(load_panel_csv(path))};
    });
}

ra_status ra_panel_write_csv(const ra_panel* panel, const char* path) {
    return guarded([&] {
        check_arg(panel && path, "panel and path must not be null");
        write_panel_csv(*panel->impl, path);
    });
}

ra_status ra_panel_create(const char* const* unit_ids, size_t n, size_t m,
                          const double* values, ra_panel** out) {
    return guarded([&] {
        check_arg(unit_ids && values && out, "unit_ids, values, out must not be null");
        std::vector<std::string> ids(unit_ids, unit_ids + n);
        std::vector<double> v(values, values + n * m);
        *out = new ra_panel{
            std::make_shared<ExposurePanel>(std::move(ids), std::move(v), m)};
    });
}

ra_status ra_panel_gaussian(size_t n, const double* mean, const double* covariance,
                            size_t m, uint64_t seed, int32_t threads, ra_panel** out) {
    return guarded([&] {
        check_arg(covariance && out, "covariance and out must not be null");
        GaussianSpec spec;
        spec.mean = mean ? std::vector<double>(mean, mean + n)
                         : std::vector<double>(n, 0.0);
        spec.covariance.assign(covariance, covariance + n * n);
        spec.seed = seed;
        *out = new ra_panel{std::make_shared<ExposurePanel>(
            sample_gaussian(spec, m, std::max<int32_t>(threads, 1)))};
    });
}

ra_status ra_panel_gaussian_equicorr(size_t n, double mean, double sd, double rho,
                                     size_t m, uint64_t seed, int32_t threads,
                                     ra_panel** out) {
    return guarded([&] {
        check_arg(out != nullptr, "out must not be null");
        const auto spec = GaussianSpec::equicorrelated(n, mean, sd, rho, seed);
        *out = new ra_panel{std::make_shared<ExposurePanel>(
            sample_gaussian(spec, m, std::max<int32_t>(threads, 1)))};
    });
}

size_t ra_panel_units(const ra_panel* panel) { return panel ? panel->impl->units() : 0; }

size_t ra_panel_scenarios(const ra_panel* panel) {
    return panel ? panel->impl->scenarios() : 0;
}

const char* ra_panel_unit_id(const ra_panel* panel, size_t i) {
    if (!panel || i >= panel->impl->units()) return nullptr;
    return panel->impl->unit_id(i).c_str();
}

void ra_panel_free(ra_panel* panel) { delete panel; }

/* ----- measures ----- */

ra_status ra_measure_std(ra_measure** out) {
    return guarded([&] {
        check_arg(out != nullptr, "out must not be null");
        *out = new ra_measure{RiskMeasureSpec::make_std()};
    });
}

ra_status ra_measure_var(double alpha, ra_measure** out) {
    return guarded([&] {
        check_arg(out != nullptr, "out must not be null");
        auto spec = RiskMeasureSpec::make_var(alpha);
        spec.validate(nullptr);
        *out = new ra_measure{std::move(spec)};
    });
}

ra_status ra_measure_es(double alpha, ra_measure** out) {
    return guarded([&] {
        check_arg(out != nullptr, "out must not be null");
        auto spec = RiskMeasureSpec::make_es(alpha);
        spec.validate(nullptr);
        *out = new ra_measure{std::move(spec)};
    });
}

ra_status ra_measure_var_svar(double alpha, const ra_panel* stressed,
                              ra_measure** out) {
    return guarded([&] {
        check_arg(stressed && out, "stressed and out must not be null");
        auto spec = RiskMeasureSpec::make_var_svar(alpha, stressed->impl);
        spec.validate(nullptr);
        *out = new ra_measure{std::move(spec)};
    });
}

void ra_measure_free(ra_measure* measure) { delete measure; }

/* ----- hierarchies ----- */

ra_status ra_hierarchy_load_json(const char* path, ra_hierarchy** out) {
    return guarded([&] {
        check_arg(path && out, "path and out must not be null");
        *out = new ra_hierarchy{load_hierarchy_json(path)};
    });
}

ra_status ra_hierarchy_validate(const ra_hierarchy* hierarchy, size_t n_units) {
    return guarded([&] {
        check_arg(hierarchy != nullptr, "hierarchy must not be null");
        const auto violation = hierarchy->impl.validate(n_units);
        if (violation)
            raise(ErrorCode::invalid_argument,
                  "node '" + violation->node_path + "': " + violation->detail);
    });
}

void ra_hierarchy_free(ra_hierarchy* hierarchy) { delete hierarchy; }

/* ----- allocation ----- */

ra_status ra_allocate(const ra_panel* panel, const ra_measure* measure,
                      const char* strategy, const ra_options* options,
                      ra_result** out) {
    return guarded([&] {
        check_arg(panel && measure && out, "panel, measure, out must not be null");
        const Strategy s = parse_strategy(strategy);
        PanelProblem problem(panel->impl, measure->impl);
        *out = new ra_result{run_strategy(problem, s, to_run_options(options))};
    });
}

ra_status ra_repair(const ra_result* result, const char* method, ra_result** out) {
    return guarded([&] {
        check_arg(result && method && out, "result, method, out must not be null");
        const std::string m = method;
        RepairMethod rm;
        if (m == "max-prop")
            rm = RepairMethod::max_proportional;
        else if (m == "abs-prop")
            rm = RepairMethod::abs_proportional;
        else
            raise(ErrorCode::invalid_argument, "unknown repair method '" + m + "'");
        *out = new ra_result{repair(result->impl, rm)};
    });
}

size_t ra_result_units(const ra_result* result) {
    return result ? result->impl.units() : 0;
}

double ra_result_allocation(const ra_result* result, size_t i) {
    if (!result || i >= result->impl.units()) return 0.0;
    return result->impl.allocations[i];
}

ra_status ra_result_std_error(const ra_result* result, size_t i, double* out) {
    return guarded([&] {
        check_arg(result && out, "result and out must not be null");
        check_arg(i < result->impl.units(), "unit index out of range");
        require(result->impl.std_errors.has_value(), ErrorCode::invalid_argument,
                "strategy reports no standard errors");
        *out = (*result->impl.std_errors)[i];
    });
}

double ra_result_total(const ra_result* result) {
    return result ? result->impl.total : 0.0;
}

double ra_result_gap(const ra_result* result) {
    return result ? result->impl.full_allocation_gap() : 0.0;
}

int32_t ra_result_fair(const ra_result* result) {
    return result && result->impl.fair ? 1 : 0;
}

const char* ra_result_strategy(const ra_result* result) {
    thread_local std::string label;
    if (!result) return nullptr;
    label = result->impl.label();
    return label.c_str();
}

ra_status ra_result_write_csv(const ra_result* result, const ra_panel* panel,
                              const char* path) {
    return guarded([&] {
        check_arg(result && panel && path, "result, panel, path must not be null");
        write_result_csv(result->impl, panel->impl->unit_ids(), path);
    });
}

ra_status ra_result_write_json(const ra_result* result, const ra_panel* panel,
                               const char* path) {
    return guarded([&] {
        check_arg(result && panel && path, "result, panel, path must not be null");
        write_result_json(result->impl, panel->impl->unit_ids(), path);
    });
}

void ra_result_free(ra_result* result) { delete result; }

/* ----- multilevel ----- */

ra_status ra_allocate_multilevel(const ra_panel* panel, const ra_measure* measure,
                                 const ra_hierarchy* hierarchy, const char* strategy,
                                 const char* method, const ra_options* options,
                                 ra_mlresult** out) {
    return guarded([&] {
        check_arg(panel && measure && hierarchy && out,
                  "panel, measure, hierarchy, out must not be null");
        PanelProblem problem(panel->impl, measure->impl);
        *out = new ra_mlresult{allocate_multilevel(problem, hierarchy->impl,
                                                   parse_strategy(strategy),
                                                   parse_method(method),
                                                   to_run_options(options))};
    });
}

size_t ra_mlresult_nodes(const ra_mlresult* result) {
    return result ? result->impl.nodes.size() : 0;
}

const char* ra_mlresult_path(const ra_mlresult* result, size_t i) {
    if (!result || i >= result->impl.nodes.size()) return nullptr;
    return result->impl.nodes[i].path.c_str();
}

double ra_mlresult_allocation(const ra_mlresult* result, size_t i) {
    if (!result || i >= result->impl.nodes.size()) return 0.0;
    return result->impl.nodes[i].allocation;
}

double ra_mlresult_gap(const ra_mlresult* result, size_t i) {
    if (!result || i >= result->impl.nodes.size()) return 0.0;
    return result->impl.nodes[i].consistency_gap;
}

ra_status ra_mlresult_write_csv(const ra_mlresult* result, const char* path) {
    return guarded([&] {
        check_arg(result && path, "result and path must not be null");
        write_multilevel_csv(result->impl, path);
    });
}

ra_status ra_mlresult_write_json(const ra_mlresult* result, const char* path) {
    return guarded([&] {
        check_arg(result && path, "result and path must not be null");
        write_multilevel_json(result->impl, path);
    });
}

void ra_mlresult_free(ra_mlresult* result) { delete result; }

/* ----- traces and sweeps ----- */

ra_status ra_trace_csv(const ra_panel* panel, const ra_measure* measure,
                       const ra_options* options, uint64_t stride, const char* path) {
    return guarded([&] {
        check_arg(panel && measure && path, "panel, measure, path must not be null");
        PanelProblem problem(panel->impl, measure->impl);
        auto vf = problem.value_fn();
        const auto rows = convergence_trace(*vf, to_run_options(options).mc(), stride);
        write_trace_csv(rows, panel->impl->unit_ids(), path);
    });
}

ra_status ra_converge_gaussian_csv(size_t n, double rho, const ra_measure* measure,
                                   const char* strategy, const uint64_t* m_grid,
                                   size_t grid_len, const ra_options* options,
                                   const char* path) {
    return guarded([&] {
        check_arg(measure && m_grid && path, "measure, m_grid, path must not be null");
        check_arg(grid_len >= 1, "need at least one grid point");
        const Strategy s = parse_strategy(strategy);
        const RunOptions run_opts = to_run_options(options);

        std::vector<SweepRow> rows;
        std::vector<std::string> ids;
        for (size_t g = 0; g < grid_len; ++g) {
            const auto spec =
                GaussianSpec::equicorrelated(n, 0.0, 1.0, rho, run_opts.seed);
            auto panel = std::make_shared<ExposurePanel>(
                sample_gaussian(spec, m_grid[g], run_opts.threads));
            if (ids.empty()) ids = panel->unit_ids();
            PanelProblem problem(panel, measure->impl);
            SweepRow row;
            row.scenarios = m_grid[g];
            row.estimates = run_strategy(problem, s, run_opts).allocations;
            rows.push_back(std::move(row));
        }
        write_sweep_csv(rows, ids, path);
    });
}

/* ----- SBA ----- */

ra_status ra_sba_params_load_json(const char* path, ra_sba_params** out) {
    return guarded([&] {
        check_arg(path && out, "path and out must not be null");
        *out = new ra_sba_params{
            std::make_shared<SbaParams>(load_sba_params_json(path))};
    });
}

void ra_sba_params_free(ra_sba_params* params) { delete params; }

ra_status ra_sensitivities_load_csv(const char* path, const ra_sba_params* params,
                                    ra_sensitivities** out) {
    return guarded([&] {
        check_arg(path && params && out, "path, params, out must not be null");
        *out = new ra_sensitivities{std::make_shared<SensitivitySet>(
            load_sensitivities_csv(path, *params->impl))};
    });
}

size_t ra_sensitivities_units(const ra_sensitivities* sensitivities) {
    return sensitivities ? sensitivities->impl->units() : 0;
}

const char* ra_sensitivities_unit_id(const ra_sensitivities* sensitivities, size_t i) {
    if (!sensitivities || i >= sensitivities->impl->units()) return nullptr;
    return sensitivities->impl->unit_ids()[i].c_str();
}

void ra_sensitivities_free(ra_sensitivities* sensitivities) { delete sensitivities; }

ra_status ra_sba_measure_value(const ra_sensitivities* sensitivities,
                               const ra_sba_params* params, double* out) {
    return guarded([&] {
        check_arg(sensitivities && params && out,
                  "sensitivities, params, out must not be null");
        *out = sba_delta_eq(*sensitivities->impl,
                            Coalition::grand(sensitivities->impl->units()),
                            *params->impl);
    });
}

ra_status ra_sba_allocate(const ra_sensitivities* sensitivities,
                          const ra_sba_params* params, const char* strategy,
                          const ra_options* options, ra_result** out) {
    return guarded([&] {
        check_arg(sensitivities && params && out,
                  "sensitivities, params, out must not be null");
        SbaProblem problem(sensitivities->impl, params->impl);
        *out = new ra_result{
            run_strategy(problem, parse_strategy(strategy), to_run_options(options))};
    });
}

ra_status ra_sba_allocate_multilevel(const ra_sensitivities* sensitivities,
                                     const ra_sba_params* params,
                                     const ra_hierarchy* hierarchy,
                                     const char* strategy, const char* method,
                                     const ra_options* options, ra_mlresult** out) {
    return guarded([&] {
        check_arg(sensitivities && params && hierarchy && out,
                  "sensitivities, params, hierarchy, out must not be null");
        SbaProblem problem(sensitivities->impl, params->impl);
        *out = new ra_mlresult{allocate_multilevel(problem, hierarchy->impl,
                                                   parse_strategy(strategy),
                                                   parse_method(method),
                                                   to_run_options(options))};
    });
}

ra_status ra_sba_result_write_csv(const ra_result* result,
                                  const ra_sensitivities* sensitivities,
                                  const char* path) {
    return guarded([&] {
        check_arg(result && sensitivities && path,
                  "result, sensitivities, path must not be null");
        write_result_csv(result->impl, sensitivities->impl->unit_ids(), path);
    });
}

ra_status ra_sba_result_write_json(const ra_result* result,
                                   const ra_sensitivities* sensitivities,
                                   const char* path) {
    return guarded([&] {
        check_arg(result && sensitivities && path,
                  "result, sensitivities, path must not be null");
        write_result_json(result->impl, sensitivities->impl->unit_ids(), path);
    });
}

/* ----- bench ----- */

ra_status ra_count_evaluations(const char* strategy, size_t n, uint64_t pairs,
                               uint64_t* out) {
    return guarded([&] {
        check_arg(out != nullptr, "out must not be null");
        *out = count_evaluations(parse_strategy(strategy), n, pairs);
    });
}

ra_status ra_bench_scaling_csv(const char* measure, double alpha, size_t n_lo,
                               size_t n_hi, size_t n_step, size_t m, uint64_t pairs,
                               int32_t exact_cap, int32_t repetitions, uint64_t seed,
                               const char* path) {
    return guarded([&] {
        check_arg(measure && path, "measure and path must not be null");
        RiskMeasureSpec spec;
        const std::string name = measure;
        if (name == "std")
            spec = RiskMeasureSpec::make_std();
        else if (name == "var")
            spec = RiskMeasureSpec::make_var(alpha);
        else if (name == "es")
            spec = RiskMeasureSpec::make_es(alpha);
        else
            raise(ErrorCode::invalid_argument,
                  "bench measure must be std, var or es; got '" + name + "'");

        ScalingOptions opts;
        opts.n_lo = n_lo;
        opts.n_hi = n_hi;
        opts.n_step = std::max<size_t>(n_step, 1);
        opts.scenarios = m;
        opts.pairs = pairs;
        opts.exact_cap = exact_cap;
        opts.repetitions = repetitions;
        opts.seed = seed;
        write_bench_csv(measure_scaling(spec, opts), path);
    });
}

} /* extern "C" */
