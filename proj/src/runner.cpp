#include "riskalloc/runner.hpp"

#include "riskalloc/errors.hpp"
#include "riskalloc/euler.hpp"

namespace riskalloc {

namespace {

bool is_euler(Strategy s) {
    switch (s) {
        case Strategy::euler_std:
        case Strategy::euler_es:
        case Strategy::euler_var_first:
        case Strategy::euler_var_second:
        case Strategy::euler_var_kernel:
            return true;
        default:
            return false;
    }
}

AllocationResult run_euler_variant(Strategy strategy, const ExposurePanel& panel,
                                   double alpha, RunStats* stats) {
    switch (strategy) {
        case Strategy::euler_std: return euler_std(panel, stats);
        case Strategy::euler_es: return euler_es(panel, alpha, stats);
        case Strategy::euler_var_first: return euler_var_first(panel, alpha, stats);
        case Strategy::euler_var_second: return euler_var_second(panel, alpha, stats);
        case Strategy::euler_var_kernel: return euler_var_kernel(panel, alpha, stats);
        default: raise(ErrorCode::invalid_argument, "not an euler strategy");
    }
}

AllocationResult run_euler(const AllocationProblem& problem, Strategy strategy,
                           RunStats* stats) {
    const ExposurePanel* panel = problem.panel();
    const RiskMeasureSpec* measure = problem.measure_spec();
    require(panel != nullptr && measure != nullptr, ErrorCode::invalid_argument,
            "euler strategies need a scenario panel, not a sensitivity set");

    switch (measure->kind) {
        case MeasureKind::std_dev:
            require(strategy == Strategy::euler_std, ErrorCode::invalid_argument,
                    "measure 'std' pairs with strategy euler-std");
            return run_euler_variant(strategy, *panel, 0.0, stats);
        case MeasureKind::es:
            require(strategy == Strategy::euler_es, ErrorCode::invalid_argument,
                    "measure 'es' pairs with strategy euler-es");
            return run_euler_variant(strategy, *panel, measure->alpha, stats);
        case MeasureKind::var:
            require(strategy == Strategy::euler_var_first ||
                        strategy == Strategy::euler_var_second ||
                        strategy == Strategy::euler_var_kernel,
                    ErrorCode::invalid_argument,
                    "measure 'var' pairs with euler-var1/euler-var2/euler-var-kernel");
            return run_euler_variant(strategy, *panel, measure->alpha, stats);
        case MeasureKind::var_plus_svar: {
            require(strategy == Strategy::euler_var_first ||
                        strategy == Strategy::euler_var_second ||
                        strategy == Strategy::euler_var_kernel,
                    ErrorCode::invalid_argument,
                    "measure 'var+svar' pairs with euler-var1/euler-var2/"
                    "euler-var-kernel");
            // Strip sum: the VaR variant on the base strip plus the same on
            // the stressed strip.
            auto base = run_euler_variant(strategy, *panel, measure->alpha, stats);
            auto stressed =
                run_euler_variant(strategy, *measure->stressed, measure->alpha, stats);
            std::vector<double> k(base.allocations.size());
            for (std::size_t i = 0; i < k.size(); ++i)
                k[i] = base.allocations[i] + stressed.allocations[i];
            auto result = make_result(strategy, std::move(k),
                                      base.total + stressed.total,
                                      base.fair && stressed.fair);
            EulerDiagnostics diag;
            diag.full_allocation_gap = result.full_allocation_gap();
            diag.method = base.diagnostics ? base.diagnostics->method : result.label();
            diag.fell_back_to_first_order =
                (base.diagnostics && base.diagnostics->fell_back_to_first_order) ||
                (stressed.diagnostics &&
                 stressed.diagnostics->fell_back_to_first_order);
            result.diagnostics = diag;
            return result;
        }
        case MeasureKind::sba_delta_eq:
            raise(ErrorCode::invalid_argument,
                  "euler strategies are not defined for the SBA measure");
    }
    raise(ErrorCode::invalid_argument, "unhandled measure kind");
}

}  // namespace

AllocationResult run_strategy(const AllocationProblem& problem, Strategy strategy,
                              const RunOptions& options, RunStats* stats,
                              McReport* mc_report) {
    if (is_euler(strategy)) return run_euler(problem, strategy, stats);

    auto vf = problem.value_fn();
    switch (strategy) {
        case Strategy::standalone: return standalone(*vf, stats);
        case Strategy::proportional: return proportional(*vf, stats);
        case Strategy::marginal: return marginal(*vf, stats);
        case Strategy::shapley:
            return shapley_exact(*vf, ShapleyForm::include_unit, options.exact(), stats);
        case Strategy::liu_abs: return liu_abs(*vf, options.exact(), stats);
        case Strategy::liu_max: return liu_max(*vf, options.exact(), stats);
        case Strategy::shapley_mc: return shapley_mc(*vf, options.mc(), stats, mc_report);
        default: raise(ErrorCode::invalid_argument, "unknown strategy");
    }
}

}  // namespace riskalloc
