#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskalloc {

enum class Strategy {
    standalone,
    proportional,
    marginal,
    shapley,
    shapley_mc,
    liu_abs,
    liu_max,
    euler_std,
    euler_es,
    euler_var_first,
    euler_var_second,
    euler_var_kernel,
};

std::string strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

enum class RepairMethod { max_proportional, abs_proportional };
std::string repair_name(RepairMethod m);

/// Extra reporting for the approximate strategies: the full-allocation gap is
/// carried explicitly, never hidden.
struct EulerDiagnostics {
    double full_allocation_gap = 0.0;
    std::string method;
    bool fell_back_to_first_order = false;
};

/// Per-unit allocations K_i with the portfolio total rho(X). `fair` marks
/// strategies that satisfy full allocation by construction; constructing a
/// fair result whose allocations do not sum to the total (1e-9 relative)
/// is rejected.
struct AllocationResult {
    Strategy strategy = Strategy::standalone;
    std::vector<double> allocations;
    double total = 0.0;
    bool fair = false;
    std::optional<std::vector<double>> std_errors;  // MC strategies only
    std::optional<EulerDiagnostics> diagnostics;
    std::optional<RepairMethod> repair;

    std::size_t units() const { return allocations.size(); }
    double allocation_sum() const;
    double full_allocation_gap() const { return allocation_sum() - total; }
    std::string label() const;
};

AllocationResult make_result(Strategy strategy, std::vector<double> allocations,
                             double total, bool fair);

/// Evaluation bookkeeping for a single strategy run. `charged` counts risk
/// measure evaluations in the standard cost-model accounting (one per
/// marginal term; the portfolio total and reused values are not re-charged);
/// `raw` counts actual measure computations.
struct RunStats {
    std::uint64_t charged_evals = 0;
    std::uint64_t raw_evals = 0;
    double seconds = 0.0;
};

/// Per-unit and total diversification benefits: rho(X_i) - K_i per unit and
/// rho(X) - sum_i rho(X_i) for the portfolio.
struct DiversificationResult {
    std::vector<double> per_unit;
    double total = 0.0;
};

}  // namespace riskalloc
