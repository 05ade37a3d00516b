#pragma once

#include <cstdint>

#include "riskalloc/result.hpp"
#include "riskalloc/value_function.hpp"

namespace riskalloc {

enum class ShapleyForm { include_unit, exclude_unit };

struct ExactOptions {
    int shapley_cap = 20;  // refuse exact Shapley above this n
    int threads = 1;
};

/// K_i = v({i}); not a fair strategy (no full allocation).
AllocationResult standalone(CoalitionValueFn& v, RunStats* stats = nullptr);

/// K_i = v({i}) * v(N) / sum_j v({j}).
AllocationResult proportional(CoalitionValueFn& v, RunStats* stats = nullptr);

/// K_i = w * [v(N) - v(N \ {i})] with w = v(N) / sum_j [v(N) - v(N \ {j})].
/// Errors out when |denominator| < 1e-9 * |v(N)| (numerically unstable).
AllocationResult marginal(CoalitionValueFn& v, RunStats* stats = nullptr);

/// Exact Shapley weight: include form w = (s-1)!(n-s)!/n! over coalitions
/// containing the unit (s = |S|); exclude form w' = s!(n-s-1)!/n! over
/// coalitions excluding it. Factorials are exact 64-bit integers up to n=20,
/// converted to double once.
double shapley_weight(int n, int s, ShapleyForm form);

/// Exact Shapley allocation, either coalition form. The two forms enumerate
/// different index sets with different weight tables and agree to 1e-12
/// relative.
AllocationResult shapley_exact(CoalitionValueFn& v,
                               ShapleyForm form = ShapleyForm::include_unit,
                               const ExactOptions& options = {},
                               RunStats* stats = nullptr);

/// Shapley sums with |.| or max(., 0) applied to each marginal term. Both
/// break full allocation; results are flagged fair = false.
AllocationResult liu_abs(CoalitionValueFn& v, const ExactOptions& options = {},
                         RunStats* stats = nullptr);
AllocationResult liu_max(CoalitionValueFn& v, const ExactOptions& options = {},
                         RunStats* stats = nullptr);

/// Per-unit v({i}) - K_i and total v(N) - sum_i v({i}).
DiversificationResult diversification(CoalitionValueFn& v,
                                      std::span<const double> allocations);

}  // namespace riskalloc
