#pragma once

#include <span>

#include "riskalloc/result.hpp"

namespace riskalloc {

/// Zero out negative allocations and redistribute proportionally:
/// K_i -> rho(X) * max(K_i, 0) / (rho(X) - sum_{K_j < 0} K_j).
/// Requires rho(X) > 0 and at least one positive allocation; preserves full
/// allocation exactly.
AllocationResult repair_max_proportional(const AllocationResult& input);

/// Redistribute by absolute value: K_i -> rho(X) * |K_i| / sum_j |K_j|.
/// Requires rho(X) > 0 and a non-zero allocation vector; preserves full
/// allocation exactly.
AllocationResult repair_abs_proportional(const AllocationResult& input);

AllocationResult repair(const AllocationResult& input, RepairMethod method);

/// Combine a computed allocation for the tractable measure component with a
/// proportional split of an intractable component:
/// K_i = K_i^a + total_b * standalone_b[i] / sum standalone_b.
AllocationResult hybrid(const AllocationResult& alloc_a,
                        std::span<const double> standalone_b, double total_b);

}  // namespace riskalloc
