#include "riskalloc/adjust.hpp"

#include <algorithm>
#include <cmath>

#include "riskalloc/errors.hpp"

namespace riskalloc {

namespace {

void check_repair_preconditions(const AllocationResult& input) {
    require(!input.allocations.empty(), ErrorCode::invalid_argument,
            "repair on empty allocation");
    require(input.total > 0.0, ErrorCode::degenerate,
            "repairs apply to positive risk totals only");
}

}  // namespace

AllocationResult repair_max_proportional(const AllocationResult& input) {
    check_repair_preconditions(input);
    double negative_sum = 0.0;
    bool any_positive = false;
    for (double k : input.allocations) {
        if (k < 0.0) negative_sum += k;
        if (k > 0.0) any_positive = true;
    }
    require(any_positive, ErrorCode::degenerate,
            "max-prop repair: no positive allocation to redistribute to");
    const double denom = input.total - negative_sum;
    require(denom != 0.0, ErrorCode::degenerate,
            "max-prop repair: zero denominator");

    AllocationResult out = input;
    const double scale = input.total / denom;
    for (double& k : out.allocations) k = scale * std::max(k, 0.0);
    out.fair = true;
    out.repair = RepairMethod::max_proportional;
    out.std_errors.reset();
    out.diagnostics.reset();
    return out;
}

AllocationResult repair_abs_proportional(const AllocationResult& input) {
    check_repair_preconditions(input);
    double abs_sum = 0.0;
    for (double k : input.allocations) abs_sum += std::abs(k);
    require(abs_sum > 0.0, ErrorCode::degenerate,
            "abs-prop repair: allocation vector is all zero");

    AllocationResult out = input;
    const double scale = input.total / abs_sum;
    for (double& k : out.allocations) k = scale * std::abs(k);
    out.fair = true;
    out.repair = RepairMethod::abs_proportional;
    out.std_errors.reset();
    out.diagnostics.reset();
    return out;
}

AllocationResult repair(const AllocationResult& input, RepairMethod method) {
    return method == RepairMethod::max_proportional ? repair_max_proportional(input)
                                                    : repair_abs_proportional(input);
}

AllocationResult hybrid(const AllocationResult& alloc_a,
                        std::span<const double> standalone_b, double total_b) {
    require(standalone_b.size() == alloc_a.allocations.size(),
            ErrorCode::invalid_argument, "hybrid: component sizes must match");
    double denom = 0.0;
    for (double s : standalone_b) denom += s;
    require(denom != 0.0, ErrorCode::degenerate,
            "hybrid: standalone sum of the proportional component is zero");

    AllocationResult out = alloc_a;
    const double w = total_b / denom;
    for (std::size_t i = 0; i < standalone_b.size(); ++i)
        out.allocations[i] += w * standalone_b[i];
    out.total = alloc_a.total + total_b;
    out.std_errors.reset();
    out.diagnostics.reset();
    return out;
}

}  // namespace riskalloc
