#pragma once

#include <string>
#include <vector>

#include "riskalloc/exposures.hpp"
#include "riskalloc/runner.hpp"

namespace riskalloc {

enum class MultiLevelMethod { ptd, ctd, bu };

std::string multilevel_method_name(MultiLevelMethod m);

/// Allocation amounts on the hierarchy tree. Every parent's consistency gap
/// (sum of child amounts minus its own) is carried explicitly and must stay
/// within 1e-9 relative.
struct MultiLevelNode {
    std::string path;  // "/"-joined labels from the root
    std::size_t depth = 0;
    std::ptrdiff_t parent = -1;  // index into nodes, -1 for the root
    double allocation = 0.0;
    double consistency_gap = 0.0;  // 0 for leaves
    bool is_leaf = false;
    std::vector<int> leaf_units;
};

struct MultiLevelResult {
    MultiLevelMethod method = MultiLevelMethod::ptd;
    Strategy strategy = Strategy::proportional;
    double total = 0.0;  // rho(X) of the full problem
    std::vector<MultiLevelNode> nodes;  // depth-first pre-order
};

/// Proportional Top-Down: run the strategy independently over each level's
/// partition, then rescale each sibling family so it sums to its parent's
/// adjusted amount; the root keeps rho(X).
///
/// Constrained Top-Down: allocate the top level over the full problem; for
/// each parent re-run the strategy on the scope-restricted sub-problem of
/// its children (restricted exposures, parent as the grand coalition) and
/// rescale the sub-allocation to the parent's amount; recurse.
///
/// Bottom-Up: run the strategy over the leaf partition only and sum child
/// amounts upward.
MultiLevelResult allocate_multilevel(const AllocationProblem& problem,
                                     const Hierarchy& hierarchy, Strategy strategy,
                                     MultiLevelMethod method,
                                     const RunOptions& options);

}  // namespace riskalloc
