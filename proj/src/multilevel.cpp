#include "riskalloc/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "riskalloc/errors.hpp"

namespace riskalloc {

std::string multilevel_method_name(MultiLevelMethod m) {
    switch (m) {
        case MultiLevelMethod::ptd: return "ptd";
        case MultiLevelMethod::ctd: return "ctd";
        case MultiLevelMethod::bu: return "bu";
    }
    return "?";
}

namespace {

struct FlatNode {
    const HierarchyNode* node;
    std::string path;
    std::size_t depth;
    std::ptrdiff_t parent;
    std::vector<std::size_t> children;
    std::vector<int> leaf_units;
};

void flatten(const HierarchyNode& node, const std::string& path, std::size_t depth,
             std::ptrdiff_t parent, std::vector<FlatNode>& out) {
    const std::size_t index = out.size();
    out.push_back({&node, path, depth, parent, {}, Hierarchy::leaf_units(node)});
    for (const auto& child : node.children) {
        out[index].children.push_back(out.size());
        flatten(child, path + "/" + child.label, depth + 1, index, out);
    }
}

/// Strategy run over a set of unit groups, with node-path context on errors.
std::vector<double> allocate_groups(const AllocationProblem& problem,
                                    const std::vector<std::vector<int>>& groups,
                                    const std::vector<std::string>& ids,
                                    Strategy strategy, const RunOptions& options,
                                    const std::string& scope) {
    try {
        auto sub = problem.regrouped(groups, ids);
        return run_strategy(*sub, strategy, options).allocations;
    } catch (const Error& e) {
        raise(e.code(), "at node '" + scope + "': " + e.what());
    }
}

}  // namespace

MultiLevelResult allocate_multilevel(const AllocationProblem& problem,
                                     const Hierarchy& hierarchy, Strategy strategy,
                                     MultiLevelMethod method,
                                     const RunOptions& options) {
    if (auto violation = hierarchy.validate(problem.unit_count()))
        raise(ErrorCode::invalid_argument,
              "invalid hierarchy at node '" + violation->node_path +
                  "': " + violation->detail);

    std::vector<FlatNode> flat;
    flatten(hierarchy.root(), hierarchy.root().label, 0, -1, flat);

    std::map<const HierarchyNode*, std::size_t> index_of;
    for (std::size_t i = 0; i < flat.size(); ++i) index_of[flat[i].node] = i;

    const double total = problem.value_fn()->grand_value();
    std::vector<double> amount(flat.size(), 0.0);

    auto frontier_groups = [&](std::size_t depth) {
        const auto entries = hierarchy.frontier(depth);
        std::vector<std::size_t> nodes;
        std::vector<std::vector<int>> groups;
        std::vector<std::string> ids;
        for (const auto& e : entries) {
            const std::size_t idx = index_of.at(e.node);
            nodes.push_back(idx);
            groups.push_back(flat[idx].leaf_units);
            ids.push_back(e.path);
        }
        return std::make_tuple(std::move(nodes), std::move(groups), std::move(ids));
    };

    const std::size_t max_depth = hierarchy.max_depth();

    switch (method) {
        case MultiLevelMethod::ptd: {
            // Independent strategy run per level, then top-down rescale so
            // each sibling family sums to its parent's adjusted amount.
            std::vector<double> raw(flat.size(), 0.0);
            for (std::size_t depth = 1; depth <= max_depth; ++depth) {
                auto [nodes, groups, ids] = frontier_groups(depth);
                const auto k = allocate_groups(problem, groups, ids, strategy, options,
                                               "level " + std::to_string(depth));
                for (std::size_t j = 0; j < nodes.size(); ++j)
                    if (flat[nodes[j]].depth == depth) raw[nodes[j]] = k[j];
            }
            amount[0] = total;
            for (std::size_t u = 0; u < flat.size(); ++u) {
                if (flat[u].children.empty()) continue;
                double family = 0.0;
                for (std::size_t c : flat[u].children) family += raw[c];
                require(family != 0.0, ErrorCode::degenerate,
                        "ptd: sibling allocations sum to zero under node '" +
                            flat[u].path + "'");
                for (std::size_t c : flat[u].children)
                    amount[c] = raw[c] * (amount[u] / family);
            }
            break;
        }
        case MultiLevelMethod::ctd: {
            // Scope-restricted re-allocation per parent, rescaled to the
            // parent's amount.
            amount[0] = total;
            for (std::size_t u = 0; u < flat.size(); ++u) {
                if (flat[u].children.empty()) continue;
                std::vector<std::vector<int>> groups;
                std::vector<std::string> ids;
                for (std::size_t c : flat[u].children) {
                    groups.push_back(flat[c].leaf_units);
                    ids.push_back(flat[c].path);
                }
                const auto k = allocate_groups(problem, groups, ids, strategy, options,
                                               flat[u].path);
                double family = 0.0;
                for (double ki : k) family += ki;
                require(family != 0.0, ErrorCode::degenerate,
                        "ctd: sub-allocation sums to zero under node '" +
                            flat[u].path + "'");
                for (std::size_t j = 0; j < k.size(); ++j)
                    amount[flat[u].children[j]] = k[j] * (amount[u] / family);
            }
            break;
        }
        case MultiLevelMethod::bu: {
            // Allocate the leaf partition, then sum upward.
            auto [nodes, groups, ids] = frontier_groups(max_depth);
            const auto k =
                allocate_groups(problem, groups, ids, strategy, options, "leaf level");
            for (std::size_t j = 0; j < nodes.size(); ++j) amount[nodes[j]] = k[j];
            for (std::size_t u = flat.size(); u-- > 0;) {
                if (flat[u].children.empty()) continue;
                double s = 0.0;
                for (std::size_t c : flat[u].children) s += amount[c];
                amount[u] = s;
            }
            break;
        }
    }

    MultiLevelResult result;
    result.method = method;
    result.strategy = strategy;
    result.total = total;
    result.nodes.resize(flat.size());
    for (std::size_t u = 0; u < flat.size(); ++u) {
        MultiLevelNode& node = result.nodes[u];
        node.path = flat[u].path;
        node.depth = flat[u].depth;
        node.parent = flat[u].parent;
        node.allocation = amount[u];
        node.is_leaf = flat[u].children.empty();
        node.leaf_units = flat[u].leaf_units;
        if (!flat[u].children.empty()) {
            double s = 0.0;
            for (std::size_t c : flat[u].children) s += amount[c];
            node.consistency_gap = s - amount[u];
        }
    }
    return result;
}

}  // namespace riskalloc
