#include "riskalloc/exposures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>
#include <unordered_set>

#include "riskalloc/errors.hpp"
#include "riskalloc/rng.hpp"

namespace riskalloc {

ExposurePanel::ExposurePanel(std::vector<std::string> unit_ids,
                             std::vector<double> values, std::size_t scenarios)
    : unit_ids_(std::move(unit_ids)), values_(std::move(values)), scenarios_(scenarios) {
    const std::size_t n = unit_ids_.size();
    require(n >= 1, ErrorCode::invalid_argument, "panel needs at least one unit");
    require(scenarios_ >= 1, ErrorCode::invalid_argument,
            "panel needs at least one scenario");
    require(values_.size() == n * scenarios_, ErrorCode::invalid_argument,
            "panel values size must be units x scenarios");
    for (double v : values_)
        require(std::isfinite(v), ErrorCode::invalid_argument,
                "panel entries must be finite");
    std::unordered_set<std::string> seen;
    for (const auto& id : unit_ids_)
        require(seen.insert(id).second, ErrorCode::invalid_argument,
                "duplicate unit id '" + id + "'");
}

void ExposurePanel::aggregate_into(Coalition coalition, std::span<double> out) const {
    const std::size_t n = units();
    // Members above 63 are unrepresentable, so only the n < 64 case can hold
    // an out-of-range index.
    if (n < Coalition::max_units)
        require((coalition.bits() >> n) == 0, ErrorCode::invalid_argument,
                "coalition member out of range for panel");
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t limit = std::min(n, Coalition::max_units);
    for (std::size_t i = 0; i < limit; ++i) {
        if (!coalition.contains(i)) continue;
        const auto r = row(i);
        for (std::size_t j = 0; j < scenarios_; ++j) out[j] += r[j];
    }
}

std::vector<double> ExposurePanel::aggregate(Coalition coalition) const {
    std::vector<double> out(scenarios_);
    aggregate_into(coalition, out);
    return out;
}

ExposurePanel ExposurePanel::grouped(const std::vector<std::vector<int>>& groups,
                                     const std::vector<std::string>& group_ids) const {
    require(groups.size() == group_ids.size(), ErrorCode::invalid_argument,
            "groups and group_ids must align");
    require(!groups.empty(), ErrorCode::invalid_argument, "need at least one group");
    std::vector<double> values(groups.size() * scenarios_, 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double* out = values.data() + g * scenarios_;
        std::vector<int> members = groups[g];
        std::sort(members.begin(), members.end());
        for (int i : members) {
            require(i >= 0 && static_cast<std::size_t>(i) < units(),
                    ErrorCode::invalid_argument, "group member out of range");
            const auto r = row(static_cast<std::size_t>(i));
            for (std::size_t j = 0; j < scenarios_; ++j) out[j] += r[j];
        }
    }
    return ExposurePanel(group_ids, std::move(values), scenarios_);
}

GaussianSpec GaussianSpec::iid_standard(std::size_t n, std::uint64_t seed) {
    GaussianSpec spec;
    spec.mean.assign(n, 0.0);
    spec.covariance.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) spec.covariance[i * n + i] = 1.0;
    spec.seed = seed;
    return spec;
}

GaussianSpec GaussianSpec::equicorrelated(std::size_t n, double mean, double sd,
                                          double rho, std::uint64_t seed) {
    GaussianSpec spec;
    spec.mean.assign(n, mean);
    spec.covariance.assign(n * n, rho * sd * sd);
    for (std::size_t i = 0; i < n; ++i) spec.covariance[i * n + i] = sd * sd;
    spec.seed = seed;
    return spec;
}

namespace {

/// Symmetric square root of the covariance with eigenvalue clipping:
/// eigenvalues in [-tol, 0) are treated as exact zeros, anything below -tol
/// is a spec error. tol = 1e-10 * max diagonal entry.
Eigen::MatrixXd covariance_factor(const GaussianSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.units());
    require(spec.covariance.size() == spec.mean.size() * spec.mean.size(),
            ErrorCode::invalid_argument, "covariance must be n x n");
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) c(i, j) = spec.covariance[i * n + j];

    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(c(i, i)));
    const double tol = 1e-10 * std::max(max_diag, 1e-300);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            require(std::abs(c(i, j) - c(j, i)) <= tol, ErrorCode::invalid_argument,
                    "covariance must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (c + c.transpose()));
    require(solver.info() == Eigen::Success, ErrorCode::degenerate,
            "covariance eigendecomposition failed");
    Eigen::VectorXd lambda = solver.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
        require(lambda(i) >= -tol, ErrorCode::invalid_argument,
                "covariance is not positive semi-definite");
        lambda(i) = std::max(lambda(i), 0.0);
    }
    return solver.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().transpose();
}

}  // namespace

ExposurePanel sample_gaussian(const GaussianSpec& spec, std::size_t scenarios,
                              int threads) {
    const std::size_t n = spec.units();
    require(n >= 1, ErrorCode::invalid_argument, "gaussian spec needs n >= 1");
    require(scenarios >= 1, ErrorCode::invalid_argument, "need at least one scenario");
    const Eigen::MatrixXd factor = covariance_factor(spec);

    std::vector<double> values(n * scenarios);
    // Scenario j is a fully independent counter block: x_j = mu + L z_j with
    // z_{i,j} drawn from stream i at index j.
    auto fill_range = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> z(n);
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t i = 0; i < n; ++i)
                z[i] = rng_normal(spec.seed, RngDomain::gaussian, i, j);
            for (std::size_t i = 0; i < n; ++i) {
                double x = spec.mean[i];
                for (std::size_t k = 0; k < n; ++k) x += factor(i, k) * z[k];
                values[i * scenarios + j] = x;
            }
        }
    };

    if (threads <= 1 || scenarios < 1024) {
        fill_range(0, scenarios);
    } else {
        const std::size_t workers = std::min<std::size_t>(threads, 64);
        const std::size_t chunk = 4096;
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t lo = next.fetch_add(chunk);
                    if (lo >= scenarios) return;
                    fill_range(lo, std::min(lo + chunk, scenarios));
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "u" + std::to_string(i + 1);
    return ExposurePanel(std::move(ids), std::move(values), scenarios);
}

std::vector<int> Hierarchy::leaf_units(const HierarchyNode& node) {
    std::vector<int> out;
    if (node.is_leaf()) {
        out = node.units;
    } else {
        for (const auto& child : node.children) {
            auto sub = leaf_units(child);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::optional<HierarchyViolation> validate_node(const HierarchyNode& node,
                                                const std::string& path) {
    if (node.is_leaf()) return std::nullopt;
    std::set<int> seen;
    for (const auto& child : node.children) {
        for (int u : Hierarchy::leaf_units(child)) {
            if (!seen.insert(u).second)
                return HierarchyViolation{path, "children overlap at unit index " +
                                                    std::to_string(u)};
        }
    }
    for (const auto& child : node.children) {
        if (auto v = validate_node(child, path + "/" + child.label)) return v;
    }
    return std::nullopt;
}

}  // namespace

std::optional<HierarchyViolation> Hierarchy::validate(std::size_t n_units) const {
    if (auto v = validate_node(root_, root_.label)) return v;
    const auto cover = leaf_units(root_);
    std::set<int> covered(cover.begin(), cover.end());
    if (covered.size() != cover.size())
        return HierarchyViolation{root_.label, "duplicate unit index in leaves"};
    for (int u : covered) {
        if (u < 0 || static_cast<std::size_t>(u) >= n_units)
            return HierarchyViolation{root_.label,
                                      "unit index " + std::to_string(u) + " out of range"};
    }
    for (std::size_t u = 0; u < n_units; ++u) {
        if (!covered.count(static_cast<int>(u)))
            return HierarchyViolation{root_.label,
                                      "unit index " + std::to_string(u) + " uncovered"};
    }
    return std::nullopt;
}

namespace {

std::size_t depth_of(const HierarchyNode& node) {
    std::size_t d = 0;
    for (const auto& child : node.children) d = std::max(d, 1 + depth_of(child));
    return d;
}

void collect_frontier(const HierarchyNode& node, const std::string& path,
                      std::size_t depth,
                      std::vector<Hierarchy::FrontierEntry>& out) {
    if (depth == 0 || node.is_leaf()) {
        out.push_back({&node, path});
        return;
    }
    for (const auto& child : node.children)
        collect_frontier(child, path + "/" + child.label, depth - 1, out);
}

}  // namespace

std::size_t Hierarchy::max_depth() const { return depth_of(root_); }

std::vector<Hierarchy::FrontierEntry> Hierarchy::frontier(std::size_t depth) const {
    std::vector<FrontierEntry> out;
    collect_frontier(root_, root_.label, depth, out);
    return out;
}

}  // namespace riskalloc
