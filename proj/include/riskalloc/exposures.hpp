#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace riskalloc {

/// A set of risk-unit indices with bitset semantics. Coalition-based
/// strategies are limited to 64 units; per-row strategies (Euler) are not.
class Coalition {
  public:
    static constexpr std::size_t max_units = 64;

    constexpr Coalition() = default;
    explicit constexpr Coalition(std::uint64_t bits) : bits_(bits) {}

    static constexpr Coalition empty() { return Coalition{}; }
    static constexpr Coalition single(std::size_t i) { return Coalition{1ull << i}; }
    static constexpr Coalition grand(std::size_t n) {
        return Coalition{n >= 64 ? ~0ull : (1ull << n) - 1};
    }
    static Coalition of(std::initializer_list<std::size_t> members) {
        std::uint64_t bits = 0;
        for (std::size_t i : members) bits |= 1ull << i;
        return Coalition{bits};
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1ull; }
    constexpr bool empty_set() const { return bits_ == 0; }
    constexpr std::size_t size() const { return std::popcount(bits_); }

    constexpr Coalition with(std::size_t i) const { return Coalition{bits_ | (1ull << i)}; }
    constexpr Coalition without(std::size_t i) const { return Coalition{bits_ & ~(1ull << i)}; }
    constexpr Coalition unite(Coalition o) const { return Coalition{bits_ | o.bits_}; }

    constexpr bool operator==(const Coalition&) const = default;

  private:
    std::uint64_t bits_ = 0;
};

/// n risk units x m scenario P&L realizations; row i holds the scenarios of
/// unit i. Immutable after construction.
class ExposurePanel {
  public:
    ExposurePanel(std::vector<std::string> unit_ids, std::vector<double> values,
                  std::size_t scenarios);

    std::size_t units() const { return unit_ids_.size(); }
    std::size_t scenarios() const { return scenarios_; }
    const std::vector<std::string>& unit_ids() const { return unit_ids_; }
    const std::string& unit_id(std::size_t i) const { return unit_ids_[i]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * scenarios_, scenarios_};
    }
    const std::vector<double>& values() const { return values_; }

    /// Scenario-wise total of the selected rows, summed in increasing unit
    /// index order (fixed order, no reassociation). Empty coalition yields
    /// the zero vector.
    std::vector<double> aggregate(Coalition coalition) const;
    void aggregate_into(Coalition coalition, std::span<double> out) const;

    /// Column-wise sum of all rows.
    std::vector<double> total_row() const { return aggregate(Coalition::grand(units())); }

    /// New panel whose rows are the scenario-wise sums of the given unit
    /// groups (used for hierarchy levels and sub-problems).
    ExposurePanel grouped(const std::vector<std::vector<int>>& groups,
                          const std::vector<std::string>& group_ids) const;

  private:
    std::vector<std::string> unit_ids_;
    std::vector<double> values_;  // row-major, units() x scenarios()
    std::size_t scenarios_ = 0;
};

/// Multivariate normal scenario generator spec. The covariance may be
/// semi-definite: eigenvalues in [-1e-10 * max diagonal, 0) are clipped to
/// zero before factorization; anything lower is rejected.
struct GaussianSpec {
    std::vector<double> mean;        // length n
    std::vector<double> covariance;  // n x n, row-major
    std::uint64_t seed = 0;

    std::size_t units() const { return mean.size(); }

    static GaussianSpec iid_standard(std::size_t n, std::uint64_t seed);
    /// Equicorrelated spec: var = sd^2 on the diagonal, rho*sd^2 off it.
    static GaussianSpec equicorrelated(std::size_t n, double mean, double sd,
                                       double rho, std::uint64_t seed);
};

/// Draw m joint scenarios (columns) from the spec. Deterministic for a fixed
/// seed and independent of `threads`.
ExposurePanel sample_gaussian(const GaussianSpec& spec, std::size_t scenarios,
                              int threads = 1);

/// Tree of portfolio nodes. Internal nodes carry children; leaves carry the
/// unit indices they group.
struct HierarchyNode {
    std::string label;
    std::vector<HierarchyNode> children;
    std::vector<int> units;  // leaf payload; ignored when children are present

    bool is_leaf() const { return children.empty(); }
};

struct HierarchyViolation {
    std::string node_path;
    std::string detail;
};

class Hierarchy {
  public:
    explicit Hierarchy(HierarchyNode root) : root_(std::move(root)) {}

    const HierarchyNode& root() const { return root_; }

    /// All unit indices under the node, sorted ascending.
    static std::vector<int> leaf_units(const HierarchyNode& node);

    /// First violation of the partition rules, if any: children of a node
    /// must be pairwise disjoint and cover the parent's leaf set; the root
    /// must cover {0..n-1} exactly.
    std::optional<HierarchyViolation> validate(std::size_t n_units) const;

    std::size_t max_depth() const;

    /// Nodes forming the partition at `depth`: every node at that depth plus
    /// shallower leaves that persist down the tree. Paths are
    /// "/"-joined labels starting at the root's label.
    struct FrontierEntry {
        const HierarchyNode* node;
        std::string path;
    };
    std::vector<FrontierEntry> frontier(std::size_t depth) const;

  private:
    HierarchyNode root_;
};

}  // namespace riskalloc
