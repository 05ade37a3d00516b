#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "riskalloc/result.hpp"
#include "riskalloc/value_function.hpp"

namespace riskalloc {

/// An ordering of risk units with rank lookup, inverse lookup and the
/// antithetic (reverse) view. order[j] is the unit placed at position j.
class Permutation {
  public:
    explicit Permutation(std::vector<std::uint32_t> order);

    /// Uniform sample via Fisher-Yates driven by the counter-based stream of
    /// pair `pair_index`, so sampling is reproducible for any worker count.
    static Permutation sampled(std::size_t n, std::uint64_t seed,
                               std::uint64_t pair_index);
    static Permutation identity(std::size_t n);

    std::size_t size() const { return order_.size(); }
    std::uint32_t unit_at(std::size_t position) const { return order_[position]; }
    std::uint32_t rank(std::size_t unit) const { return rank_[unit]; }
    const std::vector<std::uint32_t>& order() const { return order_; }

    /// The sequence read right to left.
    Permutation reversed() const;

    /// Units ranked strictly before `unit`.
    Coalition predecessors(std::size_t unit) const;

  private:
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> rank_;
};

struct McOptions {
    std::uint64_t pairs = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Per-pair telescoping tolerance, relative to |v(N)|.
    double pair_gap_tolerance = 1e-9;
};

/// Telescoping diagnostics: every antithetic pair's increments must sum to
/// v(N); violations of the tolerance are counted, the worst relative gap
/// kept.
struct McReport {
    double max_pair_rel_gap = 0.0;
    std::uint64_t pair_gap_violations = 0;
    double grand_value = 0.0;
};

/// One antithetic pair sweep: positions j = 0..n-1 are priced as the
/// half-sum of the forward prefix {pi(0..j)} and the reverse prefix
/// {pi(n-1-j..n-1)}, and the difference to the previous position is credited
/// to the unit entering the forward prefix. Increments telescope to v(N).
void antithetic_sweep(CoalitionValueFn& v, const Permutation& pi,
                      std::span<double> increments);

/// Antithetic permutation-sampling estimate of the Shapley allocation.
/// Deterministic for fixed (seed, pairs, n): pairs are processed in fixed
/// blocks whose partial sums are merged in block order, so the result is
/// bit-identical for any thread count. Standard errors are the sample
/// standard deviation of per-pair increments divided by sqrt(pairs).
AllocationResult shapley_mc(CoalitionValueFn& v, const McOptions& options,
                            RunStats* stats = nullptr, McReport* report = nullptr);

struct TraceRow {
    std::uint64_t pairs = 0;
    std::vector<double> estimates;
    std::vector<double> std_errors;
};

/// Snapshots of the running estimates every `stride` pairs (plus the final
/// state). The final row reproduces shapley_mc exactly.
std::vector<TraceRow> convergence_trace(CoalitionValueFn& v, const McOptions& options,
                                        std::uint64_t stride,
                                        McReport* report = nullptr);

}  // namespace riskalloc
