#include "riskalloc/shapley_mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "riskalloc/errors.hpp"
#include "riskalloc/rng.hpp"

namespace riskalloc {

Permutation::Permutation(std::vector<std::uint32_t> order) : order_(std::move(order)) {
    const std::size_t n = order_.size();
    require(n >= 1, ErrorCode::invalid_argument, "permutation must be non-empty");
    rank_.assign(n, 0);
    std::vector<bool> seen(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t u = order_[j];
        require(u < n && !seen[u], ErrorCode::invalid_argument,
                "order is not a permutation of 0..n-1");
        seen[u] = true;
        rank_[u] = static_cast<std::uint32_t>(j);
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    return Permutation(std::move(order));
}

Permutation Permutation::sampled(std::size_t n, std::uint64_t seed,
                                 std::uint64_t pair_index) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t j = n; j > 1; --j) {
        const std::uint64_t r = rng_below(seed, RngDomain::permutation, pair_index,
                                          n - j, j);
        std::swap(order[j - 1], order[r]);
    }
    return Permutation(std::move(order));
}

Permutation Permutation::reversed() const {
    std::vector<std::uint32_t> order(order_.rbegin(), order_.rend());
    return Permutation(std::move(order));
}

Coalition Permutation::predecessors(std::size_t unit) const {
    const std::uint32_t r = rank_[unit];
    Coalition c;
    for (std::size_t j = 0; j < r; ++j) c = c.with(order_[j]);
    return c;
}

void antithetic_sweep(CoalitionValueFn& v, const Permutation& pi,
                      std::span<double> increments) {
    const std::size_t n = v.n();
    require(pi.size() == n, ErrorCode::invalid_argument,
            "permutation size must match the value function");
    require(increments.size() == n, ErrorCode::invalid_argument,
            "increment buffer size mismatch");

    // Position j prices the forward prefix {pi(0..j)} and the reverse prefix
    // {pi(n-1-j..n-1)}. Each chain's marginal is credited to the unit that
    // entered that chain, at half weight; a unit collects one forward and
    // one reverse marginal per pair. Both chains telescope, so the
    // increments sum to v(N) for every pair.
    auto forward = v.accumulator();
    auto reverse = v.accumulator();
    std::fill(increments.begin(), increments.end(), 0.0);
    double rho_fwd_old = 0.0;
    double rho_rev_old = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t unit_fwd = pi.unit_at(j);
        const std::uint32_t unit_rev = pi.unit_at(n - 1 - j);
        forward->add_unit(unit_fwd);
        reverse->add_unit(unit_rev);
        const double rho_fwd = forward->measure();
        const double rho_rev = reverse->measure();
        increments[unit_fwd] += 0.5 * (rho_fwd - rho_fwd_old);
        increments[unit_rev] += 0.5 * (rho_rev - rho_rev_old);
        rho_fwd_old = rho_fwd;
        rho_rev_old = rho_rev;
    }
}

namespace {

// Pairs are accumulated in fixed blocks and the block partials are folded in
// block index order, so sums are bit-identical for any worker count and the
// trace's running state matches the batch run exactly.
constexpr std::uint64_t kBlockPairs = 64;

struct BlockSums {
    std::vector<double> sum;     // per unit, sum of per-pair increments
    std::vector<double> sum_sq;  // per unit, sum of squared increments
    double max_rel_gap = 0.0;
    std::uint64_t violations = 0;
};

struct PairStats {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    double max_rel_gap = 0.0;
    std::uint64_t violations = 0;

    explicit PairStats(std::size_t n) : sum(n, 0.0), sum_sq(n, 0.0) {}

    void fold(const BlockSums& blk) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += blk.sum[i];
            sum_sq[i] += blk.sum_sq[i];
        }
        max_rel_gap = std::max(max_rel_gap, blk.max_rel_gap);
        violations += blk.violations;
    }

    void estimates(std::uint64_t pairs, std::span<double> est,
                   std::span<double> err) const {
        const auto p = static_cast<double>(pairs);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            est[i] = sum[i] / p;
            double variance = 0.0;
            if (pairs >= 2)
                variance =
                    std::max(0.0, (sum_sq[i] - sum[i] * sum[i] / p) / (p - 1.0));
            err[i] = std::sqrt(variance / p);
        }
    }
};

/// Runs pairs [lo, hi) into `out`, checking per-pair telescoping.
void run_pair_range(CoalitionValueFn& v, const McOptions& options, double grand,
                    std::uint64_t lo, std::uint64_t hi, BlockSums& out) {
    const std::size_t n = v.n();
    out.sum.assign(n, 0.0);
    out.sum_sq.assign(n, 0.0);
    const double gap_scale = std::max(1.0, std::abs(grand));
    std::vector<double> inc(n);
    for (std::uint64_t p = lo; p < hi; ++p) {
        const Permutation pi = Permutation::sampled(n, options.seed, p);
        antithetic_sweep(v, pi, inc);
        double pair_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.sum[i] += inc[i];
            out.sum_sq[i] += inc[i] * inc[i];
            pair_sum += inc[i];
        }
        const double rel_gap = std::abs(pair_sum - grand) / gap_scale;
        out.max_rel_gap = std::max(out.max_rel_gap, rel_gap);
        if (rel_gap > options.pair_gap_tolerance) ++out.violations;
    }
}

}  // namespace

AllocationResult shapley_mc(CoalitionValueFn& v, const McOptions& options,
                            RunStats* stats, McReport* report) {
    const std::size_t n = v.n();
    require(options.pairs >= 1, ErrorCode::invalid_argument, "need at least one pair");
    const double grand = v.grand_value();

    const std::uint64_t pairs = options.pairs;
    const std::uint64_t blocks = (pairs + kBlockPairs - 1) / kBlockPairs;
    std::vector<BlockSums> partials(blocks);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t lo = b * kBlockPairs;
        run_pair_range(v, options, grand, lo, std::min(lo + kBlockPairs, pairs),
                       partials[b]);
    };

    if (options.threads <= 1 || blocks == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        const std::size_t workers =
            std::min<std::size_t>(options.threads, static_cast<std::size_t>(blocks));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::uint64_t b = next.fetch_add(1);
                    if (b >= blocks) return;
                    run_block(b);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    PairStats total(n);
    for (const auto& blk : partials) total.fold(blk);

    std::vector<double> estimates(n), errors(n);
    total.estimates(pairs, estimates, errors);

    if (stats) stats->charged_evals += pairs * n;
    if (report)
        *report = McReport{total.max_rel_gap, total.violations, grand};

    auto result = make_result(Strategy::shapley_mc, std::move(estimates), grand, true);
    result.std_errors = std::move(errors);
    return result;
}

std::vector<TraceRow> convergence_trace(CoalitionValueFn& v, const McOptions& options,
                                        std::uint64_t stride, McReport* report) {
    const std::size_t n = v.n();
    require(options.pairs >= 1, ErrorCode::invalid_argument, "need at least one pair");
    require(stride >= 1, ErrorCode::invalid_argument, "stride must be >= 1");
    const double grand = v.grand_value();

    PairStats folded(n);
    std::vector<TraceRow> rows;

    auto snapshot = [&](const PairStats& upto, std::uint64_t pairs_done) {
        TraceRow row;
        row.pairs = pairs_done;
        row.estimates.resize(n);
        row.std_errors.resize(n);
        upto.estimates(pairs_done, row.estimates, row.std_errors);
        rows.push_back(std::move(row));
    };

    const double gap_scale = std::max(1.0, std::abs(grand));
    const std::uint64_t blocks = (options.pairs + kBlockPairs - 1) / kBlockPairs;
    std::vector<double> inc(n);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const std::uint64_t lo = b * kBlockPairs;
        const std::uint64_t hi = std::min(lo + kBlockPairs, options.pairs);
        BlockSums blk;
        blk.sum.assign(n, 0.0);
        blk.sum_sq.assign(n, 0.0);
        for (std::uint64_t p = lo; p < hi; ++p) {
            const Permutation pi = Permutation::sampled(n, options.seed, p);
            antithetic_sweep(v, pi, inc);
            double pair_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                blk.sum[i] += inc[i];
                blk.sum_sq[i] += inc[i] * inc[i];
                pair_sum += inc[i];
            }
            const double rel_gap = std::abs(pair_sum - grand) / gap_scale;
            blk.max_rel_gap = std::max(blk.max_rel_gap, rel_gap);
            if (rel_gap > options.pair_gap_tolerance) ++blk.violations;
            // Snapshots fold a throwaway copy so the running accumulation
            // keeps the exact batch grouping.
            if ((p + 1) % stride == 0 && p + 1 < options.pairs) {
                PairStats upto = folded;
                upto.fold(blk);
                snapshot(upto, p + 1);
            }
        }
        folded.fold(blk);
    }
    snapshot(folded, options.pairs);

    if (report)
        *report = McReport{folded.max_rel_gap, folded.violations, grand};
    return rows;
}

}  // namespace riskalloc
