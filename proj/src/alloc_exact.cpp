#include "riskalloc/alloc_exact.hpp"

#include <bit>
#include <cmath>

#include "riskalloc/errors.hpp"

namespace riskalloc {

namespace {

constexpr int kMaxFactorialN = 20;  // 20! still fits in 64 bits

std::uint64_t factorial_u64(int k) {
    static const auto table = [] {
        std::array<std::uint64_t, kMaxFactorialN + 1> t{};
        t[0] = 1;
        for (int i = 1; i <= kMaxFactorialN; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table[static_cast<std::size_t>(k)];
}

/// Weight lookup by coalition size, one entry per attainable s.
std::vector<double> weight_table(int n, ShapleyForm form) {
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    if (form == ShapleyForm::include_unit) {
        for (int s = 1; s <= n; ++s) w[s] = shapley_weight(n, s, form);
    } else {
        for (int s = 0; s <= n - 1; ++s) w[s] = shapley_weight(n, s, form);
    }
    return w;
}

}  // namespace

double shapley_weight(int n, int s, ShapleyForm form) {
    require(n >= 1 && n <= kMaxFactorialN, ErrorCode::invalid_argument,
            "shapley_weight supports 1 <= n <= 20");
    std::uint64_t num;
    if (form == ShapleyForm::include_unit) {
        require(s >= 1 && s <= n, ErrorCode::invalid_argument,
                "include form needs 1 <= s <= n");
        num = factorial_u64(s - 1) * factorial_u64(n - s);
    } else {
        require(s >= 0 && s <= n - 1, ErrorCode::invalid_argument,
                "exclude form needs 0 <= s <= n-1");
        num = factorial_u64(s) * factorial_u64(n - s - 1);
    }
    return static_cast<double>(num) / static_cast<double>(factorial_u64(n));
}

AllocationResult standalone(CoalitionValueFn& v, RunStats* stats) {
    const std::size_t n = v.n();
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = v.value(Coalition::single(i));
    if (stats) stats->charged_evals += n;
    return make_result(Strategy::standalone, std::move(k), v.grand_value(), false);
}

AllocationResult proportional(CoalitionValueFn& v, RunStats* stats) {
    const std::size_t n = v.n();
    const double total = v.grand_value();
    std::vector<double> k(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        k[i] = v.value(Coalition::single(i));
        denom += k[i];
    }
    if (stats) stats->charged_evals += n;
    require(denom != 0.0 && std::abs(denom) >= 1e-12 * std::abs(total),
            ErrorCode::degenerate,
            "proportional allocation: standalone sum is degenerate");
    const double w = total / denom;
    for (double& ki : k) ki *= w;
    return make_result(Strategy::proportional, std::move(k), total, true);
}

AllocationResult marginal(CoalitionValueFn& v, RunStats* stats) {
    const std::size_t n = v.n();
    const double total = v.grand_value();
    const Coalition grand = Coalition::grand(n);
    std::vector<double> raw(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = total - v.value(grand.without(i));
        denom += raw[i];
    }
    if (stats) stats->charged_evals += n;
    require(std::abs(denom) >= 1e-9 * std::abs(total) && denom != 0.0,
            ErrorCode::degenerate,
            "marginal allocation is numerically unstable: near-zero marginal sum");
    const double w = total / denom;
    for (double& ki : raw) ki *= w;
    return make_result(Strategy::marginal, std::move(raw), total, true);
}

namespace {

enum class TermOp { plain, absolute, clamp_nonneg };

AllocationResult shapley_terms(CoalitionValueFn& v, ShapleyForm form, TermOp op,
                               Strategy tag, const ExactOptions& options,
                               RunStats* stats) {
    const std::size_t n = v.n();
    require(static_cast<int>(n) <= options.shapley_cap, ErrorCode::limit,
            "exact Shapley refused for n=" + std::to_string(n) + " (cap " +
                std::to_string(options.shapley_cap) +
                ", cost n*2^(n-1) evaluations); use shapley-mc");

    const std::vector<double>& table = v.all_values(options.threads);

    const auto weights = weight_table(static_cast<int>(n), form);
    auto apply = [op](double term) {
        switch (op) {
            case TermOp::plain: return term;
            case TermOp::absolute: return std::abs(term);
            case TermOp::clamp_nonneg: return std::max(term, 0.0);
        }
        return term;
    };

    std::vector<double> k(n, 0.0);
    std::uint64_t terms = 0;
    if (form == ShapleyForm::include_unit) {
        // Sum over coalitions T containing i, ascending bitset order.
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            double acc = 0.0;
            for (std::uint64_t t = 1; t < table.size(); ++t) {
                if (!(t & bit)) continue;
                const int s = std::popcount(t);
                acc += weights[s] * apply(table[t] - table[t & ~bit]);
                ++terms;
            }
            k[i] = acc;
        }
    } else {
        // Sum over coalitions S excluding i, ascending bitset order.
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            double acc = 0.0;
            for (std::uint64_t s_mask = 0; s_mask < table.size(); ++s_mask) {
                if (s_mask & bit) continue;
                const int s = std::popcount(s_mask);
                acc += weights[s] * apply(table[s_mask | bit] - table[s_mask]);
                ++terms;
            }
            k[i] = acc;
        }
    }
    if (stats) stats->charged_evals += terms;

    const double total = table.back();
    return make_result(tag, std::move(k), total, op == TermOp::plain);
}

}  // namespace

AllocationResult shapley_exact(CoalitionValueFn& v, ShapleyForm form,
                               const ExactOptions& options, RunStats* stats) {
    return shapley_terms(v, form, TermOp::plain, Strategy::shapley, options, stats);
}

AllocationResult liu_abs(CoalitionValueFn& v, const ExactOptions& options,
                         RunStats* stats) {
    return shapley_terms(v, ShapleyForm::include_unit, TermOp::absolute,
                         Strategy::liu_abs, options, stats);
}

AllocationResult liu_max(CoalitionValueFn& v, const ExactOptions& options,
                         RunStats* stats) {
    return shapley_terms(v, ShapleyForm::include_unit, TermOp::clamp_nonneg,
                         Strategy::liu_max, options, stats);
}

DiversificationResult diversification(CoalitionValueFn& v,
                                      std::span<const double> allocations) {
    const std::size_t n = v.n();
    require(allocations.size() == n, ErrorCode::invalid_argument,
            "allocation vector length mismatch");
    DiversificationResult out;
    out.per_unit.resize(n);
    double standalone_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = v.value(Coalition::single(i));
        out.per_unit[i] = vi - allocations[i];
        standalone_sum += vi;
    }
    out.total = v.grand_value() - standalone_sum;
    return out;
}

}  // namespace riskalloc
