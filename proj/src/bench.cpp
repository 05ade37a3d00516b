#include "riskalloc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>

#include "riskalloc/errors.hpp"
#include "riskalloc/runner.hpp"

namespace riskalloc {

std::uint64_t count_evaluations(Strategy strategy, std::size_t n,
                                std::uint64_t pairs) {
    require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
    switch (strategy) {
        case Strategy::standalone:
        case Strategy::proportional:
        case Strategy::marginal:
        case Strategy::euler_std:
        case Strategy::euler_es:
        case Strategy::euler_var_first:
        case Strategy::euler_var_second:
        case Strategy::euler_var_kernel:
            return n;
        case Strategy::shapley:
        case Strategy::liu_abs:
        case Strategy::liu_max:
            require(n <= 58, ErrorCode::invalid_argument, "count overflows 64 bits");
            return n * (std::uint64_t{1} << (n - 1));
        case Strategy::shapley_mc:
            require(pairs >= 1, ErrorCode::invalid_argument,
                    "shapley-mc count needs the pair budget");
            return n * pairs;  // N_MC = 2*pairs permutations, n * N_MC/2 terms
    }
    raise(ErrorCode::invalid_argument, "unknown strategy");
}

namespace {

double timed_median(int repetitions, const std::function<void()>& work) {
    std::vector<double> times;
    times.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        work();
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

std::vector<ScalingRow> measure_scaling(const RiskMeasureSpec& measure,
                                        const ScalingOptions& options) {
    require(options.n_lo >= 2 && options.n_lo <= options.n_hi,
            ErrorCode::invalid_argument, "bad n range");
    require(options.repetitions >= 1, ErrorCode::invalid_argument,
            "need at least one repetition");

    std::vector<ScalingRow> rows;
    for (std::size_t n = options.n_lo; n <= options.n_hi; n += options.n_step) {
        const auto spec = GaussianSpec::iid_standard(n, options.seed + n);
        auto panel = std::make_shared<ExposurePanel>(
            sample_gaussian(spec, options.scenarios, options.threads));

        ScalingRow row;
        row.n = n;

        RunOptions run_opts;
        run_opts.pairs = options.pairs;
        run_opts.seed = options.seed;
        run_opts.threads = options.threads;
        run_opts.shapley_cap = options.exact_cap;

        if (static_cast<int>(n) <= options.exact_cap) {
            row.exact_run = true;
            RunStats stats;
            row.exact_seconds = timed_median(options.repetitions, [&] {
                // Fresh value function per repetition: timings must include
                // the coalition evaluations, not cache hits.
                PanelProblem problem(panel, measure);
                stats = RunStats{};
                run_strategy(problem, Strategy::shapley, run_opts, &stats);
            });
            row.exact_evals = stats.charged_evals;
        }

        {
            RunStats stats;
            row.mc_seconds = timed_median(options.repetitions, [&] {
                PanelProblem problem(panel, measure);
                stats = RunStats{};
                run_strategy(problem, Strategy::shapley_mc, run_opts, &stats);
            });
            row.mc_evals = stats.charged_evals;
        }

        rows.push_back(row);
    }
    return rows;
}

}  // namespace riskalloc
