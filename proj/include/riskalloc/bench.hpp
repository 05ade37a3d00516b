#pragma once

#include <cstdint>
#include <vector>

#include "riskalloc/measures.hpp"
#include "riskalloc/result.hpp"

namespace riskalloc {

/// Predicted risk-measure evaluation count in the standard cost-model
/// accounting (one per marginal term; the portfolio-level total and reused
/// values are not re-charged): n for Standalone/Proportional/Marginal/Euler,
/// n * 2^(n-1) for exact Shapley, n * N_MC/2 = n * pairs for antithetic
/// Shapley MC.
std::uint64_t count_evaluations(Strategy strategy, std::size_t n,
                                std::uint64_t pairs = 0);

struct ScalingRow {
    std::size_t n = 0;
    bool exact_run = false;
    double exact_seconds = 0.0;   // median of repetitions
    std::uint64_t exact_evals = 0;
    double mc_seconds = 0.0;
    std::uint64_t mc_evals = 0;
};

struct ScalingOptions {
    std::size_t n_lo = 4;
    std::size_t n_hi = 14;
    std::size_t n_step = 1;
    std::size_t scenarios = 250;
    std::uint64_t pairs = 5000;
    int exact_cap = 20;  // skip exact timing above this n
    int repetitions = 3;
    std::uint64_t seed = 0;
    int threads = 1;  // benchmarks default to single-threaded timings
};

/// Exact-vs-MC scaling study on iid standard normal panels. Wall-clock
/// medians over `repetitions` runs, plus charged evaluation counts.
std::vector<ScalingRow> measure_scaling(const RiskMeasureSpec& measure,
                                        const ScalingOptions& options);

}  // namespace riskalloc
