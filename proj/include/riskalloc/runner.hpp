#pragma once

#include "riskalloc/alloc_exact.hpp"
#include "riskalloc/result.hpp"
#include "riskalloc/shapley_mc.hpp"
#include "riskalloc/value_function.hpp"

namespace riskalloc {

struct RunOptions {
    std::uint64_t pairs = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    int shapley_cap = 20;

    ExactOptions exact() const { return {shapley_cap, threads}; }
    McOptions mc() const { return {pairs, seed, threads, 1e-9}; }
};

/// Dispatch a strategy over an allocation problem. Coalition strategies run
/// against the problem's (shared, memoizing) value function; the Euler
/// strategies require a panel-backed problem whose measure matches the
/// variant (std / es / var; var+svar is handled as the sum of the two
/// strips' VaR allocations).
AllocationResult run_strategy(const AllocationProblem& problem, Strategy strategy,
                              const RunOptions& options, RunStats* stats = nullptr,
                              McReport* mc_report = nullptr);

}  // namespace riskalloc
