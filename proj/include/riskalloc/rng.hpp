#pragma once

#include <array>
#include <cstdint>

namespace riskalloc {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Stateless: every 128-bit counter maps to an
/// independent 128-bit block under a 64-bit key, so draws indexed by
/// (stream, index) are reproducible regardless of evaluation order or worker
/// count.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::uint64_t key);

/// Draw domains keep unrelated consumers on disjoint counter ranges.
enum class RngDomain : std::uint32_t {
    gaussian = 1,
    permutation = 2,
    aux = 3,
};

/// 64-bit word for draw `index` of `stream` within `domain`.
std::uint64_t rng_u64(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                      std::uint64_t index);

/// Uniform draw in the open interval (0, 1).
double rng_uniform(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                   std::uint64_t index);

/// Standard normal draw via the inverse CDF.
double rng_normal(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                  std::uint64_t index);

/// Uniform integer in [0, bound). bound must be >= 1.
std::uint64_t rng_below(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                        std::uint64_t index, std::uint64_t bound);

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double normal_icdf(double p);

}  // namespace riskalloc
