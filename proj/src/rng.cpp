#include "riskalloc/rng.hpp"

#include <cmath>
#include <limits>

#include "riskalloc/errors.hpp"

namespace riskalloc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                               std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::uint64_t key) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int r = 0; r < 9; ++r) {
        counter = round_once(counter, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return round_once(counter, k0, k1);
}

std::uint64_t rng_u64(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                      std::uint64_t index) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>((stream >> 32) & 0x00FFFFFFu) |
            (static_cast<std::uint32_t>(domain) << 24),
    };
    const auto block = philox4x32(ctr, seed);
    return (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
}

double rng_uniform(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                   std::uint64_t index) {
    const std::uint64_t x = rng_u64(seed, domain, stream, index);
    // 53-bit mantissa, centered so the result is strictly inside (0, 1).
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double rng_normal(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                  std::uint64_t index) {
    return normal_icdf(rng_uniform(seed, domain, stream, index));
}

std::uint64_t rng_below(std::uint64_t seed, RngDomain domain, std::uint64_t stream,
                        std::uint64_t index, std::uint64_t bound) {
    require(bound >= 1, ErrorCode::invalid_argument, "rng_below: bound must be >= 1");
    const std::uint64_t x = rng_u64(seed, domain, stream, index);
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * bound) >> 64);
}

double normal_icdf(double p) {
    require(p > 0.0 && p < 1.0, ErrorCode::invalid_argument,
            "normal_icdf: p must lie in (0, 1)");

    static constexpr double a[8] = {
        3.3871328727963666080e+0, 1.3314166789178437745e+2,
        1.9715909503065514427e+3, 1.3731693765509461125e+4,
        4.5921953931549871457e+4, 6.7265770927008700853e+4,
        3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[8] = {
        1.0,                      4.2313330701600911252e+1,
        6.8718700749205790830e+2, 5.3941960214247511077e+3,
        2.1213794301586595867e+4, 3.9307895800092710610e+4,
        2.8729085735721942674e+4, 5.2264952788528545610e+3};
    static constexpr double c[8] = {
        1.42343711074968357734e+0, 4.63033784615654529590e+0,
        5.76949722146069140550e+0, 3.64784832476320460504e+0,
        1.27045825245236838258e+0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[8] = {
        1.0,                       2.05319162663775882187e+0,
        1.67638483018380384940e+0, 6.89767334985100004550e-1,
        1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double e[8] = {
        6.65790464350110377720e+0, 5.46378491116411436990e+0,
        1.78482653991729133580e+0, 2.96560571828504891230e-1,
        2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[8] = {
        1.0,                       5.99832206555887937690e-1,
        1.36929880922735805310e-1, 1.48753612908506148525e-2,
        7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    auto horner = [](const double (&coef)[8], double x) {
        double acc = coef[7];
        for (int i = 6; i >= 0; --i) acc = acc * x + coef[i];
        return acc;
    };

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        x = horner(e, r) / horner(f, r);
    }
    return (q < 0.0) ? -x : x;
}

}  // namespace riskalloc
