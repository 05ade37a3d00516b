#include "riskalloc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskalloc/errors.hpp"
#include "riskalloc/exposures.hpp"
#include "riskalloc/sba.hpp"

namespace riskalloc {

std::size_t tail_count(double alpha, std::size_t m) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_argument,
            "alpha must lie in (0, 1)");
    require(m >= 1, ErrorCode::insufficient_data, "empty scenario vector");
    const double t = alpha * static_cast<double>(m);
    auto k = static_cast<std::size_t>(std::floor(t + 1e-9));
    if (static_cast<double>(k) < t - 1e-9) ++k;
    if (k < 1) k = 1;
    if (k > m) k = m;
    return k;
}

double std_dev(std::span<const double> x) {
    require(x.size() >= 2, ErrorCode::insufficient_data,
            "std_dev needs at least two scenarios");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

namespace {

/// Values of the k smallest entries, ascending.
std::vector<double> k_smallest(std::span<const double> x, std::size_t k) {
    std::vector<double> scratch(x.begin(), x.end());
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    scratch.resize(k);
    std::sort(scratch.begin(), scratch.end());
    return scratch;
}

}  // namespace

double value_at_risk(std::span<const double> x, double alpha) {
    require(!x.empty(), ErrorCode::insufficient_data, "var on empty vector");
    const std::size_t k = tail_count(alpha, x.size());
    std::vector<double> scratch(x.begin(), x.end());
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    return -scratch[k - 1];
}

double expected_shortfall(std::span<const double> x, double alpha) {
    require(!x.empty(), ErrorCode::insufficient_data, "es on empty vector");
    const std::size_t k = tail_count(alpha, x.size());
    const auto tail = k_smallest(x, k);
    double sum = 0.0;
    for (double v : tail) sum += v;
    return -sum / static_cast<double>(k);
}

double var_plus_svar(std::span<const double> x, std::span<const double> x_stressed,
                     double alpha) {
    return value_at_risk(x, alpha) + value_at_risk(x_stressed, alpha);
}

std::vector<std::size_t> worst_scenario_indices(std::span<const double> x,
                                                std::size_t k) {
    require(k >= 1 && k <= x.size(), ErrorCode::invalid_argument,
            "tail size out of range");
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), less);
    idx.resize(k);
    std::sort(idx.begin(), idx.end(), less);
    return idx;
}

RiskMeasureSpec RiskMeasureSpec::make_std() { return {MeasureKind::std_dev, 0.0, {}, {}}; }

RiskMeasureSpec RiskMeasureSpec::make_var(double alpha) {
    return {MeasureKind::var, alpha, {}, {}};
}

RiskMeasureSpec RiskMeasureSpec::make_es(double alpha) {
    return {MeasureKind::es, alpha, {}, {}};
}

RiskMeasureSpec RiskMeasureSpec::make_var_svar(
    double alpha, std::shared_ptr<const ExposurePanel> stressed) {
    return {MeasureKind::var_plus_svar, alpha, std::move(stressed), {}};
}

RiskMeasureSpec RiskMeasureSpec::make_sba(std::shared_ptr<const SbaParams> params) {
    return {MeasureKind::sba_delta_eq, 0.0, {}, std::move(params)};
}

void RiskMeasureSpec::validate(const ExposurePanel* base) const {
    if (kind == MeasureKind::var || kind == MeasureKind::es ||
        kind == MeasureKind::var_plus_svar) {
        require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_argument,
                "alpha must lie in (0, 1)");
    }
    if (kind == MeasureKind::var_plus_svar) {
        require(stressed != nullptr, ErrorCode::invalid_argument,
                "VaR+sVaR needs a stressed panel");
        if (base) {
            require(stressed->units() == base->units(), ErrorCode::invalid_argument,
                    "stressed panel must cover the same units");
            require(stressed->unit_ids() == base->unit_ids(), ErrorCode::invalid_argument,
                    "stressed panel unit ids must match the base panel");
        }
    }
    if (kind == MeasureKind::sba_delta_eq)
        require(sba != nullptr, ErrorCode::invalid_argument,
                "SBA measure needs parameters");
}

std::string measure_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::std_dev: return "std";
        case MeasureKind::var: return "var";
        case MeasureKind::es: return "es";
        case MeasureKind::var_plus_svar: return "var+svar";
        case MeasureKind::sba_delta_eq: return "sba";
    }
    return "?";
}

}  // namespace riskalloc
