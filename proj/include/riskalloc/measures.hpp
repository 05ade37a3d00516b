#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace riskalloc {

class ExposurePanel;
struct SbaParams;

/// k = ceil(alpha * m), snapped so that alpha*m values within 1e-9 of an
/// integer count as that integer (0.01 * 1e6 must give exactly 10000).
std::size_t tail_count(double alpha, std::size_t m);

/// Sample standard deviation with divisor m-1. Requires m >= 2.
double std_dev(std::span<const double> x);

/// Historical VaR at tail probability alpha: -x_(k) with k = ceil(alpha*m),
/// sign-flipped so loss-making tails come out positive.
double value_at_risk(std::span<const double> x, double alpha);

/// Mean of the k worst scenarios, sign-flipped: -(1/k) * sum of the k
/// smallest values.
double expected_shortfall(std::span<const double> x, double alpha);

/// var(x, alpha) + var(x_stressed, alpha); the strips may differ in length.
double var_plus_svar(std::span<const double> x, std::span<const double> x_stressed,
                     double alpha);

/// Indices of the k smallest entries, ordered by (value, index) — the
/// stable-sort tie-break.
std::vector<std::size_t> worst_scenario_indices(std::span<const double> x,
                                                std::size_t k);

enum class MeasureKind {
    std_dev,
    var,
    es,
    var_plus_svar,
    sba_delta_eq,
};

/// Tagged choice of scalar risk measure. `alpha` applies to the tail
/// measures; `stressed` to the VaR+sVaR composite; `sba` to the
/// sensitivity-based measure.
struct RiskMeasureSpec {
    MeasureKind kind = MeasureKind::std_dev;
    double alpha = 0.01;
    std::shared_ptr<const ExposurePanel> stressed;
    std::shared_ptr<const SbaParams> sba;

    static RiskMeasureSpec make_std();
    static RiskMeasureSpec make_var(double alpha);
    static RiskMeasureSpec make_es(double alpha);
    static RiskMeasureSpec make_var_svar(double alpha,
                                         std::shared_ptr<const ExposurePanel> stressed);
    static RiskMeasureSpec make_sba(std::shared_ptr<const SbaParams> params);

    void validate(const ExposurePanel* base) const;
};

std::string measure_name(MeasureKind kind);

}  // namespace riskalloc
