#include "riskalloc/euler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "riskalloc/errors.hpp"

namespace riskalloc {

namespace {

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample covariance with divisor m-1 given precomputed means.
double cov_of(std::span<const double> x, double mx, std::span<const double> y,
              double my) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - mx) * (y[j] - my);
    return s / static_cast<double>(x.size() - 1);
}

EulerDiagnostics diag_for(const AllocationResult& r, std::string method,
                          bool fell_back = false) {
    return EulerDiagnostics{r.full_allocation_gap(), std::move(method), fell_back};
}

}  // namespace

AllocationResult euler_std(const ExposurePanel& panel, RunStats* stats) {
    const std::size_t n = panel.units();
    const std::size_t m = panel.scenarios();
    require(m >= 2, ErrorCode::insufficient_data, "euler_std needs m >= 2");

    const std::vector<double> total = panel.total_row();
    const double mu_t = mean_of(total);
    const double var_t = cov_of(total, mu_t, total, mu_t);
    require(var_t > 0.0, ErrorCode::degenerate, "total P&L has zero variance");
    const double sd_t = std::sqrt(var_t);

    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        k[i] = cov_of(r, mean_of(r), total, mu_t) / sd_t;
    }
    if (stats) stats->charged_evals += n;
    auto result = make_result(Strategy::euler_std, std::move(k), std_dev(total), true);
    result.diagnostics = diag_for(result, "euler-std");
    return result;
}

AllocationResult euler_es(const ExposurePanel& panel, double alpha, RunStats* stats) {
    const std::size_t n = panel.units();
    const std::size_t m = panel.scenarios();
    const std::vector<double> total = panel.total_row();
    const std::size_t k_tail = tail_count(alpha, m);
    const auto tail = worst_scenario_indices(total, k_tail);

    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        double s = 0.0;
        for (std::size_t j : tail) s += r[j];
        k[i] = -s / static_cast<double>(k_tail);
    }
    if (stats) stats->charged_evals += n;
    auto result =
        make_result(Strategy::euler_es, std::move(k), expected_shortfall(total, alpha), true);
    result.diagnostics = diag_for(result, "euler-es");
    return result;
}

AllocationResult euler_var_first(const ExposurePanel& panel, double alpha,
                                 RunStats* stats) {
    const std::size_t n = panel.units();
    require(panel.scenarios() >= 2, ErrorCode::insufficient_data,
            "euler_var_first needs m >= 2");
    const std::vector<double> total = panel.total_row();
    const double mu_t = mean_of(total);
    const double var_t = cov_of(total, mu_t, total, mu_t);
    require(var_t > 0.0, ErrorCode::degenerate, "total P&L has zero variance");
    const double var_pos = value_at_risk(total, alpha);

    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        const double mu_i = mean_of(r);
        const double beta = cov_of(r, mu_i, total, mu_t) / var_t;
        k[i] = mu_i + beta * (var_pos - mu_t);
    }
    if (stats) stats->charged_evals += n;
    auto result = make_result(Strategy::euler_var_first, std::move(k), var_pos, false);
    result.diagnostics = diag_for(result, "euler-var1");
    return result;
}

AllocationResult euler_var_second(const ExposurePanel& panel, double alpha,
                                  RunStats* stats) {
    const std::size_t n = panel.units();
    const std::size_t m = panel.scenarios();
    require(m >= 2, ErrorCode::insufficient_data, "euler_var_second needs m >= 2");
    const std::vector<double> total = panel.total_row();
    std::vector<double> total_sq(m);
    for (std::size_t j = 0; j < m; ++j) total_sq[j] = total[j] * total[j];

    const double mu_t = mean_of(total);
    const double mu_t2 = mean_of(total_sq);
    const double var_t = cov_of(total, mu_t, total, mu_t);
    const double var_t2 = cov_of(total_sq, mu_t2, total_sq, mu_t2);
    const double cov_t_t2 = cov_of(total, mu_t, total_sq, mu_t2);
    require(var_t > 0.0, ErrorCode::degenerate, "total P&L has zero variance");

    const double det = var_t * var_t2 - cov_t_t2 * cov_t_t2;
    if (!(det > 1e-12 * var_t * var_t2)) {
        auto result = euler_var_first(panel, alpha, stats);
        result.strategy = Strategy::euler_var_second;
        result.diagnostics = diag_for(result, "euler-var2(first-order-fallback)", true);
        return result;
    }

    const double var_pos = value_at_risk(total, alpha);
    const double var2_pos = value_at_risk(total_sq, alpha);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        const double mu_i = mean_of(r);
        const double c1 = cov_of(r, mu_i, total, mu_t);
        const double c2 = cov_of(r, mu_i, total_sq, mu_t2);
        const double a_i = (var_t2 * c1 - cov_t_t2 * c2) / det;
        const double b_i = (var_t * c2 - cov_t_t2 * c1) / det;
        k[i] = mu_i + a_i * (var_pos - mu_t) + b_i * (var2_pos - mu_t2);
    }
    if (stats) stats->charged_evals += n;
    auto result = make_result(Strategy::euler_var_second, std::move(k), var_pos, false);
    result.diagnostics = diag_for(result, "euler-var2");
    return result;
}

AllocationResult euler_var_kernel(const ExposurePanel& panel, double alpha,
                                  RunStats* stats) {
    const std::size_t n = panel.units();
    const std::size_t m = panel.scenarios();
    require(m >= 30, ErrorCode::insufficient_data,
            "euler_var_kernel needs m >= 30 for the bandwidth rule");
    const std::vector<double> total = panel.total_row();
    const double var_pos = value_at_risk(total, alpha);
    const double q = -var_pos;  // empirical left-tail quantile of the total row

    std::vector<double> sorted(total);
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[tail_count(0.25, m) - 1];
    const double q3 = sorted[tail_count(0.75, m) - 1];
    const double iqr = q3 - q1;
    const double sigma = std_dev(total);
    const double spread = std::min(sigma, iqr / 1.34);
    require(spread > 0.0, ErrorCode::degenerate,
            "kernel bandwidth degenerate: zero spread");
    const double bandwidth =
        0.9 * spread * std::pow(static_cast<double>(m), -0.2);

    std::vector<double> w(m);
    double w_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double u = (q - total[j]) / bandwidth;
        w[j] = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
        w_sum += w[j];
    }
    require(w_sum > 0.0, ErrorCode::degenerate,
            "kernel weights underflowed to zero at the evaluation point");

    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += r[j] * w[j];
        k[i] = -s / w_sum;
    }
    if (stats) stats->charged_evals += n;
    auto result = make_result(Strategy::euler_var_kernel, std::move(k), var_pos, false);
    result.diagnostics = diag_for(result, "euler-var-kernel");
    return result;
}

std::vector<double> euler_fd_oracle(const ExposurePanel& panel,
                                    const RiskMeasureSpec& measure, double step) {
    require(step > 0.0 && step <= 0.1, ErrorCode::invalid_argument,
            "oracle step must lie in (0, 0.1]");
    require(measure.kind == MeasureKind::std_dev || measure.kind == MeasureKind::es,
            ErrorCode::invalid_argument,
            "finite-difference oracle covers the homogeneous measures (std, es)");

    auto rho = [&](std::span<const double> x) {
        return measure.kind == MeasureKind::std_dev
                   ? std_dev(x)
                   : expected_shortfall(x, measure.alpha);
    };

    const std::size_t n = panel.units();
    const std::size_t m = panel.scenarios();
    const std::vector<double> total = panel.total_row();
    std::vector<double> bumped(m);
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        for (std::size_t j = 0; j < m; ++j) bumped[j] = total[j] + step * r[j];
        const double up = rho(bumped);
        for (std::size_t j = 0; j < m; ++j) bumped[j] = total[j] - step * r[j];
        const double down = rho(bumped);
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

}  // namespace riskalloc
