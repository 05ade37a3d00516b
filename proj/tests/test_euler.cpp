#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "riskalloc/errors.hpp"
#include "riskalloc/euler.hpp"
#include "riskalloc/measures.hpp"
#include "riskalloc/rng.hpp"

using namespace riskalloc;

namespace {

ExposurePanel gaussian_panel(std::size_t n, std::size_t m, std::uint64_t seed) {
    return sample_gaussian(GaussianSpec::iid_standard(n, seed), m);
}

/// Rows proportional to one base row: row i = c[i] * base.
ExposurePanel proportional_panel(const std::vector<double>& c,
                                 const std::vector<double>& base) {
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t i = 0; i < c.size(); ++i) {
        ids.push_back("u" + std::to_string(i + 1));
        for (double b : base) values.push_back(c[i] * b);
    }
    return ExposurePanel(std::move(ids), std::move(values), base.size());
}

double sum_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

}  // namespace

TEST_CASE("euler_std: single unit reduces to its own std") {
    const auto panel = ExposurePanel({"a"}, {1.0, 3.0, -2.0, 0.0}, 4);
    const auto r = euler_std(panel);
    CHECK(r.allocations[0] == doctest::Approx(std_dev(panel.row(0))).epsilon(1e-15));
}

TEST_CASE("euler_std fully allocates by bilinearity") {
    const auto panel = gaussian_panel(3, 500, 11);
    const auto r = euler_std(panel);
    const auto total = panel.total_row();
    CHECK(sum_of(r.allocations) ==
          doctest::Approx(std_dev(total)).epsilon(1e-12));
    CHECK(r.fair);
}

TEST_CASE("euler_std matches the finite-difference gradient") {
    const auto panel = gaussian_panel(4, 2000, 12);
    const auto r = euler_std(panel);
    const auto grad = euler_fd_oracle(panel, RiskMeasureSpec::make_std(), 1e-4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(grad[i] == doctest::Approx(r.allocations[i]).epsilon(1e-5));
    // Homogeneous of degree one: the gradient sums back to the measure.
    CHECK(sum_of(grad) ==
          doctest::Approx(std_dev(panel.total_row())).epsilon(1e-5));
}

TEST_CASE("euler_es shares the tail with expected_shortfall") {
    const auto panel = gaussian_panel(5, 1000, 13);
    const double alpha = 0.05;
    const auto r = euler_es(panel, alpha);
    CHECK(sum_of(r.allocations) ==
          doctest::Approx(expected_shortfall(panel.total_row(), alpha))
              .epsilon(1e-12));
    CHECK(r.total ==
          doctest::Approx(expected_shortfall(panel.total_row(), alpha))
              .epsilon(1e-15));
}

TEST_CASE("euler_es: an all-zero row gets zero") {
    ExposurePanel panel({"a", "z"}, {1.0, -3.0, 2.0, -1.0, 0.0, 0.0, 0.0, 0.0}, 4);
    const auto r = euler_es(panel, 0.5);
    CHECK(r.allocations[1] == 0.0);
}

TEST_CASE("euler_es matches the fd oracle when the tail set is stable") {
    const auto panel = gaussian_panel(4, 800, 14);
    const double alpha = 0.1;
    const double h = 1e-4;
    const auto r = euler_es(panel, alpha);
    const auto grad =
        euler_fd_oracle(panel, RiskMeasureSpec::make_es(alpha), h);

    const auto total = panel.total_row();
    const std::size_t k = tail_count(alpha, total.size());
    const auto tail = worst_scenario_indices(total, k);
    std::vector<double> bumped(total.size());
    for (std::size_t i = 0; i < 4; ++i) {
        // Only assert where the +-h bumps leave the tail membership alone.
        bool stable = true;
        for (double sign : {+1.0, -1.0}) {
            for (std::size_t j = 0; j < total.size(); ++j)
                bumped[j] = total[j] + sign * h * panel.row(i)[j];
            if (worst_scenario_indices(bumped, k) != tail) stable = false;
        }
        if (stable)
            CHECK(grad[i] == doctest::Approx(r.allocations[i]).epsilon(1e-6));
    }
}

TEST_CASE("fd oracle guards its domain") {
    const auto panel = gaussian_panel(2, 100, 15);
    CHECK_THROWS_AS(euler_fd_oracle(panel, RiskMeasureSpec::make_std(), 0.0), Error);
    CHECK_THROWS_AS(euler_fd_oracle(panel, RiskMeasureSpec::make_std(), 0.5), Error);
    CHECK_THROWS_AS(euler_fd_oracle(panel, RiskMeasureSpec::make_var(0.1), 1e-4),
                    Error);
}

TEST_CASE("euler_var_first is exact on proportional panels") {
    const std::vector<double> base{-3.0, 1.0, 0.5, -1.0, 2.0, 4.0, -2.5, 0.1};
    const std::vector<double> c{0.5, 0.3, 0.2};
    const auto panel = proportional_panel(c, base);
    const double alpha = 0.25;
    const auto r = euler_var_first(panel, alpha);
    const double var_total = value_at_risk(panel.total_row(), alpha);
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(r.allocations[i] == doctest::Approx(c[i] * var_total).epsilon(1e-12));
    REQUIRE(r.diagnostics.has_value());
    CHECK(std::abs(r.diagnostics->full_allocation_gap) <= 1e-12 * var_total);
    CHECK_FALSE(r.fair);
}

TEST_CASE("euler_var_first gap vanishes algebraically") {
    // Non-zero means: consistency of the mean terms makes the gap pure
    // rounding noise.
    auto spec = GaussianSpec::iid_standard(6, 16);
    spec.mean = {0.5, -1.0, 0.2, 0.0, 1.5, -0.3};
    const auto panel = sample_gaussian(spec, 5000);
    const auto r = euler_var_first(panel, 0.03);
    CHECK(std::abs(r.full_allocation_gap()) <= 1e-11 * std::abs(r.total));
}

TEST_CASE("euler_var_second matches a direct spreadsheet-style evaluation") {
    // 2 units, 4 scenarios, worked by explicit means/covariances below.
    ExposurePanel panel({"a", "b"},
                        {1.0, -2.0, 3.0, -4.0,
                         -2.0, 1.0, 0.0, 5.0},
                        4);
    const double alpha = 0.5;
    const auto r = euler_var_second(panel, alpha);

    // Direct evaluation with divisor m-1 covariances.
    const std::vector<double> t{-1.0, -1.0, 3.0, 1.0};
    std::vector<double> t2(4);
    for (std::size_t j = 0; j < 4; ++j) t2[j] = t[j] * t[j];
    auto mean = [](const std::vector<double>& x) {
        return (x[0] + x[1] + x[2] + x[3]) / 4.0;
    };
    auto cov = [&](const std::vector<double>& x, const std::vector<double>& y) {
        const double mx = mean(x), my = mean(y);
        double s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += (x[j] - mx) * (y[j] - my);
        return s / 3.0;
    };
    const double var_t = cov(t, t), var_t2 = cov(t2, t2), c12 = cov(t, t2);
    const double det = var_t * var_t2 - c12 * c12;
    const double var_pos = value_at_risk(t, alpha);    // k=2: -(-1) = 1
    const double var2_pos = value_at_risk(t2, alpha);  // k=2 on squares: -1
    CHECK(var_pos == 1.0);
    CHECK(var2_pos == -1.0);

    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<double> row(panel.row(i).begin(), panel.row(i).end());
        const double mu_i = mean(row);
        const double c1 = cov(row, t), c2 = cov(row, t2);
        const double a_i = (var_t2 * c1 - c12 * c2) / det;
        const double b_i = (var_t * c2 - c12 * c1) / det;
        const double expected = mu_i + a_i * (var_pos - mean(t)) +
                                b_i * (var2_pos - mean(t2));
        CHECK(r.allocations[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(std::abs(r.full_allocation_gap()) <= 1e-12 * std::max(1.0, var_pos));
}

TEST_CASE("euler_var_second reduces to first-order form when cov(X, X^2) = 0") {
    // Total row symmetric around zero: (-a, -b, b, a) has exactly zero
    // sample covariance with its squares.
    const double a = 4.0, b = 1.0;
    ExposurePanel panel({"u1", "u2"},
                        {-a, 0.0, b, 0.0,
                         0.0, -b, 0.0, a},
                        4);
    const double alpha = 0.5;
    const auto r = euler_var_second(panel, alpha);

    const auto t = panel.total_row();
    std::vector<double> t2(4);
    for (std::size_t j = 0; j < 4; ++j) t2[j] = t[j] * t[j];
    auto mean = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return s / static_cast<double>(x.size());
    };
    auto cov = [&](std::span<const double> x, std::span<const double> y) {
        const double mx = mean(x), my = mean(y);
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - mx) * (y[j] - my);
        return s / static_cast<double>(x.size() - 1);
    };
    REQUIRE(cov(t, t2) == 0.0);

    const double var_pos = value_at_risk(t, alpha);
    const double var2_pos = value_at_risk(t2, alpha);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto row = panel.row(i);
        // Block-diagonal Gram: a_i and b_i decouple into the two regressions.
        const double expected = mean(row) +
                                cov(row, t) / cov(t, t) * (var_pos - mean(t)) +
                                cov(row, t2) / cov(t2, t2) * (var2_pos - mean(t2));
        CHECK(r.allocations[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("euler_var_second falls back to first order on singular Gram") {
    // Two-valued total makes X^2 affine in X on the sample: Gram singular.
    ExposurePanel panel({"a", "b"}, {1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0}, 4);
    const auto r = euler_var_second(panel, 0.5);
    REQUIRE(r.diagnostics.has_value());
    CHECK(r.diagnostics->fell_back_to_first_order);
    const auto first = euler_var_first(panel, 0.5);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(r.allocations[i] == first.allocations[i]);
}

TEST_CASE("euler_var_kernel on a proportional panel approaches c * VaR") {
    const std::size_t m = 100000;
    GaussianSpec spec;
    spec.mean = {0.0};
    spec.covariance = {1.0};
    spec.seed = 99;
    const auto base_panel = sample_gaussian(spec, m);
    const std::vector<double> base(base_panel.row(0).begin(),
                                   base_panel.row(0).end());
    const std::vector<double> c{0.7, 0.3};
    const auto panel = proportional_panel(c, base);
    const double alpha = 0.01;
    const auto r = euler_var_kernel(panel, alpha);
    const double var_total = value_at_risk(panel.total_row(), alpha);
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(r.allocations[i] ==
              doctest::Approx(c[i] * var_total).epsilon(0.02));
}

TEST_CASE("euler_var_kernel: duplicate rows get identical allocations") {
    const auto g = gaussian_panel(3, 5000, 21);
    std::vector<double> values(g.row(0).begin(), g.row(0).end());
    values.insert(values.end(), g.row(1).begin(), g.row(1).end());
    values.insert(values.end(), g.row(1).begin(), g.row(1).end());
    ExposurePanel panel({"x", "y1", "y2"}, std::move(values), 5000);
    const auto r = euler_var_kernel(panel, 0.05);
    CHECK(r.allocations[1] == r.allocations[2]);
}

TEST_CASE("euler_var_kernel: a zero row allocates zero") {
    const auto g = gaussian_panel(2, 2000, 22);
    std::vector<double> values(g.values());
    values.insert(values.end(), 2000, 0.0);
    ExposurePanel panel({"u1", "u2", "zero"}, std::move(values), 2000);
    const auto r = euler_var_kernel(panel, 0.1);
    CHECK(r.allocations[2] == 0.0);
}

TEST_CASE("euler_var_kernel needs at least 30 scenarios") {
    const auto panel = gaussian_panel(2, 29, 23);
    CHECK_THROWS_AS(euler_var_kernel(panel, 0.1), Error);
}

TEST_CASE("scale equivariance: lambda scales every euler allocation") {
    const auto panel = gaussian_panel(3, 3000, 24);
    const double lambda = 2.5;
    std::vector<double> scaled_values(panel.values());
    for (double& v : scaled_values) v *= lambda;
    ExposurePanel scaled(panel.unit_ids(), std::move(scaled_values),
                         panel.scenarios());
    const double alpha = 0.05;

    auto check_pair = [&](const AllocationResult& a, const AllocationResult& b) {
        for (std::size_t i = 0; i < a.allocations.size(); ++i)
            CHECK(b.allocations[i] ==
                  doctest::Approx(lambda * a.allocations[i]).epsilon(1e-12));
    };
    check_pair(euler_std(panel), euler_std(scaled));
    check_pair(euler_es(panel, alpha), euler_es(scaled, alpha));
    check_pair(euler_var_first(panel, alpha), euler_var_first(scaled, alpha));
    check_pair(euler_var_second(panel, alpha), euler_var_second(scaled, alpha));
    check_pair(euler_var_kernel(panel, alpha), euler_var_kernel(scaled, alpha));
}

TEST_CASE("degenerate panels are rejected") {
    ExposurePanel constant({"a"}, {1.0, 1.0, 1.0}, 3);
    CHECK_THROWS_AS(euler_std(constant), Error);
    CHECK_THROWS_AS(euler_var_first(constant, 0.5), Error);
}
