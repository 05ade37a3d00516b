#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskalloc/errors.hpp"
#include "riskalloc/rng.hpp"
#include "riskalloc/value_function.hpp"

using namespace riskalloc;

namespace {

std::shared_ptr<ExposurePanel> random_panel(std::size_t n, std::size_t m,
                                            std::uint64_t seed) {
    return std::make_shared<ExposurePanel>(
        sample_gaussian(GaussianSpec::iid_standard(n, seed), m));
}

}  // namespace

TEST_CASE("empty coalition is worth zero and costs nothing") {
    PanelValueFn v(random_panel(3, 50, 1), RiskMeasureSpec::make_var(0.1));
    CHECK(v.value(Coalition::empty()) == 0.0);
    CHECK(v.eval_count() == 0);
}

TEST_CASE("values are memoized: repeats do not recompute") {
    PanelValueFn v(random_panel(4, 50, 2), RiskMeasureSpec::make_es(0.25));
    const auto c = Coalition::of({0, 2});
    const double first = v.value(c);
    CHECK(v.eval_count() == 1);
    CHECK(v.value(c) == first);
    CHECK(v.eval_count() == 1);
    v.value(Coalition::single(1));
    CHECK(v.eval_count() == 2);
}

TEST_CASE("accumulator matches the canonical path on permutation prefixes") {
    auto panel = random_panel(5, 128, 3);
    PanelValueFn v(panel, RiskMeasureSpec::make_var(0.2));
    auto acc = v.accumulator();
    Coalition c;
    // Units added in increasing index order reproduce the canonical
    // aggregation exactly.
    for (std::size_t i : {0, 1, 2, 3, 4}) {
        acc->add_unit(i);
        c = c.with(i);
        CHECK(acc->measure() == v.value(c));
    }
}

TEST_CASE("all_values agrees with the canonical path and feeds the memo") {
    auto panel = random_panel(4, 64, 4);
    PanelValueFn a(panel, RiskMeasureSpec::make_std());
    PanelValueFn b(panel, RiskMeasureSpec::make_std());

    const auto& table = a.all_values(1);
    REQUIRE(table.size() == 16);
    CHECK(table[0] == 0.0);
    for (std::uint64_t mask = 1; mask < 16; ++mask)
        CHECK(table[mask] == b.value(Coalition(mask)));

    // Later lookups hit the table, not the measure.
    const auto evals_after_fill = a.eval_count();
    a.value(Coalition::of({1, 2}));
    a.grand_value();
    CHECK(a.eval_count() == evals_after_fill);
}

TEST_CASE("fill is identical for any thread count") {
    auto panel = random_panel(6, 200, 5);
    PanelValueFn a(panel, RiskMeasureSpec::make_var(0.1));
    PanelValueFn b(panel, RiskMeasureSpec::make_var(0.1));
    const auto& ta = a.all_values(1);
    const auto& tb = b.all_values(8);
    CHECK(ta == tb);
}

TEST_CASE("var+svar values add the two strips per coalition") {
    auto base = random_panel(3, 100, 6);
    auto stressed = std::make_shared<ExposurePanel>(
        sample_gaussian(GaussianSpec::iid_standard(3, 7), 60));
    // Same unit ids by construction (u1..u3).
    PanelValueFn v(base, RiskMeasureSpec::make_var_svar(0.1, stressed));
    PanelValueFn v_base(base, RiskMeasureSpec::make_var(0.1));
    PanelValueFn v_str(stressed, RiskMeasureSpec::make_var(0.1));
    for (std::uint64_t mask = 1; mask < 8; ++mask)
        CHECK(v.value(Coalition(mask)) ==
              doctest::Approx(v_base.value(Coalition(mask)) +
                              v_str.value(Coalition(mask)))
                  .epsilon(1e-15));
}

TEST_CASE("sba value function nets before measuring") {
    SbaParams p;
    p.bucket_count = 2;
    p.other_bucket = 1;
    p.risk_weights = {2.0, 1.0};
    p.factors_per_bucket = {1, 1};
    p.intra_corr = {{1.0}, {1.0}};
    p.cross_corr = {1.0, 0.0, 0.0, 1.0};
    auto params = std::make_shared<SbaParams>(p);

    std::vector<std::map<std::size_t, std::vector<double>>> units(2);
    units[0][0] = {1.0};
    units[1][0] = {-1.0};
    auto sens = std::make_shared<SensitivitySet>(
        SensitivitySet({"a", "b"}, units));

    SbaValueFn v(sens, params);
    CHECK(v.value(Coalition::single(0)) == doctest::Approx(2.0));
    CHECK(v.value(Coalition::single(1)) == doctest::Approx(2.0));
    // Netted: 1 - 1 = 0.
    CHECK(v.grand_value() == doctest::Approx(0.0));

    const auto& table = v.all_values(1);
    CHECK(table[0b01] == doctest::Approx(2.0));
    CHECK(table[0b11] == doctest::Approx(0.0));

    auto acc = v.accumulator();
    acc->add_unit(0);
    CHECK(acc->measure() == doctest::Approx(2.0));
    acc->add_unit(1);
    CHECK(acc->measure() == doctest::Approx(0.0));
}

TEST_CASE("coalition strategies refuse more than 64 units") {
    std::vector<std::string> ids(65);
    std::vector<double> values(65, 0.0);
    for (std::size_t i = 0; i < 65; ++i) ids[i] = "u" + std::to_string(i);
    auto panel = std::make_shared<ExposurePanel>(
        ExposurePanel(std::move(ids), std::move(values), 1));
    CHECK_THROWS_AS(PanelValueFn(panel, RiskMeasureSpec::make_std()), Error);
}
