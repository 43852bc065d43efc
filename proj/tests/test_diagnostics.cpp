#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ordertail/config.hpp"
#include "ordertail/diagnostics.hpp"
#include "ordertail/errors.hpp"

using namespace ordertail;

namespace {

JointRiskModel iid(const Marginal& m, std::size_t n) { return JointRiskModel(IndependentSpec{std::vector<Marginal>(n, m)}); }

JointRiskModel fgm2(double theta) {
    return JointRiskModel(FgmSpec{{Marginal::pareto(2.0, 1.0), Marginal::pareto(2.0, 1.0)}, {{0b11, theta}}});
}

JointRiskModel fgm3() {
    return JointRiskModel(FgmSpec{std::vector<Marginal>(3, Marginal::pareto(2.0, 1.0)),
                                  {{0b011, 0.5}, {0b101, 0.5}, {0b110, 0.5}, {0b111, 0.5}}});
}

// P(max(X1, X2) > x) for the bivariate FGM Pareto(2, 1) model.
double fgm2_max_tail(double theta, double x) {
    const double s = 1.0 / (x * x), f = 1.0 - s;
    return 1.0 - f * f * (1.0 + theta * s * s);
}

double fgm2_joint(double theta, double a, double b) {
    const double sa = 1.0 / (a * a), sb = 1.0 / (b * b);
    return sa * sb * (1.0 + theta * (1.0 - sa) * (1.0 - sb));
}

const ScalingFunction kP75 = ScalingFunction::power(1.0, 0.75);
const SimulationPlan kPlan = SimulationPlan::make(1'000'000, 3);

}  // namespace

TEST(Classify, Verdicts) {
    DiagnosticCurve c;
    c.x = {1, 2, 3, 4};
    c.value = c.ci_hi = c.ci_lo = {0.1, 0.05, 0.01, 0.005};
    c.rare_event.assign(4, false);
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::converging_to_zero);
    c.value = c.ci_hi = c.ci_lo = {0.5, 0.5, 0.5, 0.5};
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::converging_to_positive);
    c.value = c.ci_hi = c.ci_lo = {0.5, 1.0, 2.0, 4.0};
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::diverging);
    c.value = c.ci_lo = {0.0, 0.0, 0.0, 0.0};
    c.ci_hi = {0.01, 0.01, 0.01, 0.01};
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::converging_to_zero);
    c.value = c.ci_hi = c.ci_lo = {0.1, 0.05, 0.06, 0.005};
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::inconclusive);
    c.value = c.ci_lo = {0.1, 0.05, 0.03, 0.01};
    c.ci_hi = {0.2, 0.1, 0.06, 0.03};
    classify(c);
    EXPECT_EQ(c.verdict, Verdict::inconclusive);
    EXPECT_EQ(to_string(Verdict::converging_to_zero), "converging-to-zero");
}

TEST(Ds1, ExponentialNonVanishing) {
    const auto curves = check_ds1(iid(Marginal::exponential(1.0), 2), ScalingFunction::constant(1.0), 1.0,
                                  {4.0, 6.0, 8.0, 10.0}, kPlan);
    ASSERT_EQ(curves.size(), 2u);
    for (const auto& c : curves) {
        EXPECT_TRUE(c.deterministic);
        EXPECT_NEAR(c.value.back(), std::exp(-1.0) / (2.0 - std::exp(-10.0)), 1e-12);
        EXPECT_NEAR(c.value.back(), 0.18394, 1e-5);
        EXPECT_NE(c.verdict, Verdict::converging_to_zero);
    }
    EXPECT_EQ(curves[0].label, "ds1 i=1 j=2 t=1");
}

TEST(Ds1, FgmPairValuesAndVerdict) {
    const std::vector<double> grid{10.0, 30.0, 100.0, 300.0, 1000.0};
    const auto curves = check_ds1(fgm2(0.5), kP75, 1.0, grid, kPlan);
    for (const auto& c : curves) {
        ASSERT_TRUE(c.deterministic);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double x = grid[k];
            EXPECT_NEAR(c.value[k] / (fgm2_joint(0.5, std::pow(x, 0.75), x) / fgm2_max_tail(0.5, x)), 1.0, 1e-10);
        }
        EXPECT_EQ(c.verdict, Verdict::converging_to_zero);
    }
}

TEST(Ds1, GaussLognormalConverges) {
    Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(2, 2);
    rho(0, 1) = rho(1, 0) = 0.5;
    const JointRiskModel m(
        GaussLognormalSpec{{0, 0}, {1, 1}, rho, std::vector<WSpec>(2, BoundedLaw::point(1.0)), WCoupling::independent});
    bool det = false;
    const auto lt = max_log_tail(m, &det);
    EXPECT_TRUE(det);
    const auto grid = level_grid(lt, {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}, 1.0);
    for (const auto& c : check_ds1(m, ScalingFunction::lognormal_type(1.0, 0.0), 1.0, grid, kPlan)) {
        EXPECT_EQ(c.verdict, Verdict::converging_to_zero) << c.label;
        for (std::size_t k = 1; k < c.value.size(); ++k) EXPECT_LT(c.value[k], c.value[k - 1]);
    }
}

TEST(Ds1, DeterministicAgreesWithMonteCarlo) {
    DiagnosticOptions mc;
    mc.force_mc = true;
    const std::vector<double> grid{3.0, 10.0, 30.0};
    for (const auto& m : {fgm2(0.5), iid(Marginal::exponential(1.0), 2)}) {
        const ScalingFunction h = ScalingFunction::power(1.0, 0.75);
        const auto det = check_ds1(m, h, 1.0, grid, kPlan);
        const auto sim = check_ds1(m, h, 1.0, grid, SimulationPlan::make(4'000'000, 5), mc);
        for (std::size_t p = 0; p < det.size(); ++p) {
            EXPECT_FALSE(sim[p].deterministic);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double se = (sim[p].ci_hi[k] - sim[p].ci_lo[k]) / (2 * 1.959963984540054);
                EXPECT_NEAR(sim[p].value[k], det[p].value[k], 3.0 * se + 1e-12) << det[p].label << " x=" << grid[k];
            }
        }
    }
}

TEST(Ds2, FgmValueAtHundred) {
    const auto r = check_ds2(fgm2(0.5), kP75, {1.0}, {10.0, 30.0, 100.0}, kPlan);
    ASSERT_EQ(r.curves.size(), 1u);
    const double expect = fgm2_joint(0.5, std::pow(100.0, 0.75), std::pow(100.0, 0.75)) / fgm2_max_tail(0.5, 100.0);
    EXPECT_NEAR(r.curves[0].value[2] / expect, 1.0, 1e-10);
    EXPECT_NEAR(r.curves[0].value[2], 7.5e-3, 1e-4);
    EXPECT_LT(r.curves[0].value[2], r.curves[0].value[1]);
    EXPECT_TRUE(r.pass);
}

TEST(Ds2, IndependentParetoDecaysLikeInverseX) {
    const std::vector<double> grid{1e2, 1e3, 1e4, 1e5};
    const auto r = check_ds2(fgm2(0.0), kP75, {1.0}, grid, kPlan);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(r.curves[0].value[k] * grid[k] * 2.0, 1.0, 0.02);
    EXPECT_NEAR(r.curves[0].slope, -1.0, 0.01);
}

TEST(Ds2, ExponentialDiverges) {
    const std::vector<double> grid{1, 2, 3, 4, 5};
    const auto r = check_ds2(iid(Marginal::exponential(1.0), 2), ScalingFunction::constant(1.0), {0.25, 1.0, 4.0}, grid, kPlan);
    EXPECT_FALSE(r.pass);
    for (const auto& c : r.curves) {
        EXPECT_EQ(c.verdict, Verdict::diverging) << c.label;
        EXPECT_NEAR(c.value[4] / (std::exp(5.0) / (2.0 - std::exp(-5.0))), std::exp(-2.0 * r.L[&c - r.curves.data()]), 1e-10);
    }
}

TEST(V1, FgmValue) {
    const auto v = check_v1(fgm2(0.5), {5.0, 10.0}, kPlan);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NEAR(v[0].value[1], 1.49005e-4 / 0.0198510, 1e-6);
    EXPECT_NEAR(v[0].value[1], 7.506e-3, 1e-6);
}

TEST(V1, ComonotoneAndIndependent) {
    const std::vector<double> grid{2.0, 5.0, 10.0, 20.0, 50.0};
    const auto co = check_v1(JointRiskModel(ComonotoneSpec{std::vector<Marginal>(2, Marginal::pareto(2.0, 1.0))}), grid, kPlan);
    for (double v : co[0].value) EXPECT_DOUBLE_EQ(v, 1.0);
    EXPECT_EQ(co[0].verdict, Verdict::converging_to_positive);
    const auto ind = check_v1(iid(Marginal::pareto(2.0, 1.0), 2), grid, kPlan);
    EXPECT_EQ(ind[0].verdict, Verdict::converging_to_zero);
}

TEST(V1, ParetoMaxInheritsIndexAndFirstOrderTail) {
    const auto m = fgm3();
    const std::vector<double> grid{1e2, 1e3, 1e4, 1e5};
    for (const auto& c : check_v1(m, grid, kPlan)) EXPECT_EQ(c.verdict, Verdict::converging_to_zero);
    const auto lt = max_log_tail(m);
    const double slope = (lt(grid.back()) - lt(grid[grid.size() - 2])) / std::log(grid.back() / grid[grid.size() - 2]);
    EXPECT_NEAR(slope, -2.0, 0.1);
    const double ratio = std::exp(lt(grid.back())) / m.marginal_tail_sum(grid.back());
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.0);
}

TEST(HProperties, ExponentialConstantIsExactlyGumbel) {
    const auto m = iid(Marginal::exponential(1.0), 1);
    const auto r = check_h_properties(max_log_tail(m), ScalingFunction::constant(1.0), {-1, -0.5, 0.5, 1, 2}, {2, 5, 10, 20});
    EXPECT_TRUE(r.gmda.pass);
    for (double d : r.gmda.deviation) EXPECT_LE(d, 1e-9);
    EXPECT_FALSE(r.insensitive.pass);
}

TEST(HProperties, LognormalSelfNeglectingAtE20) {
    const auto m = iid(Marginal::lognormal(0.0, 1.0), 1);
    const auto h = ScalingFunction::lognormal_type(1.0, 0.0);
    const double x = std::exp(20.0);
    EXPECT_NEAR(h(x + h(x)) / h(x), 1.0, 0.05);
    const auto r =
        check_h_properties(max_log_tail(m), h, {1.0}, {std::exp(5.0), std::exp(10.0), std::exp(20.0), std::exp(40.0)});
    EXPECT_LE(r.self_neglecting.deviation[2], 0.05);
    EXPECT_TRUE(r.little_o.pass);
    EXPECT_TRUE(r.gmda.pass);
    EXPECT_FALSE(r.in_h_class());
}

TEST(HProperties, PowerLittleO) {
    const auto m = iid(Marginal::pareto(2.0, 1.0), 2);
    const std::vector<double> grid{1e2, 1e4, 1e6, 1e8};
    const auto r = check_h_properties(max_log_tail(m), ScalingFunction::power(1.0, 0.5), {-1, 1, 2}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(r.little_o.deviation[k], std::pow(grid[k], -0.5), 1e-15);
    EXPECT_TRUE(r.little_o.pass);
    EXPECT_TRUE(r.insensitive.pass);
    EXPECT_TRUE(r.weakly_sn.pass);
    EXPECT_TRUE(r.in_h_class());
}

TEST(ConditionalSmallness, Examples) {
    const std::vector<double> grid{2.0, 3.0, 4.0, 5.0};
    const auto e = check_conditional_smallness(iid(Marginal::exponential(1.0), 2), ScalingFunction::constant(1.0), 1, 1.0,
                                               grid, kPlan);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // P(min > 1, max > x) / P(max > x).
        const double fx = 1.0 - std::exp(-grid[k]);
        const double exact = (std::exp(-2.0) - std::pow(std::exp(-1.0) - std::exp(-grid[k]), 2)) / (1.0 - fx * fx);
        EXPECT_NEAR(e.value[k], exact, 4.0 * (e.ci_hi[k] - e.ci_lo[k]) / (2 * 1.96));
    }
    EXPECT_NE(e.verdict, Verdict::converging_to_zero);

    const auto co = check_conditional_smallness(
        JointRiskModel(ComonotoneSpec{std::vector<Marginal>(2, Marginal::pareto(2.0, 1.0))}), kP75, 1, 1.0,
        {10.0, 20.0, 50.0}, kPlan);
    for (double v : co.value) EXPECT_DOUBLE_EQ(v, 1.0);
    EXPECT_EQ(co.verdict, Verdict::converging_to_positive);

    const auto f = check_conditional_smallness(fgm2(0.5), kP75, 1, 1.0, {10.0, 31.6, 100.0}, SimulationPlan::make(4'000'000, 8));
    EXPECT_LT(f.value[2], f.value[0]);
    EXPECT_THROW(check_conditional_smallness(fgm2(0.5), kP75, 2, 1.0, {10.0}, kPlan), DomainError);
}

TEST(ConditionalSmallness, MatchesDs1OnFgmPair) {
    // For n = 2, {X_{1:2} > t h(x), X_{2:2} > x} is the union of the two ds1 events.
    const std::vector<double> grid{10.0, 30.0, 100.0};
    const auto cs = check_conditional_smallness(fgm2(0.5), kP75, 1, 1.0, grid, SimulationPlan::make(4'000'000, 9));
    const auto d = check_ds1(fgm2(0.5), kP75, 1.0, grid, kPlan);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        const double both = fgm2_joint(0.5, x, x) / fgm2_max_tail(0.5, x);
        const double exact = d[0].value[k] + d[1].value[k] - both;
        const double se = (cs.ci_hi[k] - cs.ci_lo[k]) / (2 * 1.959963984540054);
        EXPECT_NEAR(cs.value[k], exact, 3.0 * se);
    }
}

TEST(AssumptionReport, Builtins) {
    struct Case {
        const char* name;
        const char* summary;
    };
    for (const Case& c : {Case{"example41", "A"}, Case{"example42", "B,C"}, Case{"negcontrol-exp", "none supported"}}) {
        const auto cfg = load_config(c.name);
        const JointRiskModel m(cfg.model);
        AssumptionOptions o;
        o.plan = SimulationPlan::make(1'000'000, 1);
        const auto r = assumption_report(m, cfg.candidates, o);
        EXPECT_EQ(r.summary, c.summary) << c.name;
    }
}
