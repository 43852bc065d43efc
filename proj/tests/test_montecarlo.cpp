#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ordertail/asymptotics.hpp"
#include "ordertail/errors.hpp"
#include "ordertail/montecarlo.hpp"

using namespace ordertail;

namespace {

JointRiskModel iid(const Marginal& m, std::size_t n) { return JointRiskModel(IndependentSpec{std::vector<Marginal>(n, m)}); }

SimulationPlan plan(std::uint64_t n, std::uint64_t seed, unsigned workers = 0) {
    auto p = SimulationPlan::make(n, seed);
    p.workers = workers;
    return p;
}

const double kExpMax = 1.0 - std::pow(1.0 - std::exp(-1.0), 2);

}  // namespace

TEST(WeightedOrderSum, Examples) {
    const std::vector<double> s{3, 1, 2};
    EXPECT_DOUBLE_EQ(weighted_order_sum(s, std::vector<double>{1, 0.5, 0.25}), 4.25);
    EXPECT_DOUBLE_EQ(weighted_order_sum(s, std::vector<double>{1, 0, 0}), 3.0);
    EXPECT_DOUBLE_EQ(weighted_order_sum(s, std::vector<double>{1, 1, 1}), 6.0);
    EXPECT_THROW(weighted_order_sum(s, std::vector<double>{1, 1}), DomainError);
}

TEST(WeightedOrderSum, PermutationInvariant) {
    std::vector<double> s{0.3, 7.1, 2.2, 5.5, 1.0};
    const std::vector<double> c{1.3, 0.2, -0.4, 0.9, 0.05};
    const double ref = weighted_order_sum(s, c);
    std::sort(s.begin(), s.end());
    do {
        EXPECT_DOUBLE_EQ(weighted_order_sum(s, c), ref);
    } while (std::next_permutation(s.begin(), s.end()));
    auto copy = s;
    EXPECT_DOUBLE_EQ(weighted_order_sum_inplace(copy, c), ref);
    EXPECT_TRUE(std::is_sorted(copy.rbegin(), copy.rend()));
}

TEST(EstimateTail, ExponentialMaxClosedForm) {
    const auto t = estimate_tail(iid(Marginal::exponential(1.0), 2), FixedWeights::tight({1, 0}), 1.0, plan(1'000'000, 1));
    EXPECT_NEAR(t.estimate, 0.600424, 3.0 * t.se);
    EXPECT_NEAR(kExpMax, 0.600424, 1e-6);
    EXPECT_LE(t.ci_lo, t.estimate);
    EXPECT_GE(t.ci_hi, t.estimate);
    EXPECT_EQ(t.samples, 1'000'000u);
}

TEST(EstimateTail, ParetoMaxClosedForm) {
    const auto t = estimate_tail(iid(Marginal::pareto(2.0, 1.0), 2), FixedWeights::tight({1, 0}), 10.0, plan(1'000'000, 2));
    EXPECT_NEAR(t.estimate, 0.0199, 3.0 * t.se);
}

TEST(EstimateTail, BelowSupportIsOne) {
    const auto t = estimate_tail(iid(Marginal::pareto(2.0, 1.0), 3), FixedWeights::tight({1, 1, 1}), 2.5, plan(10'000, 3));
    EXPECT_EQ(t.estimate, 1.0);
    EXPECT_EQ(t.hits, t.samples);
}

TEST(EstimateTail, ZeroHitsIsRareEvent) {
    const auto t = estimate_tail(iid(Marginal::exponential(1.0), 2), FixedWeights::tight({1, 1}), 100.0, plan(10'000, 4));
    EXPECT_EQ(t.estimate, 0.0);
    EXPECT_TRUE(t.rare_event);
    EXPECT_DOUBLE_EQ(t.ci_hi, 3.0 / 10'000);
}

TEST(EstimateTail, CoverageOfConfidenceInterval) {
    const auto m = iid(Marginal::exponential(1.0), 2);
    const auto w = FixedWeights::tight({1, 0});
    int covered = 0;
    for (int r = 0; r < 200; ++r) {
        const auto t = estimate_tail(m, w, 1.0, plan(100'000, 1000 + r));
        if (t.ci_lo <= kExpMax && kExpMax <= t.ci_hi) ++covered;
    }
    EXPECT_GE(covered, 180);
}

TEST(EstimateTail, GridMatchesSinglePoints) {
    const auto m = iid(Marginal::lognormal(0.0, 1.0), 3);
    const WeightSpec w = FixedWeights::tight({1, 0.5, 0.25});
    const std::vector<double> grid{1.0, 5.0, 20.0};
    const auto p = plan(200'000, 9);
    const auto g = estimate_tail_grid(m, w, grid, p);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(g[k].hits, estimate_tail(m, w, grid[k], p).hits);
}

TEST(EstimateTail, IndependentOfWorkerCount) {
    const JointRiskModel m(FgmSpec{std::vector<Marginal>(3, Marginal::pareto(2.0, 1.0)),
                                   {{0b011, 0.5}, {0b101, 0.5}, {0b110, 0.5}, {0b111, 0.5}}});
    const WeightSpec w = FixedWeights::tight({1, 1, 1});
    auto p1 = plan(300'000, 17, 1);
    p1.chunk = 10'000;
    auto p4 = p1;
    p4.workers = 4;
    const auto a = estimate_tail_grid(m, w, {10.0, 30.0, 100.0}, p1);
    const auto b = estimate_tail_grid(m, w, {10.0, 30.0, 100.0}, p4);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].hits, b[k].hits);
        EXPECT_EQ(a[k].estimate, b[k].estimate);
    }
    const auto qa = estimate_quantile(m, w, 0.99, p1);
    const auto qb = estimate_quantile(m, w, 0.99, p4);
    EXPECT_EQ(qa.value, qb.value);
    EXPECT_EQ(qa.ci_lo, qb.ci_lo);
    const auto ca = estimate_cte_ratio(m, {0}, 0.99, p1);
    const auto cb = estimate_cte_ratio(m, {0}, 0.99, p4);
    EXPECT_EQ(ca.ratio, cb.ratio);
}

TEST(EstimateTail, RandomWeightsAgreeWithApproximationOnIndependentPareto) {
    const auto m = iid(Marginal::pareto(2.0, 1.0), 2);
    const RandomWeights w{BoundedLaw::atoms({{1.0, 0.5}, {2.0, 0.5}}), {0.0}, 0.0};
    // With rest weight 0 the statistic is C0 max(X1, X2): P = E[2(C0/x)^2 - (C0/x)^4].
    const double x = 40.0;
    const double exact = 0.5 * (2 * std::pow(1 / x, 2) - std::pow(1 / x, 4)) + 0.5 * (2 * std::pow(2 / x, 2) - std::pow(2 / x, 4));
    const auto t = estimate_tail(m, w, x, plan(2'000'000, 23));
    EXPECT_NEAR(t.estimate, exact, 3.0 * t.se);
    EXPECT_NEAR(approx_tail_random_weights(m, w, x) / exact, 1.0, 0.01);
}

TEST(EstimateQuantile, ParetoExact) {
    const auto q = estimate_quantile(iid(Marginal::pareto(1.0, 1.0), 1), FixedWeights::tight({1}), 0.99, plan(10'000'000, 5));
    EXPECT_LE(q.ci_lo, 100.0);
    EXPECT_GE(q.ci_hi, 100.0);
    EXPECT_LE(q.ci_lo, q.value);
    EXPECT_GE(q.ci_hi, q.value);
}

TEST(EstimateQuantile, ExponentialExact) {
    const auto q = estimate_quantile(iid(Marginal::exponential(1.0), 1), FixedWeights::tight({1}), 1.0 - std::exp(-1.0),
                                     plan(1'000'000, 6));
    EXPECT_LE(q.ci_lo, 1.0);
    EXPECT_GE(q.ci_hi, 1.0);
}

TEST(EstimateQuantile, FiniteLevelGapShrinks) {
    const auto m = iid(Marginal::pareto(2.0, 1.0), 3);
    const auto w = FixedWeights::tight({1, 1, 1});
    const auto p = plan(20'000'000, 8);
    double prev = INFINITY;
    for (double q : {0.99, 0.999, 0.9999}) {
        const double gap = estimate_quantile(m, w, q, p).value / asymptotic_var(m, q, 1.0) - 1.0;
        EXPECT_GT(gap, 0.0) << q;
        EXPECT_LT(gap, prev) << q;
        prev = gap;
    }
    EXPECT_NEAR(asymptotic_var(m, 0.99, 1.0), std::sqrt(300.0), 1e-9);
}

TEST(EstimateQuantile, DemandsEnoughSamples) {
    const auto m = iid(Marginal::exponential(1.0), 2);
    EXPECT_THROW(estimate_quantile(m, FixedWeights::tight({1, 1}), 0.999, plan(99'000, 1)), SampleSizeError);
    EXPECT_NO_THROW(estimate_quantile(m, FixedWeights::tight({1, 1}), 0.999, plan(100'000, 1)));
}

TEST(EstimateCte, ParetoConditionalMean) {
    const auto c = estimate_cte_ratio(iid(Marginal::pareto(2.0, 1.0), 1), {0}, 0.99, plan(4'000'000, 12));
    EXPECT_NEAR(c.var.value, 10.0, 0.2);
    EXPECT_NEAR(c.cte, 20.0, 1.0);
    EXPECT_LE(c.ratio_ci_lo, c.ratio);
    EXPECT_GE(c.ratio_ci_hi, c.ratio);
    EXPECT_NEAR(c.ratio, 2.0, 4.0 * c.ratio_se);
}

TEST(EstimateCte, Preconditions) {
    const auto m = iid(Marginal::pareto(2.0, 1.0), 2);
    EXPECT_THROW(estimate_cte_ratio(m, {}, 0.99, plan(1'000'000, 1)), DomainError);
    EXPECT_THROW(estimate_cte_ratio(m, {2}, 0.99, plan(1'000'000, 1)), DomainError);
    EXPECT_THROW(estimate_cte_ratio(m, {0}, 0.99, plan(50'000, 1)), SampleSizeError);
}

TEST(RatioCurve, IndependentParetoMax) {
    const auto c = ratio_curve(iid(Marginal::pareto(2.0, 1.0), 2), FixedWeights::tight({1, 0}), {10.0}, plan(4'000'000, 14));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0].ratio, 0.995, 3.0 * c[0].estimate.se / c[0].approx);
    EXPECT_DOUBLE_EQ(c[0].approx, 0.02);
}

TEST(RatioCurve, ExponentialSumDiverges) {
    const auto c = ratio_curve(iid(Marginal::exponential(1.0), 2), FixedWeights::tight({1, 1}), {1.0, 2.0, 3.0},
                               plan(1'000'000, 15));
    EXPECT_GT(c[2].ratio, 1.9);
    EXPECT_NEAR(c[2].ratio, 2.0, 3.0 * c[2].estimate.se / c[2].approx);
    EXPECT_LT(c[0].ratio, c[1].ratio);
    EXPECT_LT(c[1].ratio, c[2].ratio);
}

TEST(RatioCurve, RejectsUnsortedGrid) {
    EXPECT_THROW(ratio_curve(iid(Marginal::exponential(1.0), 2), FixedWeights::tight({1, 1}), {2.0, 1.0}, plan(1000, 1)),
                 DomainError);
}

TEST(Plan, Checks) {
    auto p = SimulationPlan::make(100, 1);
    EXPECT_EQ(p.chunk, 100u);
    EXPECT_FALSE(p.check().has_value());
    p.chunk = 0;
    EXPECT_TRUE(p.check().has_value());
    EXPECT_NEAR(SimulationPlan::make(10, 1, 0.95).z(), 1.959963984540054, 1e-12);
}
