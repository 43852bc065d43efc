#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ordertail/errors.hpp"
#include "ordertail/marginals.hpp"
#include "test_util.hpp"

using namespace ordertail;

namespace {

const double kE = std::exp(1.0);

std::vector<Marginal> all_families() {
    return {Marginal::exponential(1.5),
            Marginal::pareto(2.0, 1.0),
            Marginal::lognormal(0.3, 1.2),
            Marginal::heavy_weibull(1.0, 0.5),
            Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0)),
            Marginal::randomized_lognormal(0.5, 1.0, BoundedLaw::atoms({{0.5, 0.3}, {1.0, 0.7}}))};
}

}  // namespace

TEST(TailEval, ClosedFormExamples) {
    EXPECT_NEAR(tail_eval(Marginal::exponential(1.0), 1.0).survival, std::exp(-1.0), 1e-16);
    EXPECT_NEAR(tail_eval(Marginal::lognormal(0.0, 1.0), kE).survival, 0.158655253931457051, 1e-15);
    EXPECT_NEAR(Marginal::pareto(2.0, 1.0).survival(10.0), 0.01, 1e-17);
    EXPECT_EQ(Marginal::pareto(2.0, 1.0).survival(0.5), 1.0);
    EXPECT_NEAR(Marginal::heavy_weibull(1.0, 0.5).survival(4.0), std::exp(-2.0), 1e-16);
}

TEST(TailEval, DegenerateWeightReducesToLognormal) {
    const auto m = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::atoms({{1.0, 1.0}}));
    EXPECT_NEAR(m.survival(kE), 0.158655253931457051, 1e-15);
}

TEST(TailEval, UniformWeightMatchesIndependentQuadrature) {
    // P(WY > 1), W ~ U(0,1), Y ~ N(0,1): 40-digit quadrature of the mixture integral.
    const auto m = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0));
    EXPECT_NEAR(m.survival(kE) / 0.0469965767272025029, 1.0, 1e-9);
}

TEST(TailEval, UniformWeightMatchesMonteCarlo) {
    const auto m = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0));
    Stream rng(2024);
    const int n = 10'000'000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const double w = rng.uniform();
        const double y = rng.normal();
        if (w * y > 1.0) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(m.survival(kE), p, 3.0 * se);
}

TEST(TailEval, UpperEndpointFoldsIntoSigma) {
    const auto a = Marginal::randomized_lognormal(0.2, 1.0, BoundedLaw::scaled_beta(2.0, 1.0, 0.0, 2.0));
    const auto b = Marginal::randomized_lognormal(0.4, 2.0, BoundedLaw::scaled_beta(2.0, 1.0, 0.0, 1.0));
    for (double x : {1.5, 10.0, 1e3, 1e8}) EXPECT_NEAR(a.log_survival(x), b.log_survival(x), 1e-9);
}

TEST(TailEval, LogSurvivalConsistentAndMonotone) {
    for (const auto& m : all_families()) {
        double prev = 0.0;
        for (double x = 0.01; x < 1e12; x *= 1.7) {
            const auto t = m.tail(x);
            if (t.survival > 1e-300) EXPECT_NEAR(std::exp(t.log_survival) / t.survival, 1.0, 1e-12) << m.describe();
            EXPECT_LE(t.log_survival, prev + 1e-15) << m.describe() << " x=" << x;
            prev = t.log_survival;
        }
    }
}

TEST(TailEval, RandomizedTailDominatesSingleWeightBound) {
    const auto law = BoundedLaw::scaled_beta(2.0, 3.0, 0.0, 1.0);
    const double mu = 0.5, sigma = 1.5;
    const auto m = Marginal::randomized_lognormal(mu, sigma, law);
    for (double x : {3.0, 50.0, 1e4, 1e9})
        for (double w : {0.2, 0.5, 0.8, 0.95}) {
            const double bound = normal_tail((std::log(x) - w * mu) / (w * sigma)) * law.survival(w);
            EXPECT_GE(m.survival(x), bound) << x << " " << w;
        }
}

TEST(Quantile, Examples) {
    EXPECT_NEAR(quantile(Marginal::pareto(1.0, 1.0), 0.99), 100.0, 1e-9);
    EXPECT_NEAR(quantile(Marginal::exponential(1.0), 1.0 - std::exp(-1.0)), 1.0, 1e-12);
    const auto r = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0));
    EXPECT_NEAR(r.quantile(0.999) / 10.7363458139486360, 1.0, 1e-8);
}

TEST(Quantile, RandomizedAgreesWithEmpiricalQuantile) {
    const auto r = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0));
    Stream rng(99);
    const std::size_t n = 10'000'000;
    std::vector<double> v(n);
    for (auto& x : v) x = r.sample(rng);
    // Order-statistic interval for the 0.999 quantile at about 99.7% coverage.
    const double q = 0.999;
    const double sd = std::sqrt(n * q * (1 - q));
    const auto lo = static_cast<std::size_t>(n * q - 3 * sd), hi = static_cast<std::size_t>(n * q + 3 * sd);
    std::nth_element(v.begin(), v.begin() + lo, v.end());
    const double vlo = v[lo];
    std::nth_element(v.begin(), v.begin() + hi, v.end());
    const double vhi = v[hi];
    const double qx = r.quantile(q);
    EXPECT_GE(qx, vlo);
    EXPECT_LE(qx, vhi);
}

TEST(Quantile, SurvivalRoundTrip) {
    for (const auto& m : all_families())
        for (double q : {0.5, 0.9, 0.99, 0.999}) {
            const double x = m.quantile(q);
            EXPECT_NEAR(m.survival(x) / (1.0 - q), 1.0, 1e-9) << m.describe();
        }
}

TEST(Sampling, ExponentialKolmogorovSmirnov) {
    const auto m = Marginal::exponential(1.0);
    Stream rng(3);
    std::vector<double> v(100'000);
    for (auto& x : v) x = sample_marginal(m, rng);
    EXPECT_LT(testutil::ks_statistic(v, [&](double x) { return m.cdf(x); }), testutil::ks_critical_1pct(v.size()));
}

TEST(Sampling, AllFamiliesKolmogorovSmirnov) {
    for (const auto& m : all_families()) {
        Stream rng(17);
        std::vector<double> v(100'000);
        for (auto& x : v) x = m.sample(rng);
        EXPECT_LT(testutil::ks_statistic(v, [&](double x) { return m.cdf(x); }), testutil::ks_critical_1pct(v.size()))
            << m.describe();
    }
}

TEST(Sampling, ParetoMean) {
    const auto m = Marginal::pareto(2.0, 1.0);
    Stream rng(8);
    const int n = 1'000'000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = m.sample(rng);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 2.0, 3.0 * se);
}

TEST(Sampling, FixedSeedReproduces) {
    for (const auto& m : all_families()) {
        Stream a(1234), b(1234);
        for (int i = 0; i < 10; ++i) EXPECT_EQ(m.sample(a), m.sample(b));
    }
}

TEST(ClassTags, FamilyTags) {
    const auto p = Marginal::pareto(2.0, 1.0).tags();
    EXPECT_TRUE(p.long_tailed && p.dominated && p.regularly_varying);
    EXPECT_DOUBLE_EQ(p.alpha, 2.0);
    EXPECT_FALSE(p.gumbel);
    const auto e = Marginal::exponential(1.0).tags();
    EXPECT_TRUE(e.gumbel);
    EXPECT_FALSE(e.long_tailed);
    const auto l = Marginal::lognormal(0.0, 1.0).tags();
    EXPECT_TRUE(l.gumbel && l.long_tailed);
    EXPECT_FALSE(l.dominated);
    const auto w = Marginal::heavy_weibull(1.0, 0.5).tags();
    EXPECT_TRUE(w.gumbel && w.long_tailed);
    const auto r = Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::scaled_beta(1.0, 1.0, 0.0, 1.0)).tags();
    EXPECT_TRUE(r.long_tailed);
}

TEST(Marginal, RejectsBadParameters) {
    EXPECT_THROW(Marginal::exponential(0.0), DomainError);
    EXPECT_THROW(Marginal::pareto(-1.0, 1.0), DomainError);
    EXPECT_THROW(Marginal::lognormal(0.0, 0.0), DomainError);
    EXPECT_THROW(Marginal::heavy_weibull(1.0, 1.0), DomainError);
    EXPECT_THROW(Marginal::randomized_lognormal(0.0, 1.0, BoundedLaw::atoms({{1.0, 0.4}})), DomainError);
}

TEST(BoundedLawCheck, Constraints) {
    EXPECT_FALSE(BoundedLaw::atoms({{1.0, 0.5}, {2.0, 0.5}}).check());
    EXPECT_TRUE(BoundedLaw::atoms({{1.0, 0.5}, {2.0, 0.4}}).check());
    EXPECT_TRUE(BoundedLaw::scaled_beta(0.0, 1.0, 0.0, 1.0).check());
    EXPECT_TRUE(BoundedLaw::scaled_beta(1.0, 1.0, 2.0, 1.0).check());
    const auto law = BoundedLaw::scaled_beta(2.0, 3.0, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(law.lower(), 1.0);
    EXPECT_DOUBLE_EQ(law.upper(), 3.0);
    EXPECT_NEAR(law.survival(law.quantile(0.3)), 0.7, 1e-12);
}

TEST(Scaling, Examples) {
    EXPECT_NEAR(scaling_eval(ScalingFunction::lognormal_type(2.0, 0.0), std::exp(2.0)), 2.0 * std::exp(2.0), 1e-12);
    EXPECT_DOUBLE_EQ(scaling_eval(ScalingFunction::constant(1.0), 1000.0), 1.0);
    const auto p = ScalingFunction::power_of(ScalingFunction::lognormal_type(1.0, 0.0), 0.5);
    EXPECT_NEAR(p(std::exp(2.0)), std::sqrt(std::exp(2.0) / 2.0), 1e-12);
    EXPECT_NEAR(p(std::exp(2.0)), 1.9221, 1e-4);
    EXPECT_NEAR(ScalingFunction::weibull_type(2.0, 0.5)(16.0), 4.0, 1e-12);
    EXPECT_NEAR(ScalingFunction::power(3.0, 0.5)(16.0), 12.0, 1e-12);
}

TEST(Scaling, DomainAndConstruction) {
    const auto h = ScalingFunction::lognormal_type(1.0, 1.0);
    EXPECT_THROW(h(2.0), DomainError);
    EXPECT_GT(h(3.0), 0.0);
    EXPECT_THROW(ScalingFunction::power(1.0, 1.0), DomainError);
    EXPECT_THROW(ScalingFunction::constant(0.0), DomainError);
    EXPECT_THROW(ScalingFunction::power_of(ScalingFunction::power_of(h, 0.5), 0.5), DomainError);
}

TEST(Scaling, LognormalTypeIsLittleO) {
    const auto h = ScalingFunction::lognormal_type(1.0, 0.0);
    const double x = std::exp(101.0);
    EXPECT_LT(h(x) / x, 0.01);
}

TEST(Scaling, ExponentialGumbelLimitIsExact) {
    for (double rate : {0.5, 1.0, 3.0}) {
        const auto m = Marginal::exponential(rate);
        const auto h = *m.gumbel_scaling();
        for (double x : {0.5, 3.0, 40.0})
            for (double y : {-0.3, 0.0, 1.0, 5.0}) {
                if (x + y * h(x) <= 0.0) continue;
                EXPECT_NEAR(m.survival(x + y * h(x)) / m.survival(x), std::exp(-y), 1e-12);
            }
    }
}
