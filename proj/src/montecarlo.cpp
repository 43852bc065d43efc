#include "ordertail/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>

#include "ordertail/errors.hpp"
#include "ordertail/numerics.hpp"

namespace ordertail {

SimulationPlan SimulationPlan::make(std::uint64_t samples, std::uint64_t seed, double confidence) {
    SimulationPlan p;
    p.samples = samples;
    p.seed = seed;
    p.confidence = confidence;
    p.chunk = std::max<std::uint64_t>(1, std::min<std::uint64_t>(p.chunk, samples));
    return p;
}

std::optional<std::string> SimulationPlan::check() const {
    if (chunk < 1) return "chunk size must be at least 1";
    if (samples < chunk) return "sample count must be at least the chunk size";
    if (!(confidence > 0.0 && confidence < 1.0)) return "confidence level must lie in (0, 1)";
    return std::nullopt;
}

double SimulationPlan::z() const { return normal_upper_quantile(0.5 * (1.0 - confidence)); }

unsigned resolve_workers(const SimulationPlan& plan) {
    if (plan.workers > 0) return plan.workers;
    if (const char* env = std::getenv("ORDERTAIL_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TailEstimate make_tail_estimate(std::uint64_t hits, std::uint64_t samples, double z) {
    TailEstimate e;
    e.samples = samples;
    e.hits = hits;
    const double n = static_cast<double>(samples);
    if (hits == 0) {
        e.rare_event = true;
        e.ci_hi = std::min(1.0, 3.0 / n);
        return e;
    }
    e.estimate = static_cast<double>(hits) / n;
    e.se = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.ci_lo = std::max(0.0, e.estimate - z * e.se);
    e.ci_hi = std::min(1.0, e.estimate + z * e.se);
    return e;
}

double weighted_order_sum_inplace(std::span<double> sample, std::span<const double> c) {
    if (sample.size() != c.size()) throw DomainError("weighted_order_sum: sample and weights differ in length");
    std::sort(sample.begin(), sample.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * sample[i];
    return s;
}

double weighted_order_sum(std::span<const double> sample, std::span<const double> c) {
    std::vector<double> copy(sample.begin(), sample.end());
    return weighted_order_sum_inplace(copy, c);
}

namespace {

void require_valid(const JointRiskModel& m) {
    if (!m.validation()) throw ValidationError("invalid model: " + m.validation().violation);
}

// Draws the weighted order-statistic sum; random C0 is drawn after the risks.
class StatisticSampler {
public:
    StatisticSampler(const JointRiskModel& m, const WeightSpec& w) : m_(m), x_(m.dimension()) {
        require_valid(m);
        bool nonneg = std::all_of(m.marginals().begin(), m.marginals().end(),
                                  [](const Marginal& mg) { return mg.nonnegative(); });
        if (auto err = check_weights(w, m.dimension(), nonneg)) throw ValidationError("weights: " + *err);
        if (const auto* f = std::get_if<FixedWeights>(&w)) {
            c_ = f->c;
        } else {
            const auto& r = std::get<RandomWeights>(w);
            c0_law_ = &r.c0;
            c_.assign(1, 0.0);
            c_.insert(c_.end(), r.rest.begin(), r.rest.end());
        }
    }

    double draw(Stream& rng) {
        m_.sample(rng, x_);
        if (c0_law_) c_[0] = c0_law_->sample(rng);
        return weighted_order_sum_inplace(x_, c_);
    }

private:
    const JointRiskModel& m_;
    std::vector<double> x_;
    std::vector<double> c_;
    const BoundedLaw* c0_law_ = nullptr;
};

}  // namespace

std::vector<TailEstimate> estimate_tail_grid(const JointRiskModel& m, const WeightSpec& w,
                                             const std::vector<double>& x_grid,
                                             const SimulationPlan& plan) {
    StatisticSampler probe(m, w);
    const std::size_t g = x_grid.size();
    auto parts = run_chunks<std::vector<std::uint64_t>>(plan, StreamId::tail, [&](Stream& rng, std::uint64_t count) {
        StatisticSampler sampler(m, w);
        std::vector<std::uint64_t> hits(g, 0);
        for (std::uint64_t s = 0; s < count; ++s) {
            const double v = sampler.draw(rng);
            for (std::size_t k = 0; k < g; ++k)
                if (v > x_grid[k]) ++hits[k];
        }
        return hits;
    });
    std::vector<std::uint64_t> total(g, 0);
    for (const auto& p : parts)
        for (std::size_t k = 0; k < g; ++k) total[k] += p[k];
    std::vector<TailEstimate> out;
    const double z = plan.z();
    for (std::size_t k = 0; k < g; ++k) out.push_back(make_tail_estimate(total[k], plan.samples, z));
    return out;
}

TailEstimate estimate_tail(const JointRiskModel& m, const WeightSpec& w, double x, const SimulationPlan& plan) {
    return estimate_tail_grid(m, w, {x}, plan).front();
}

QuantileEstimate estimate_quantile(const JointRiskModel& m, const WeightSpec& w, double q,
                                   const SimulationPlan& plan) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("estimate_quantile requires q in (0, 1)");
    const double n = static_cast<double>(plan.samples);
    if (n * (1.0 - q) < 100.0 * (1.0 - 1e-9))
        throw SampleSizeError("estimate_quantile needs samples * (1 - q) >= 100; increase the sample count");
    StatisticSampler probe(m, w);

    const std::uint64_t N = plan.samples;
    auto ascending_rank = [&](double t) {
        auto r = static_cast<std::uint64_t>(std::ceil(t - 1e-9 * std::max(1.0, t)));
        return std::clamp<std::uint64_t>(r, 1, N);
    };
    const std::uint64_t k = ascending_rank(n * q);
    const double alpha = 1.0 - plan.confidence;
    boost::math::binomial_distribution<double> bin(n, q);
    const double b_lo = boost::math::quantile(bin, 0.5 * alpha);
    const double b_hi = boost::math::quantile(boost::math::complement(bin, 0.5 * alpha));
    const std::uint64_t lo_rank = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(1.0, b_lo)), 1, k);
    const std::uint64_t hi_rank = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(b_hi) + 1, k, N);

    // Only the largest N - lo_rank + 1 values are needed.
    const std::uint64_t keep = N - lo_rank + 1;
    auto parts = run_chunks<std::vector<double>>(plan, StreamId::quantile, [&](Stream& rng, std::uint64_t count) {
        StatisticSampler sampler(m, w);
        std::vector<double> v(count);
        for (auto& x : v) x = sampler.draw(rng);
        if (v.size() > keep) {
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep), v.end(), std::greater<>());
            v.resize(keep);
        }
        return v;
    });
    std::vector<double> top;
    for (const auto& p : parts) top.insert(top.end(), p.begin(), p.end());
    if (top.size() > keep) {
        std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(keep), top.end(), std::greater<>());
        top.resize(keep);
    }
    std::sort(top.begin(), top.end(), std::greater<>());
    auto at_rank = [&](std::uint64_t r) { return top[N - r]; };

    QuantileEstimate e;
    e.q = q;
    e.samples = N;
    e.value = at_rank(k);
    e.ci_lo = at_rank(lo_rank);
    e.ci_hi = at_rank(hi_rank);
    return e;
}

CteEstimate estimate_cte_ratio(const JointRiskModel& m, const std::vector<std::size_t>& omega, double q,
                               const SimulationPlan& plan) {
    require_valid(m);
    if (omega.empty()) throw DomainError("estimate_cte_ratio needs a nonempty index set");
    for (std::size_t i : omega)
        if (i >= m.dimension()) throw DomainError("estimate_cte_ratio index out of range");
    for (const auto& mg : m.marginals())
        if (!mg.nonnegative()) throw DomainError("estimate_cte_ratio requires nonnegative risks");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("estimate_cte_ratio requires q in (0, 1)");
    if (static_cast<double>(plan.samples) * (1.0 - q) < 1000.0 * (1.0 - 1e-9))
        throw SampleSizeError("estimate_cte_ratio needs samples * (1 - q) >= 1000; increase the sample count");

    const std::size_t n = m.dimension();
    const FixedWeights ones = FixedWeights::tight(std::vector<double>(n, 1.0));
    CteEstimate e;
    e.q = q;
    e.var = estimate_quantile(m, ones, q, plan);
    const double v = e.var.value;

    struct Partial {
        std::uint64_t count = 0;
        double sum = 0.0;
        double sumsq = 0.0;
    };
    auto parts = run_chunks<Partial>(plan, StreamId::cte_mean, [&](Stream& rng, std::uint64_t count) {
        Partial p;
        std::vector<double> x(n);
        for (std::uint64_t s = 0; s < count; ++s) {
            m.sample(rng, x);
            const double total = std::accumulate(x.begin(), x.end(), 0.0);
            if (total > v) {
                double part = 0.0;
                for (std::size_t i : omega) part += x[i];
                ++p.count;
                p.sum += part;
                p.sumsq += part * part;
            }
        }
        return p;
    });
    Partial t;
    for (const auto& p : parts) {
        t.count += p.count;
        t.sum += p.sum;
        t.sumsq += p.sumsq;
    }
    if (t.count < 10) throw SampleSizeError("estimate_cte_ratio: too few exceedances of the empirical VaR");
    e.exceedances = t.count;
    const double c = static_cast<double>(t.count);
    e.cte = t.sum / c;
    const double var_part = std::max(0.0, (t.sumsq - c * e.cte * e.cte) / (c - 1.0));
    e.cte_se = std::sqrt(var_part / c);
    const double z = plan.z();
    const double v_se = (e.var.ci_hi - e.var.ci_lo) / (2.0 * z);
    e.ratio = e.cte / v;
    e.ratio_se = std::hypot(e.cte_se / v, e.cte * v_se / (v * v));
    e.ratio_ci_lo = e.ratio - z * e.ratio_se;
    e.ratio_ci_hi = e.ratio + z * e.ratio_se;
    return e;
}

std::vector<RatioPoint> ratio_curve(const JointRiskModel& m, const WeightSpec& w,
                                    const std::vector<double>& x_grid, const SimulationPlan& plan) {
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        throw DomainError("ratio_curve grid must be increasing");
    std::vector<double> approx;
    for (double x : x_grid) {
        const double a = approx_tail(m, w, x);
        if (!(a > 0.0)) throw DomainError("ratio_curve: approx_tail vanishes on the grid");
        approx.push_back(a);
    }
    const auto est = estimate_tail_grid(m, w, x_grid, plan);
    std::vector<RatioPoint> out;
    for (std::size_t k = 0; k < x_grid.size(); ++k) {
        RatioPoint p;
        p.x = x_grid[k];
        p.estimate = est[k];
        p.approx = approx[k];
        p.ratio = est[k].estimate / approx[k];
        p.ratio_lo = est[k].ci_lo / approx[k];
        p.ratio_hi = est[k].ci_hi / approx[k];
        out.push_back(p);
    }
    return out;
}

}  // namespace ordertail
