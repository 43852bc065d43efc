#include "ordertail/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ordertail/errors.hpp"
#include "ordertail/numerics.hpp"

namespace ordertail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_valid(const JointRiskModel& m) {
    if (!m.validation()) throw ValidationError("invalid model: " + m.validation().violation);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool decreasing_step(double a, double b) { return a > b || (a == 0.0 && b == 0.0); }

// Ratio of two Monte Carlo frequencies a/b with the delta-method variance;
// `ab` counts draws in both events.
void mc_ratio(std::uint64_t a, std::uint64_t b, std::uint64_t ab, std::uint64_t n, double z, double& value,
              double& lo, double& hi, bool& rare) {
    rare = (a == 0 || b == 0);
    if (b == 0) {
        value = 0.0;
        lo = 0.0;
        hi = kInf;
        return;
    }
    const double N = static_cast<double>(n);
    const double pa = a / N, pb = b / N, pab = ab / N;
    value = static_cast<double>(a) / static_cast<double>(b);
    if (a == 0) {
        lo = 0.0;
        hi = 3.0 / static_cast<double>(b);
        return;
    }
    const double var = (pa * (1.0 - pa) - 2.0 * value * (pab - pa * pb) + value * value * pb * (1.0 - pb)) /
                       (N * pb * pb);
    const double se = std::sqrt(std::max(0.0, var));
    lo = std::max(0.0, value - z * se);
    hi = value + z * se;
}

// Per-sample event flags for each series at grid point k; the denominator
// event is always {X_{n:n} > x_k}.
using EventFn = std::function<void(std::span<const double> x, std::size_t k, std::vector<char>& flags)>;

struct EventCounts {
    std::vector<std::uint64_t> den;                // [k]
    std::vector<std::vector<std::uint64_t>> num;   // [s][k]
    std::vector<std::vector<std::uint64_t>> both;  // [s][k]
};

EventCounts count_events(const JointRiskModel& m, const std::vector<double>& grid, std::size_t series,
                         const SimulationPlan& plan, const EventFn& eval) {
    const std::size_t g = grid.size();
    const std::size_t n = m.dimension();
    auto parts = run_chunks<EventCounts>(plan, StreamId::diagnostics, [&](Stream& rng, std::uint64_t count) {
        EventCounts c{std::vector<std::uint64_t>(g, 0),
                      std::vector<std::vector<std::uint64_t>>(series, std::vector<std::uint64_t>(g, 0)),
                      std::vector<std::vector<std::uint64_t>>(series, std::vector<std::uint64_t>(g, 0))};
        std::vector<double> x(n);
        std::vector<char> flags(series);
        for (std::uint64_t s = 0; s < count; ++s) {
            m.sample(rng, x);
            const double mx = *std::max_element(x.begin(), x.end());
            for (std::size_t k = 0; k < g; ++k) {
                const bool d = mx > grid[k];
                if (d) ++c.den[k];
                std::fill(flags.begin(), flags.end(), 0);
                eval(x, k, flags);
                for (std::size_t j = 0; j < series; ++j) {
                    if (!flags[j]) continue;
                    ++c.num[j][k];
                    if (d) ++c.both[j][k];
                }
            }
        }
        return c;
    });
    EventCounts total{std::vector<std::uint64_t>(g, 0),
                      std::vector<std::vector<std::uint64_t>>(series, std::vector<std::uint64_t>(g, 0)),
                      std::vector<std::vector<std::uint64_t>>(series, std::vector<std::uint64_t>(g, 0))};
    for (const auto& p : parts)
        for (std::size_t k = 0; k < g; ++k) {
            total.den[k] += p.den[k];
            for (std::size_t j = 0; j < series; ++j) {
                total.num[j][k] += p.num[j][k];
                total.both[j][k] += p.both[j][k];
            }
        }
    return total;
}

std::vector<DiagnosticCurve> curves_from_counts(const EventCounts& c, const std::vector<double>& grid,
                                                const std::vector<std::string>& labels, const SimulationPlan& plan,
                                                const VerdictThresholds& th) {
    std::vector<DiagnosticCurve> out;
    const double z = plan.z();
    for (std::size_t s = 0; s < labels.size(); ++s) {
        DiagnosticCurve cv;
        cv.label = labels[s];
        cv.x = grid;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double v, lo, hi;
            bool rare;
            mc_ratio(c.num[s][k], c.den[k], c.both[s][k], plan.samples, z, v, lo, hi, rare);
            cv.value.push_back(v);
            cv.ci_lo.push_back(lo);
            cv.ci_hi.push_back(hi);
            cv.rare_event.push_back(rare);
        }
        classify(cv, th);
        out.push_back(std::move(cv));
    }
    return out;
}

// Deterministic denominators P(X_{n:n} > x) over the grid, when available.
std::optional<std::vector<MaxTailBounds>> max_bounds(const JointRiskModel& m, const std::vector<double>& grid) {
    std::vector<MaxTailBounds> out;
    for (double x : grid) {
        auto b = m.max_tail(x);
        if (!b) return std::nullopt;
        out.push_back(*b);
    }
    return out;
}

// Deterministic curve from numerators num(k) over the bracketed denominators.
DiagnosticCurve deterministic_curve(std::string label, const std::vector<double>& grid,
                                    const std::vector<double>& num, const std::vector<MaxTailBounds>& den,
                                    const VerdictThresholds& th) {
    DiagnosticCurve cv;
    cv.label = std::move(label);
    cv.x = grid;
    cv.deterministic = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double lo = den[k].lo, hi = den[k].hi;
        const double mid = 0.5 * (lo + hi);
        cv.value.push_back(mid > 0.0 ? num[k] / mid : kInf);
        cv.ci_lo.push_back(hi > 0.0 ? num[k] / hi : kInf);
        cv.ci_hi.push_back(lo > 0.0 ? num[k] / lo : kInf);
        cv.rare_event.push_back(false);
    }
    classify(cv, th);
    return cv;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("diagnostic grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("diagnostic grid must be increasing");
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::converging_to_zero: return "converging-to-zero";
        case Verdict::converging_to_positive: return "converging-to-positive";
        case Verdict::diverging: return "diverging";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

void classify(DiagnosticCurve& c, const VerdictThresholds& th) {
    const std::size_t n = c.value.size();
    c.slope = 0.0;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t k = n / 2; k < n; ++k) {
            if (!(c.value[k] > 0.0) || !std::isfinite(c.value[k]) || !(c.x[k] > 0.0)) continue;
            const double lx = std::log(c.x[k]), ly = std::log(c.value[k]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        const double den = cnt * sxx - sx * sx;
        if (cnt >= 2 && den > 0.0) c.slope = (cnt * sxy - sx * sy) / den;
    }
    c.verdict = Verdict::inconclusive;
    if (n < 3) return;
    const double a = c.value[n - 3], b = c.value[n - 2], d = c.value[n - 1];
    if (decreasing_step(a, b) && decreasing_step(b, d) && c.ci_hi[n - 1] < th.zero_ci) {
        c.verdict = Verdict::converging_to_zero;
    } else if (c.slope > th.diverge_slope && a < b && b < d) {
        c.verdict = Verdict::diverging;
    } else if (c.ci_lo[n - 1] > th.positive_ci) {
        c.verdict = Verdict::converging_to_positive;
    }
}

std::vector<DiagnosticCurve> check_ds1(const JointRiskModel& m, const ScalingFunction& h, double t,
                                       const std::vector<double>& x_grid, const SimulationPlan& plan,
                                       const DiagnosticOptions& opts) {
    require_valid(m);
    check_grid(x_grid);
    if (!(t > 0.0)) throw DomainError("check_ds1 requires t > 0");
    const std::size_t n = m.dimension();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                pairs.emplace_back(i, j);
                labels.push_back("ds1 i=" + std::to_string(i + 1) + " j=" + std::to_string(j + 1) + " t=" + fmt(t));
            }
    std::vector<double> th;
    for (double x : x_grid) th.push_back(t * h(x));

    if (!opts.force_mc) {
        if (auto den = max_bounds(m, x_grid)) {
            std::vector<DiagnosticCurve> out;
            bool ok = true;
            for (std::size_t p = 0; p < pairs.size() && ok; ++p) {
                std::vector<double> num;
                for (std::size_t k = 0; k < x_grid.size(); ++k) {
                    auto v = m.pairwise_joint_survival(pairs[p].first, pairs[p].second, th[k], x_grid[k]);
                    if (!v) {
                        ok = false;
                        break;
                    }
                    num.push_back(*v);
                }
                if (ok) out.push_back(deterministic_curve(labels[p], x_grid, num, *den, opts.thresholds));
            }
            if (ok) return out;
        }
    }
    auto counts = count_events(m, x_grid, pairs.size(), plan,
                               [&](std::span<const double> x, std::size_t k, std::vector<char>& f) {
                                   for (std::size_t p = 0; p < pairs.size(); ++p)
                                       f[p] = std::abs(x[pairs[p].first]) > th[k] && x[pairs[p].second] > x_grid[k];
                               });
    return curves_from_counts(counts, x_grid, labels, plan, opts.thresholds);
}

Ds2Report check_ds2(const JointRiskModel& m, const ScalingFunction& h, const std::vector<double>& L_grid,
                    const std::vector<double>& x_grid, const SimulationPlan& plan, const DiagnosticOptions& opts) {
    require_valid(m);
    check_grid(x_grid);
    if (L_grid.empty()) throw DomainError("check_ds2 needs a nonempty L grid");
    for (double L : L_grid)
        if (!(L > 0.0)) throw DomainError("check_ds2 requires L > 0");
    const std::size_t n = m.dimension();
    struct Key {
        std::size_t i, j, l;
    };
    std::vector<Key> keys;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t l = 0; l < L_grid.size(); ++l) {
                keys.push_back({i, j, l});
                labels.push_back("ds2 i=" + std::to_string(i + 1) + " j=" + std::to_string(j + 1) +
                                 " L=" + fmt(L_grid[l]));
            }
    std::vector<double> hx;
    for (double x : x_grid) hx.push_back(h(x));

    Ds2Report rep;
    rep.L = L_grid;
    bool done = false;
    if (!opts.force_mc) {
        if (auto den = max_bounds(m, x_grid)) {
            bool ok = true;
            for (std::size_t p = 0; p < keys.size() && ok; ++p) {
                std::vector<double> num;
                for (std::size_t k = 0; k < x_grid.size(); ++k) {
                    const double thr = L_grid[keys[p].l] * hx[k];
                    auto v = m.pairwise_joint_survival(keys[p].i, keys[p].j, thr, thr);
                    if (!v) {
                        ok = false;
                        break;
                    }
                    num.push_back(*v);
                }
                if (ok) rep.curves.push_back(deterministic_curve(labels[p], x_grid, num, *den, opts.thresholds));
            }
            done = ok;
            if (!ok) rep.curves.clear();
        }
    }
    if (!done) {
        auto counts = count_events(m, x_grid, keys.size(), plan,
                                   [&](std::span<const double> x, std::size_t k, std::vector<char>& f) {
                                       for (std::size_t p = 0; p < keys.size(); ++p) {
                                           const double thr = L_grid[keys[p].l] * hx[k];
                                           f[p] = x[keys[p].i] > thr && x[keys[p].j] > thr;
                                       }
                                   });
        rep.curves = curves_from_counts(counts, x_grid, labels, plan, opts.thresholds);
    }
    rep.pass = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool some = false;
            for (std::size_t p = 0; p < keys.size(); ++p)
                if (keys[p].i == i && keys[p].j == j && rep.curves[p].verdict == Verdict::converging_to_zero)
                    some = true;
            rep.pass = rep.pass && some;
        }
    return rep;
}

std::vector<DiagnosticCurve> check_v1(const JointRiskModel& m, const std::vector<double>& x_grid,
                                      const SimulationPlan& plan, const DiagnosticOptions& opts) {
    require_valid(m);
    check_grid(x_grid);
    const std::size_t n = m.dimension();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
            labels.push_back("v1 i=" + std::to_string(i + 1) + " j=" + std::to_string(j + 1));
        }
    if (!opts.force_mc) {
        if (auto den = max_bounds(m, x_grid)) {
            std::vector<DiagnosticCurve> out;
            bool ok = true;
            for (std::size_t p = 0; p < pairs.size() && ok; ++p) {
                std::vector<double> num;
                for (double x : x_grid) {
                    auto v = m.pairwise_joint_survival(pairs[p].first, pairs[p].second, x, x);
                    if (!v) {
                        ok = false;
                        break;
                    }
                    num.push_back(*v);
                }
                if (ok) out.push_back(deterministic_curve(labels[p], x_grid, num, *den, opts.thresholds));
            }
            if (ok) return out;
        }
    }
    auto counts = count_events(m, x_grid, pairs.size(), plan,
                               [&](std::span<const double> x, std::size_t k, std::vector<char>& f) {
                                   for (std::size_t p = 0; p < pairs.size(); ++p)
                                       f[p] = x[pairs[p].first] > x_grid[k] && x[pairs[p].second] > x_grid[k];
                               });
    return curves_from_counts(counts, x_grid, labels, plan, opts.thresholds);
}

DiagnosticCurve check_conditional_smallness(const JointRiskModel& m, const ScalingFunction& h, std::size_t k,
                                            double t, const std::vector<double>& x_grid,
                                            const SimulationPlan& plan, const DiagnosticOptions& opts) {
    require_valid(m);
    check_grid(x_grid);
    const std::size_t n = m.dimension();
    if (k < 1 || k + 1 > n) throw DomainError("check_conditional_smallness requires 1 <= k <= n - 1");
    if (!(t > 0.0)) throw DomainError("check_conditional_smallness requires t > 0");
    std::vector<double> th;
    for (double x : x_grid) th.push_back(t * h(x));
    auto counts = count_events(m, x_grid, 1, plan, [&](std::span<const double> x, std::size_t g, std::vector<char>& f) {
        thread_local std::vector<double> sorted;
        sorted.assign(x.begin(), x.end());
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
        const double mx = *std::max_element(x.begin(), x.end());
        f[0] = mx > x_grid[g] && std::abs(sorted[k - 1]) > th[g];
    });
    auto curves = curves_from_counts(counts, x_grid,
                                     {"conditional k=" + std::to_string(k) + " t=" + fmt(t)}, plan, opts.thresholds);
    return curves.front();
}

HPropertyReport check_h_properties(const std::function<double(double)>& log_tail, const ScalingFunction& h,
                                   const std::vector<double>& y_grid, const std::vector<double>& x_grid) {
    check_grid(x_grid);
    if (y_grid.empty()) throw DomainError("check_h_properties needs a nonempty y grid");
    HPropertyReport r;
    r.little_o.name = "h(x)/x -> 0";
    r.insensitive.name = "F(x+yh(x))/F(x) -> 1";
    r.weakly_sn.name = "h(x+yh(x))/h(x) bounded";
    r.self_neglecting.name = "h(x+yh(x))/h(x) -> 1";
    r.gmda.name = "F(x+yh(x))/F(x) -> exp(-y)";
    for (PropertyCheck* p : {&r.little_o, &r.insensitive, &r.weakly_sn, &r.self_neglecting, &r.gmda}) p->x = x_grid;

    for (double x : x_grid) {
        const double hx = h(x);
        const double base = log_tail(x);
        double dev_ins = 0.0, dev_sn = 0.0, dev_g = 0.0, worst_ratio = 0.0;
        for (double y : y_grid) {
            const double z = x + y * hx;
            double tail_ratio = 0.0, h_ratio = kInf;
            if (h.in_domain(z) && z > 0.0) {
                tail_ratio = std::exp(log_tail(z) - base);
                h_ratio = h(z) / hx;
            }
            dev_ins = std::max(dev_ins, std::abs(tail_ratio - 1.0));
            dev_g = std::max(dev_g, std::abs(tail_ratio - std::exp(-y)));
            dev_sn = std::max(dev_sn, std::abs(h_ratio - 1.0));
            worst_ratio = std::max(worst_ratio, h_ratio);
        }
        r.little_o.deviation.push_back(hx / x);
        r.insensitive.deviation.push_back(dev_ins);
        r.self_neglecting.deviation.push_back(dev_sn);
        r.gmda.deviation.push_back(dev_g);
        r.weakly_sn.deviation.push_back(worst_ratio);
    }
    auto trend = [](const std::vector<double>& d) {
        if (std::all_of(d.begin(), d.end(), [](double v) { return v <= 1e-9; })) return true;
        const std::size_t n = d.size();
        if (n < 3) return false;
        return d[n - 3] > d[n - 2] && d[n - 2] > d[n - 1] && d[n - 1] <= 0.5 * d.front();
    };
    r.little_o.pass = trend(r.little_o.deviation);
    r.insensitive.pass = trend(r.insensitive.deviation);
    r.self_neglecting.pass = trend(r.self_neglecting.deviation);
    r.gmda.pass = trend(r.gmda.deviation);
    r.weakly_sn.pass = std::all_of(r.weakly_sn.deviation.begin(), r.weakly_sn.deviation.end(),
                                   [](double v) { return v <= 1e3; });
    return r;
}

std::function<double(double)> max_log_tail(const JointRiskModel& m, bool* deterministic) {
    require_valid(m);
    const bool det = m.max_tail(m.marginal(0).quantile(0.5)).has_value();
    if (deterministic) *deterministic = det;
    if (det) {
        return [&m](double x) {
            const auto b = *m.max_tail(x);
            const double mid = 0.5 * (std::max(0.0, b.lo) + b.hi);
            return mid > 0.0 ? std::log(mid) : -kInf;
        };
    }
    return [&m](double x) {
        std::vector<double> ls;
        for (const auto& mg : m.marginals()) ls.push_back(mg.log_survival(x));
        return log_sum_exp(ls);
    };
}

std::vector<double> level_grid(const std::function<double(double)>& log_tail, const std::vector<double>& levels,
                               double start) {
    std::vector<double> out;
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) throw DomainError("tail level must lie in (0, 1)");
        out.push_back(solve_decreasing_log([&](double x) { return log_tail(x); }, std::log(level), start));
    }
    std::sort(out.begin(), out.end());
    return out;
}

AssumptionReport assumption_report(const JointRiskModel& m, const std::vector<ScalingFunction>& candidates,
                                   const AssumptionOptions& opts) {
    require_valid(m);
    if (candidates.empty()) throw DomainError("assumption_report needs at least one candidate scaling function");
    AssumptionReport rep;
    auto log_tail = max_log_tail(m, &rep.deterministic);
    const bool det = rep.deterministic && !opts.diag.force_mc;
    const double start = m.marginal(0).quantile(0.5);

    std::vector<double> levels;
    if (det) {
        for (int e = 2; e <= 12; ++e) levels.push_back(std::pow(10.0, -e));
    } else {
        for (double e = 2.0; e <= 4.0 + 1e-12; e += 0.5) levels.push_back(std::pow(10.0, -e));
    }
    rep.x_grid = level_grid(log_tail, levels, start);
    std::vector<double> deep;
    for (int e = 2; e <= 30; e += 4) deep.push_back(std::pow(10.0, -e));
    rep.property_grid = level_grid(log_tail, deep, start);

    rep.v1 = check_v1(m, rep.x_grid, opts.plan, opts.diag);
    rep.v1_pass = std::all_of(rep.v1.begin(), rep.v1.end(),
                              [](const DiagnosticCurve& c) { return c.verdict == Verdict::converging_to_zero; });
    if (rep.v1_pass) {
        std::vector<ClassTags> tags;
        for (const auto& mg : m.marginals()) tags.push_back(mg.tags());
        rep.max_tags = ClassTags::intersect(tags);
        rep.tags_inherited = true;
    }

    for (const auto& h : candidates) {
        CandidateReport c{h, {}, {}, {}};
        for (double x : rep.x_grid)
            if (!h.in_domain(x)) throw DomainError("candidate " + h.describe() + " undefined on the diagnostic grid");
        c.ds1_pass = true;
        for (double t : opts.t_values) {
            auto curves = check_ds1(m, h, t, rep.x_grid, opts.plan, opts.diag);
            for (auto& cv : curves) {
                if (cv.verdict != Verdict::converging_to_zero) c.ds1_pass = false;
                c.ds1.push_back(std::move(cv));
            }
        }
        c.ds2 = check_ds2(m, h, opts.L_values, rep.x_grid, opts.plan, opts.diag);
        c.properties = check_h_properties(log_tail, h, opts.y_values, rep.property_grid);

        const ClassTags& tg = rep.max_tags;
        const bool gumbel_tag = !rep.tags_inherited || tg.gumbel;
        c.gmda = c.properties.gmda.pass && gumbel_tag;
        c.A = c.gmda && c.ds1_pass && c.ds2.pass;
        c.B = rep.tags_inherited && tg.long_tailed && c.properties.in_h_class() && c.ds1_pass && c.ds2.pass;
        c.C = rep.tags_inherited && tg.long_tailed && tg.dominated && h.dominatedly_varying() &&
              c.properties.in_h_class() && c.ds1_pass;
        rep.A = rep.A || c.A;
        rep.B = rep.B || c.B;
        rep.C = rep.C || c.C;
        rep.candidates.push_back(std::move(c));
    }
    std::vector<std::string> parts;
    if (rep.A) parts.emplace_back("A");
    if (rep.B) parts.emplace_back("B");
    if (rep.C) parts.emplace_back("C");
    if (parts.empty()) {
        rep.summary = "none supported";
    } else {
        for (std::size_t i = 0; i < parts.size(); ++i) rep.summary += (i ? "," : "") + parts[i];
    }
    return rep;
}

}  // namespace ordertail
