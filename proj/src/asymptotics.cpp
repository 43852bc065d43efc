#include "ordertail/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordertail/errors.hpp"
#include "ordertail/numerics.hpp"

namespace ordertail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tail_sum(const JointRiskModel& m, double x) {
    double s = 0.0;
    for (const auto& mg : m.marginals()) s += mg.survival(x);
    return s;
}

void require_valid(const JointRiskModel& m) {
    if (!m.validation()) throw ValidationError("invalid model: " + m.validation().violation);
}

}  // namespace

FixedWeights FixedWeights::tight(std::vector<double> c) {
    WeightBox box{c.empty() ? 1.0 : c[0], c.empty() ? 1.0 : c[0], 0.0, false};
    for (std::size_t i = 1; i < c.size(); ++i) {
        box.d = std::max(box.d, std::abs(c[i]));
        if (c[i] < 0.0) box.signed_rest = true;
    }
    return {std::move(c), box};
}

std::size_t weight_dimension(const WeightSpec& w) {
    if (const auto* f = std::get_if<FixedWeights>(&w)) return f->c.size();
    return std::get<RandomWeights>(w).rest.size() + 1;
}

std::optional<std::string> check_weights(const WeightSpec& w, std::size_t n, bool nonnegative_risks) {
    if (weight_dimension(w) != n) return "weight vector length does not match the dimension";
    auto check_rest = [&](const std::vector<double>& rest, double d, bool allow_signed)
        -> std::optional<std::string> {
        if (!(d >= 0.0)) return "weight bound d must be nonnegative";
        if (allow_signed && !nonnegative_risks)
            return "signed weights require nonnegative risks";
        for (double c : rest) {
            const double lo = allow_signed ? -d : 0.0;
            if (!(c >= lo - 1e-15 && c <= d + 1e-15)) return "weight outside its box";
        }
        return std::nullopt;
    };
    if (const auto* f = std::get_if<FixedWeights>(&w)) {
        if (!(f->box.a > 0.0)) return "c0 lower bound a must be positive";
        if (!(f->box.b >= f->box.a)) return "c0 box requires b >= a";
        if (!(f->c[0] >= f->box.a && f->c[0] <= f->box.b)) return "c0 outside [a, b]";
        return check_rest({f->c.begin() + 1, f->c.end()}, f->box.d, f->box.signed_rest);
    }
    const auto& r = std::get<RandomWeights>(w);
    if (auto err = r.c0.check()) return "c0 law: " + *err;
    if (!(r.c0.lower() > 0.0)) return "c0 law must be bounded away from zero";
    bool any_negative = std::any_of(r.rest.begin(), r.rest.end(), [](double c) { return c < 0.0; });
    return check_rest(r.rest, r.d, any_negative);
}

double approx_tail(const JointRiskModel& m, double c0, double x) {
    require_valid(m);
    if (!(c0 > 0.0)) throw DomainError("approx_tail requires c0 > 0");
    return tail_sum(m, x / c0);
}

double approx_tail(const JointRiskModel& m, const FixedWeights& w, double x) {
    return approx_tail(m, w.c.at(0), x);
}

double approx_tail_random_weights(const JointRiskModel& m, const RandomWeights& w, double x) {
    require_valid(m);
    if (auto err = w.c0.check()) throw ValidationError("c0 law: " + *err);
    if (!(w.c0.lower() > 0.0)) throw ValidationError("c0 law must be bounded away from zero");
    if (w.c0.is_atomic()) {
        double total = 0.0;
        for (const auto& at : w.c0.atom_list())
            if (at.prob > 0.0) total += at.prob * tail_sum(m, x / at.value);
        return total;
    }
    QuadratureOptions opts;
    opts.abs_tol = 1e-16;
    opts.rel_tol = 1e-12;
    auto f = [&](double u) { return tail_sum(m, x / w.c0.quantile(u)); };
    return integrate(f, 0.0, 1.0, opts).value;
}

double approx_tail(const JointRiskModel& m, const WeightSpec& w, double x) {
    if (const auto* f = std::get_if<FixedWeights>(&w)) return approx_tail(m, *f, x);
    return approx_tail_random_weights(m, std::get<RandomWeights>(w), x);
}

double asymptotic_var(const JointRiskModel& m, double q, double c0) {
    require_valid(m);
    if (!(q > 0.0 && q < 1.0)) throw DomainError("asymptotic_var requires q in (0, 1)");
    if (!(c0 > 0.0)) throw DomainError("asymptotic_var requires c0 > 0");
    const double start = c0 * m.marginal(0).quantile(0.5);
    try {
        return solve_decreasing_log([&](double x) { return tail_sum(m, x / c0); }, 1.0 - q, start);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("asymptotic_var: level not bracketable: ") + e.what());
    }
}

CteBounds cte_bounds(const JointRiskModel& m, const std::vector<std::size_t>& omega,
                     const std::vector<double>& x_grid, double convergence_tol) {
    require_valid(m);
    if (x_grid.size() < 8) throw DomainError("cte_bounds needs a grid of at least 8 points");
    if (omega.empty()) throw DomainError("cte_bounds needs a nonempty index set");
    for (std::size_t i : omega)
        if (i >= m.dimension()) throw DomainError("cte_bounds index out of range");
    if (!std::is_sorted(x_grid.begin(), x_grid.end()) ||
        std::adjacent_find(x_grid.begin(), x_grid.end()) != x_grid.end())
        throw DomainError("cte_bounds grid must be strictly increasing");

    CteBounds out;
    out.x = x_grid;
    std::vector<bool> in_omega(m.dimension(), false);
    for (std::size_t i : omega) in_omega[i] = true;
    for (double x : x_grid) {
        std::vector<double> part, all;
        for (std::size_t i = 0; i < m.dimension(); ++i) {
            const double ls = m.marginal(i).log_survival(x);
            all.push_back(ls);
            if (in_omega[i]) part.push_back(ls);
        }
        const double den = log_sum_exp(all);
        if (den == -kInf) throw DomainError("cte_bounds grid beyond the numeric range of the tails");
        out.ratio.push_back(std::min(1.0, std::exp(log_sum_exp(part) - den)));
    }
    out.tail_start = x_grid.size() / 2;
    const auto first = out.ratio.begin() + static_cast<std::ptrdiff_t>(out.tail_start);
    out.u = *std::min_element(first, out.ratio.end());
    out.U = *std::max_element(first, out.ratio.end());
    const auto last3 = out.ratio.end() - 3;
    const auto [lo, hi] = std::minmax_element(last3, out.ratio.end());
    out.converging = (*hi - *lo) < convergence_tol;
    return out;
}

double davis_resnick_threshold(const Marginal& m) { return m.quantile(1.0 - 1e-6); }

DavisResnickReport davis_resnick_check(const Marginal& m, const ScalingFunction& h, double epsilon,
                                       double x, const std::vector<double>& s_grid) {
    if (!(epsilon > 0.0)) throw DomainError("davis_resnick_check requires epsilon > 0");
    DavisResnickReport rep{x, epsilon, {}, true};
    const double hx = h(x);
    const double base = m.log_survival(x);
    for (double s : s_grid) {
        if (s < 0.0) throw DomainError("davis_resnick_check requires s >= 0");
        const double lhs = std::exp(m.log_survival(x + hx * s) - base);
        const double rhs = (1.0 + epsilon) * std::exp(-std::log1p(epsilon * s) / epsilon);
        rep.points.push_back({s, lhs, rhs, rhs - lhs});
        if (!(rhs - lhs > 0.0)) rep.all_positive = false;
    }
    return rep;
}

double independent_pair_sum_tail(const Marginal& first, const Marginal& second, double x) {
    if (!(x > 0.0)) return 1.0;
    const double head = first.survival(x);
    // Lowest point worth integrating from: below it the first law has
    // negligible mass.
    const double y_lo = first.quantile(1e-17);
    if (!(y_lo < x)) return head;
    const double s_lo = std::log(y_lo);
    const double s_hi = std::log(x);
    auto f = [&](double s) {
        const double y = std::exp(s);
        const double log_w = first.log_density(y) + s;
        if (log_w == -kInf) return 0.0;
        return std::exp(log_w) * second.survival(x - y);
    };
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-16 * (head + second.survival(x));
    double total = head;
    std::vector<double> cuts{s_lo};
    for (double c : {std::log(x / 2.0), std::log(x) - 1e-3})
        if (c > cuts.back() && c < s_hi) cuts.push_back(c);
    cuts.push_back(s_hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += integrate(f, cuts[k], cuts[k + 1], opts).value;
    return total;
}

}  // namespace ordertail
