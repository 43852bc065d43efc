#include "ordertail/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "ordertail/errors.hpp"

namespace ordertail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

// P(B > u) for B ~ Beta(a, b), with closed forms where one shape is 1.
double beta_survival(double a, double b, double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    if (a == 1.0 && b == 1.0) return 1.0 - u;
    if (a == 1.0) return std::pow(1.0 - u, b);
    if (b == 1.0) return -std::expm1(a * std::log(u));
    return boost::math::ibetac(a, b, u);
}

double beta_quantile(double a, double b, double u) {
    if (a == 1.0 && b == 1.0) return u;
    if (a == 1.0) return -std::expm1(std::log1p(-u) / b);
    if (b == 1.0) return std::pow(u, 1.0 / a);
    return boost::math::ibeta_inv(a, b, u);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundedLaw
// ---------------------------------------------------------------------------

BoundedLaw BoundedLaw::atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& l, const Atom& r) { return l.value < r.value; });
    return BoundedLaw(std::move(atoms));
}

BoundedLaw BoundedLaw::scaled_beta(double a, double b, double lo, double hi) {
    return BoundedLaw(ScaledBeta{a, b, lo, hi});
}

bool BoundedLaw::is_degenerate() const {
    if (!is_atomic()) return false;
    const auto& list = atom_list();
    return std::count_if(list.begin(), list.end(), [](const Atom& at) { return at.prob > 0.0; }) == 1;
}

double BoundedLaw::lower() const {
    if (is_atomic()) {
        for (const auto& at : atom_list())
            if (at.prob > 0.0) return at.value;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return beta().lo;
}

double BoundedLaw::upper() const {
    if (is_atomic()) {
        const auto& list = atom_list();
        for (auto it = list.rbegin(); it != list.rend(); ++it)
            if (it->prob > 0.0) return it->value;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return beta().hi;
}

std::optional<std::string> BoundedLaw::check() const {
    if (is_atomic()) {
        const auto& list = atom_list();
        if (list.empty()) return "law has no atoms";
        double total = 0.0;
        for (const auto& at : list) {
            if (!std::isfinite(at.value)) return "atom value is not finite";
            if (!(at.prob >= 0.0)) return "atom probability is negative";
            total += at.prob;
        }
        if (std::abs(total - 1.0) > 1e-12) return "atom probabilities do not sum to 1";
        return std::nullopt;
    }
    const auto& sb = beta();
    if (!(sb.a > 0.0) || !(sb.b > 0.0)) return "beta shapes must be positive";
    if (!std::isfinite(sb.lo) || !std::isfinite(sb.hi) || !(sb.hi > sb.lo))
        return "beta support must be a finite interval with hi > lo";
    return std::nullopt;
}

double BoundedLaw::sample(Stream& rng) const {
    if (is_atomic()) return quantile(rng.uniform());
    const auto& sb = beta();
    double u;
    if (sb.a == 1.0 || sb.b == 1.0) {
        u = beta_quantile(sb.a, sb.b, rng.uniform());
    } else {
        const double ga = rng.gamma(sb.a);
        const double gb = rng.gamma(sb.b);
        u = ga / (ga + gb);
    }
    return sb.lo + (sb.hi - sb.lo) * u;
}

double BoundedLaw::quantile(double u) const {
    if (is_atomic()) {
        double cum = 0.0;
        const auto& list = atom_list();
        for (const auto& at : list) {
            cum += at.prob;
            if (at.prob > 0.0 && cum >= u) return at.value;
        }
        return upper();
    }
    const auto& sb = beta();
    return sb.lo + (sb.hi - sb.lo) * beta_quantile(sb.a, sb.b, u);
}

double BoundedLaw::survival(double w) const {
    if (is_atomic()) {
        double s = 0.0;
        for (const auto& at : atom_list())
            if (at.value > w) s += at.prob;
        return s;
    }
    const auto& sb = beta();
    return beta_survival(sb.a, sb.b, (w - sb.lo) / (sb.hi - sb.lo));
}

BoundedLaw BoundedLaw::scaled(double factor) const {
    if (is_atomic()) {
        auto list = atom_list();
        for (auto& at : list) at.value /= factor;
        return atoms(std::move(list));
    }
    const auto& sb = beta();
    return scaled_beta(sb.a, sb.b, sb.lo / factor, sb.hi / factor);
}

// ---------------------------------------------------------------------------
// ScalingFunction
// ---------------------------------------------------------------------------

ScalingFunction ScalingFunction::constant(double c) {
    require(c > 0.0 && std::isfinite(c), "constant scaling requires c > 0");
    return ScalingFunction(Constant{c});
}

ScalingFunction ScalingFunction::power(double coef, double exponent) {
    require(coef > 0.0, "power scaling requires coef > 0");
    require(exponent > 0.0 && exponent < 1.0, "power scaling requires exponent in (0, 1)");
    return ScalingFunction(Power{coef, exponent});
}

ScalingFunction ScalingFunction::lognormal_type(double sigma, double mu) {
    require(sigma > 0.0, "lognormal scaling requires sigma > 0");
    require(std::isfinite(mu), "lognormal scaling requires finite mu");
    return ScalingFunction(LognormalType{sigma, mu});
}

ScalingFunction ScalingFunction::weibull_type(double rate, double shape) {
    require(rate > 0.0, "weibull scaling requires rate > 0");
    require(shape > 0.0 && shape < 1.0, "weibull scaling requires shape in (0, 1)");
    return ScalingFunction(WeibullType{rate, shape});
}

ScalingFunction ScalingFunction::power_of(const ScalingFunction& base, double p) {
    require(!std::holds_alternative<PowerOf>(base.form_), "power_of nests at most once");
    require(p > 0.0 && p < 1.0, "power_of requires p in (0, 1)");
    return ScalingFunction(PowerOf{std::make_shared<const ScalingFunction>(base), p});
}

double ScalingFunction::domain_lower() const {
    return std::visit(Overloaded{
                          [](const LognormalType& f) { return std::exp(f.mu); },
                          [](const PowerOf& f) { return f.base->domain_lower(); },
                          [](const auto&) { return 0.0; },
                      },
                      form_);
}

double ScalingFunction::operator()(double x) const {
    if (!in_domain(x) || std::isnan(x)) {
        throw DomainError("scaling function evaluated outside its domain at x = " + fmt(x));
    }
    return std::visit(Overloaded{
                          [](const Constant& f) { return f.c; },
                          [x](const Power& f) { return f.coef * std::pow(x, f.exponent); },
                          [x](const LognormalType& f) {
                              return f.sigma * f.sigma * x / (std::log(x) - f.mu);
                          },
                          [x](const WeibullType& f) {
                              return std::pow(x, 1.0 - f.shape) / (f.rate * f.shape);
                          },
                          [x](const PowerOf& f) { return std::pow((*f.base)(x), f.p); },
                      },
                      form_);
}

std::string ScalingFunction::describe() const {
    return std::visit(Overloaded{
                          [](const Constant& f) { return "constant(" + fmt(f.c) + ")"; },
                          [](const Power& f) {
                              return "power(" + fmt(f.coef) + "," + fmt(f.exponent) + ")";
                          },
                          [](const LognormalType& f) {
                              return "lognormal(" + fmt(f.sigma) + "," + fmt(f.mu) + ")";
                          },
                          [](const WeibullType& f) {
                              return "weibull(" + fmt(f.rate) + "," + fmt(f.shape) + ")";
                          },
                          [](const PowerOf& f) {
                              return "power_of(" + f.base->describe() + "," + fmt(f.p) + ")";
                          },
                      },
                      form_);
}

double scaling_eval(const ScalingFunction& h, double x) { return h(x); }

// ---------------------------------------------------------------------------
// ClassTags
// ---------------------------------------------------------------------------

ClassTags ClassTags::intersect(const std::vector<ClassTags>& all) {
    if (all.empty()) return {};
    ClassTags out = all.front();
    for (const auto& t : all) {
        out.long_tailed = out.long_tailed && t.long_tailed;
        out.dominated = out.dominated && t.dominated;
        out.gumbel = out.gumbel && t.gumbel;
        out.regularly_varying = out.regularly_varying && t.regularly_varying &&
                                std::abs(t.alpha - out.alpha) <= 1e-12 * out.alpha;
    }
    if (!out.regularly_varying) out.alpha = 0.0;
    return out;
}

std::string ClassTags::describe() const {
    std::string s;
    auto add = [&s](const std::string& t) { s += (s.empty() ? "" : ",") + t; };
    if (long_tailed) add("L");
    if (dominated) add("D");
    if (regularly_varying) add("R_minus_" + fmt(alpha));
    if (gumbel) add("GMDA");
    return s;
}

// ---------------------------------------------------------------------------
// Marginal
// ---------------------------------------------------------------------------

Marginal::Marginal(MarginalParams params, QuadratureOptions quad)
    : params_(std::move(params)), quad_(quad) {
    std::visit(Overloaded{
                   [](const Exponential& p) {
                       require(p.rate > 0.0 && std::isfinite(p.rate), "exponential rate must be > 0");
                   },
                   [](const Pareto& p) {
                       require(p.alpha > 0.0 && std::isfinite(p.alpha), "pareto alpha must be > 0");
                       require(p.xmin > 0.0 && std::isfinite(p.xmin), "pareto xmin must be > 0");
                   },
                   [](const Lognormal& p) {
                       require(std::isfinite(p.mu), "lognormal mu must be finite");
                       require(p.sigma > 0.0 && std::isfinite(p.sigma), "lognormal sigma must be > 0");
                   },
                   [](const HeavyWeibull& p) {
                       require(p.rate > 0.0 && std::isfinite(p.rate), "weibull rate must be > 0");
                       require(p.shape > 0.0 && p.shape < 1.0, "weibull shape must be in (0, 1)");
                   },
                   [this](const RandomizedLognormal& p) {
                       require(std::isfinite(p.mu), "randomized lognormal mu must be finite");
                       require(p.sigma > 0.0 && std::isfinite(p.sigma),
                               "randomized lognormal sigma must be > 0");
                       if (auto err = p.w.check()) throw DomainError("w law: " + *err);
                       require(p.w.lower() >= 0.0, "w law must be nonnegative");
                       const double upper = p.w.upper();
                       require(upper > 0.0, "w law needs a positive upper endpoint");
                       // exp(W Y) = exp((W / w_upper)(w_upper Y)).
                       norm_mu_ = upper * p.mu;
                       norm_sigma_ = upper * p.sigma;
                       norm_w_ = p.w.scaled(upper);
                   },
               },
               params_);
}

std::string Marginal::family_name() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Pareto&) { return std::string("pareto"); },
                          [](const Lognormal&) { return std::string("lognormal"); },
                          [](const HeavyWeibull&) { return std::string("weibull"); },
                          [](const RandomizedLognormal&) { return std::string("randomized_lognormal"); },
                      },
                      params_);
}

std::string Marginal::describe() const {
    return std::visit(
        Overloaded{
            [](const Exponential& p) { return "exponential(rate=" + fmt(p.rate) + ")"; },
            [](const Pareto& p) { return "pareto(alpha=" + fmt(p.alpha) + ",xmin=" + fmt(p.xmin) + ")"; },
            [](const Lognormal& p) { return "lognormal(mu=" + fmt(p.mu) + ",sigma=" + fmt(p.sigma) + ")"; },
            [](const HeavyWeibull& p) {
                return "weibull(rate=" + fmt(p.rate) + ",shape=" + fmt(p.shape) + ")";
            },
            [](const RandomizedLognormal& p) {
                return "randomized_lognormal(mu=" + fmt(p.mu) + ",sigma=" + fmt(p.sigma) +
                       ",w_upper=" + fmt(p.w.upper()) + ")";
            },
        },
        params_);
}

ClassTags Marginal::tags() const {
    ClassTags t;
    std::visit(Overloaded{
                   [&t](const Exponential&) { t.gumbel = true; },
                   [&t](const Pareto& p) {
                       t.long_tailed = true;
                       t.dominated = true;
                       t.regularly_varying = true;
                       t.alpha = p.alpha;
                   },
                   [&t](const Lognormal&) {
                       t.long_tailed = true;
                       t.gumbel = true;
                   },
                   [&t](const HeavyWeibull&) {
                       t.long_tailed = true;
                       t.gumbel = true;
                   },
                   [&t](const RandomizedLognormal& p) {
                       t.long_tailed = true;
                       // A degenerate W is an ordinary lognormal.
                       t.gumbel = p.w.is_degenerate();
                   },
               },
               params_);
    return t;
}

TailValue Marginal::tail(double x) const {
    if (std::isnan(x)) throw DomainError("tail evaluated at NaN");
    return std::visit(
        Overloaded{
            [x](const Exponential& p) -> TailValue {
                if (x <= 0.0) return {1.0, 0.0};
                const double ls = -p.rate * x;
                return {std::exp(ls), ls};
            },
            [x](const Pareto& p) -> TailValue {
                if (x <= p.xmin) return {1.0, 0.0};
                const double ls = -p.alpha * (std::log(x) - std::log(p.xmin));
                return {std::exp(ls), ls};
            },
            [x](const Lognormal& p) -> TailValue {
                if (x <= 0.0) return {1.0, 0.0};
                const double z = (std::log(x) - p.mu) / p.sigma;
                const double ls = log_normal_tail(z);
                return {z <= 8.0 ? normal_tail(z) : std::exp(ls), ls};
            },
            [x](const HeavyWeibull& p) -> TailValue {
                if (x <= 0.0) return {1.0, 0.0};
                const double ls = -p.rate * std::pow(x, p.shape);
                return {std::exp(ls), ls};
            },
            [this, x](const RandomizedLognormal&) -> TailValue {
                if (x <= 0.0) return {1.0, 0.0};
                return randomized_tail(std::log(x));
            },
        },
        params_);
}

TailValue Marginal::randomized_tail(double log_x) const {
    const WSpec& w = *norm_w_;
    const double mu = norm_mu_;
    const double sigma = norm_sigma_;

    // g(w) = P(w Y > log x) for w > 0.
    auto log_g = [&](double wv) {
        if (wv <= 0.0) return log_x < 0.0 ? 0.0 : -kInf;
        return log_normal_tail((log_x / wv - mu) / sigma);
    };

    if (w.is_atomic()) {
        std::vector<double> terms;
        for (const auto& at : w.atom_list()) {
            if (at.prob <= 0.0) continue;
            terms.push_back(std::log(at.prob) + log_g(at.value));
        }
        const double ls = log_sum_exp(terms);
        return {std::exp(ls), ls};
    }

    if (log_x == 0.0) {
        const double ls = log_normal_tail(-mu / sigma);
        return {std::exp(ls), ls};
    }

    // Integration by parts against the continuous law of W on [0, 1]:
    //   P(X > x) = g(0+) + int_0^1 P(W > w) g'(w) dw,
    // with g'(w) = phi(z(w)) log x / (sigma w^2). Every term has the sign of
    // log x, so there is no cancellation in the tail.
    const double abs_log_x = std::abs(log_x);
    const double shift = log_x > 0.0 ? log_g(1.0) : 0.0;
    auto integrand = [&](double wv) {
        if (wv <= 0.0) return 0.0;
        const double surv = w.survival(wv);
        if (surv <= 0.0) return 0.0;
        const double z = (log_x / wv - mu) / sigma;
        const double lg = std::log(surv) + log_normal_pdf(z) + std::log(abs_log_x / (sigma * wv * wv));
        return std::exp(lg - shift);
    };
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, quad_);
    if (log_x > 0.0) {
        const double ls = shift + std::log(r.value);
        return {std::exp(ls), ls};
    }
    const double ls = std::log1p(-r.value);
    return {1.0 - r.value, ls};
}

double Marginal::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile requires q in (0, 1)");
    return std::visit(
        Overloaded{
            [q](const Exponential& p) { return -std::log1p(-q) / p.rate; },
            [q](const Pareto& p) { return p.xmin * std::exp(-std::log1p(-q) / p.alpha); },
            [q](const Lognormal& p) {
                const double z = q < 0.5 ? normal_quantile(q) : normal_upper_quantile(1.0 - q);
                return std::exp(p.mu + p.sigma * z);
            },
            [q](const HeavyWeibull& p) { return std::pow(-std::log1p(-q) / p.rate, 1.0 / p.shape); },
            [this, q](const RandomizedLognormal& p) {
                const double median_guess = std::exp(std::max(p.mu * p.w.upper(), 0.0));
                return solve_decreasing_log([this](double x) { return survival(x); }, 1.0 - q,
                                            median_guess);
            },
        },
        params_);
}

double Marginal::sample(Stream& rng) const {
    return std::visit(
        Overloaded{
            [&rng](const Exponential& p) { return -std::log(rng.uniform()) / p.rate; },
            [&rng](const Pareto& p) { return p.xmin * std::pow(rng.uniform(), -1.0 / p.alpha); },
            [&rng](const Lognormal& p) { return std::exp(p.mu + p.sigma * rng.normal()); },
            [&rng](const HeavyWeibull& p) {
                return std::pow(-std::log(rng.uniform()) / p.rate, 1.0 / p.shape);
            },
            [&rng](const RandomizedLognormal& p) {
                const double wv = p.w.sample(rng);
                return std::exp(wv * (p.mu + p.sigma * rng.normal()));
            },
        },
        params_);
}

double Marginal::log_density(double x) const {
    return std::visit(
        Overloaded{
            [x](const Exponential& p) { return x < 0.0 ? -kInf : std::log(p.rate) - p.rate * x; },
            [x](const Pareto& p) {
                if (x < p.xmin) return -kInf;
                return std::log(p.alpha) + p.alpha * std::log(p.xmin) - (p.alpha + 1.0) * std::log(x);
            },
            [x](const Lognormal& p) {
                if (x <= 0.0) return -kInf;
                const double lx = std::log(x);
                return log_normal_pdf((lx - p.mu) / p.sigma) - std::log(p.sigma) - lx;
            },
            [x](const HeavyWeibull& p) {
                if (x <= 0.0) return -kInf;
                return std::log(p.rate * p.shape) + (p.shape - 1.0) * std::log(x) -
                       p.rate * std::pow(x, p.shape);
            },
            [](const RandomizedLognormal&) -> double {
                throw DomainError("randomized lognormal has no closed-form density");
            },
        },
        params_);
}

std::optional<ScalingFunction> Marginal::gumbel_scaling() const {
    return std::visit(
        Overloaded{
            [](const Exponential& p) -> std::optional<ScalingFunction> {
                return ScalingFunction::constant(1.0 / p.rate);
            },
            [](const Pareto&) -> std::optional<ScalingFunction> { return std::nullopt; },
            [](const Lognormal& p) -> std::optional<ScalingFunction> {
                return ScalingFunction::lognormal_type(p.sigma, p.mu);
            },
            [](const HeavyWeibull& p) -> std::optional<ScalingFunction> {
                return ScalingFunction::weibull_type(p.rate, p.shape);
            },
            [this](const RandomizedLognormal&) -> std::optional<ScalingFunction> {
                return ScalingFunction::lognormal_type(norm_sigma_, norm_mu_);
            },
        },
        params_);
}

TailValue tail_eval(const Marginal& m, double x) { return m.tail(x); }
double quantile(const Marginal& m, double q) { return m.quantile(q); }
double sample_marginal(const Marginal& m, Stream& rng) { return m.sample(rng); }

}  // namespace ordertail
