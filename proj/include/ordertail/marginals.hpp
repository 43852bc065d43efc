#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ordertail/numerics.hpp"
#include "ordertail/rng.hpp"

namespace ordertail {

// ---------------------------------------------------------------------------
// Bounded laws: random variance weights W and random weights C0
// ---------------------------------------------------------------------------

/// A distribution with compact support [lower, upper]: either finitely many
/// atoms or a Beta(a, b) law affinely mapped onto [lo, hi].
class BoundedLaw {
public:
    struct Atom {
        double value;
        double prob;
    };
    struct ScaledBeta {
        double a;
        double b;
        double lo;
        double hi;
    };

    static BoundedLaw atoms(std::vector<Atom> atoms);
    static BoundedLaw point(double value) { return atoms({{value, 1.0}}); }
    static BoundedLaw scaled_beta(double a, double b, double lo, double hi);

    bool is_atomic() const { return std::holds_alternative<std::vector<Atom>>(law_); }
    bool is_degenerate() const;
    const std::vector<Atom>& atom_list() const { return std::get<std::vector<Atom>>(law_); }
    const ScaledBeta& beta() const { return std::get<ScaledBeta>(law_); }

    double lower() const;
    double upper() const;

    /// First violated constraint, or nullopt when the law is well formed.
    std::optional<std::string> check() const;

    double sample(Stream& rng) const;
    /// Generalized inverse of the CDF at u in (0, 1).
    double quantile(double u) const;
    /// P(W > w).
    double survival(double w) const;

    /// The law of W / factor.
    BoundedLaw scaled(double factor) const;

private:
    explicit BoundedLaw(std::variant<std::vector<Atom>, ScaledBeta> law) : law_(std::move(law)) {}

    std::variant<std::vector<Atom>, ScaledBeta> law_;
};

using WSpec = BoundedLaw;

// ---------------------------------------------------------------------------
// Scaling (auxiliary) functions h(x)
// ---------------------------------------------------------------------------

class ScalingFunction {
public:
    struct Constant {
        double c;
    };
    struct Power {
        double coef;
        double exponent;
    };
    /// sigma^2 x / (log x - mu), the lognormal auxiliary function.
    struct LognormalType {
        double sigma;
        double mu;
    };
    /// x^(1 - tau) / (lambda tau), the reciprocal Weibull hazard.
    struct WeibullType {
        double rate;
        double shape;
    };
    struct PowerOf {
        std::shared_ptr<const ScalingFunction> base;
        double p;
    };
    using Form = std::variant<Constant, Power, LognormalType, WeibullType, PowerOf>;

    static ScalingFunction constant(double c);
    static ScalingFunction power(double coef, double exponent);
    static ScalingFunction lognormal_type(double sigma, double mu);
    static ScalingFunction weibull_type(double rate, double shape);
    static ScalingFunction power_of(const ScalingFunction& base, double p);

    const Form& form() const { return form_; }

    /// Throws DomainError when x is outside the validity domain.
    double operator()(double x) const;
    /// Validity domain is the open ray (domain_lower(), inf).
    double domain_lower() const;
    bool in_domain(double x) const { return x > domain_lower(); }
    /// Only the power form is exposed as dominatedly varying.
    bool dominatedly_varying() const { return std::holds_alternative<Power>(form_); }
    std::string describe() const;

private:
    explicit ScalingFunction(Form f) : form_(std::move(f)) {}

    Form form_;
};

double scaling_eval(const ScalingFunction& h, double x);

// ---------------------------------------------------------------------------
// Marginal tail models
// ---------------------------------------------------------------------------

struct Exponential {
    double rate;
};
struct Pareto {
    double alpha;
    double xmin;
};
struct Lognormal {
    double mu;
    double sigma;
};
struct HeavyWeibull {
    double rate;
    double shape;
};
/// X = exp(W Y) with Y ~ N(mu, sigma^2) independent of W on [0, w_upper].
struct RandomizedLognormal {
    double mu;
    double sigma;
    WSpec w;
};

using MarginalParams = std::variant<Exponential, Pareto, Lognormal, HeavyWeibull, RandomizedLognormal>;

struct ClassTags {
    bool long_tailed = false;
    bool dominated = false;
    bool regularly_varying = false;
    double alpha = 0.0;  // meaningful when regularly_varying
    bool gumbel = false;

    /// Tags shared by all members; regular variation requires a common index.
    static ClassTags intersect(const std::vector<ClassTags>& all);
    std::string describe() const;
};

struct TailValue {
    double survival;
    double log_survival;
};

class Marginal {
public:
    /// Throws DomainError for parameters outside the family's domain.
    explicit Marginal(MarginalParams params, QuadratureOptions quad = {});

    static Marginal exponential(double rate) { return Marginal(Exponential{rate}); }
    static Marginal pareto(double alpha, double xmin) { return Marginal(Pareto{alpha, xmin}); }
    static Marginal lognormal(double mu, double sigma) { return Marginal(Lognormal{mu, sigma}); }
    static Marginal heavy_weibull(double rate, double shape) {
        return Marginal(HeavyWeibull{rate, shape});
    }
    static Marginal randomized_lognormal(double mu, double sigma, WSpec w,
                                         QuadratureOptions quad = {}) {
        return Marginal(RandomizedLognormal{mu, sigma, std::move(w)}, quad);
    }

    const MarginalParams& params() const { return params_; }
    std::string family_name() const;
    std::string describe() const;
    ClassTags tags() const;

    /// P(X > x) and its log. Throws QuadratureError for the randomized
    /// family when the mixture integral does not converge.
    TailValue tail(double x) const;
    double survival(double x) const { return tail(x).survival; }
    double log_survival(double x) const { return tail(x).log_survival; }
    double cdf(double x) const { return 1.0 - survival(x); }

    /// inf{x : P(X <= x) >= q} for q in (0, 1).
    double quantile(double q) const;
    double sample(Stream& rng) const;

    /// Log density; closed-form families only (DomainError otherwise).
    double log_density(double x) const;

    /// Every supported family lives on [0, inf).
    bool nonnegative() const { return true; }

    /// Scaling function for the Gumbel limit, when the family has one.
    std::optional<ScalingFunction> gumbel_scaling() const;

private:
    TailValue randomized_tail(double log_x) const;

    MarginalParams params_;
    QuadratureOptions quad_;
    // Randomized lognormal normalized to a unit upper endpoint for W.
    double norm_mu_ = 0.0;
    double norm_sigma_ = 1.0;
    std::optional<WSpec> norm_w_;
};

TailValue tail_eval(const Marginal& m, double x);
double quantile(const Marginal& m, double q);
double sample_marginal(const Marginal& m, Stream& rng);

}  // namespace ordertail
