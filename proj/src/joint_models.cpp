#include "ordertail/joint_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

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

ValidationReport fail(std::string why) { return {false, std::move(why)}; }

std::string idx(std::size_t i) { return std::to_string(i + 1); }

double log_survival_product(const std::vector<Marginal>& ms, double x) {
    double s = 0.0;
    for (const auto& m : ms) s += std::log1p(-m.survival(x));
    return s;
}

}  // namespace

JointRiskModel::JointRiskModel(JointSpec spec, std::size_t rejection_cap)
    : spec_(std::move(spec)), rejection_cap_(rejection_cap) {
    try {
        validate_and_build();
    } catch (const std::exception& e) {
        report_ = fail(e.what());
    }
    if (!report_.valid) marginals_.clear();
}

std::string JointRiskModel::kind() const {
    return std::visit(Overloaded{
                          [](const IndependentSpec&) { return std::string("independent"); },
                          [](const ComonotoneSpec&) { return std::string("comonotone"); },
                          [](const GaussLognormalSpec&) { return std::string("gauss_lognormal_w"); },
                          [](const FgmSpec&) { return std::string("fgm"); },
                      },
                      spec_);
}

void JointRiskModel::validate_and_build() {
    report_ = std::visit(
        Overloaded{
            [this](const IndependentSpec& s) -> ValidationReport {
                dim_ = s.marginals.size();
                if (dim_ < 1) return fail("dimension must be at least 1");
                marginals_ = s.marginals;
                return {};
            },
            [this](const ComonotoneSpec& s) -> ValidationReport {
                dim_ = s.marginals.size();
                if (dim_ < 2) return fail("dimension must be at least 2");
                marginals_ = s.marginals;
                return {};
            },
            [this](const GaussLognormalSpec& s) -> ValidationReport {
                dim_ = s.mu.size();
                if (dim_ < 2) return fail("dimension must be at least 2");
                if (s.sigma.size() != dim_ || s.w.size() != dim_)
                    return fail("mu, sigma and w must have the same length");
                if (s.rho.rows() != static_cast<Eigen::Index>(dim_) ||
                    s.rho.cols() != static_cast<Eigen::Index>(dim_))
                    return fail("rho must be n x n");
                for (std::size_t i = 0; i < dim_; ++i) {
                    if (!std::isfinite(s.mu[i])) return fail("mu_" + idx(i) + " is not finite");
                    if (!(s.sigma[i] > 0.0) || !std::isfinite(s.sigma[i]))
                        return fail("sigma_" + idx(i) + " must be positive");
                    if (std::abs(s.rho(i, i) - 1.0) > 1e-12)
                        return fail("rho_" + idx(i) + idx(i) + " must equal 1");
                    for (std::size_t j = i + 1; j < dim_; ++j) {
                        const double r = s.rho(i, j);
                        if (!std::isfinite(r) || std::abs(r - s.rho(j, i)) > 1e-12)
                            return fail("rho is not symmetric at (" + idx(i) + "," + idx(j) + ")");
                        if (!(std::abs(r) < 1.0))
                            return fail("rho_" + idx(i) + idx(j) + " must lie in (-1, 1)");
                    }
                }
                Eigen::LLT<Eigen::MatrixXd> llt(s.rho);
                if (llt.info() != Eigen::Success) return fail("rho is not positive definite");
                chol_ = llt.matrixL();
                for (std::size_t i = 0; i < dim_; ++i) {
                    if (auto err = s.w[i].check()) return fail("w_" + idx(i) + ": " + *err);
                    if (!(s.w[i].lower() >= 0.0)) return fail("w_" + idx(i) + " must be nonnegative");
                    if (!(s.w[i].upper() > 0.0))
                        return fail("w_" + idx(i) + " needs a finite positive upper endpoint");
                }
                for (std::size_t i = 0; i < dim_; ++i) {
                    const WSpec& w = s.w[i];
                    if (w.is_degenerate()) {
                        const double wv = w.upper();
                        marginals_.push_back(Marginal::lognormal(wv * s.mu[i], wv * s.sigma[i]));
                    } else {
                        marginals_.push_back(Marginal::randomized_lognormal(s.mu[i], s.sigma[i], w));
                    }
                }
                return {};
            },
            [this](const FgmSpec& s) -> ValidationReport {
                dim_ = s.marginals.size();
                if (dim_ < 2) return fail("dimension must be at least 2");
                if (dim_ > kMaxFgmDimension) return fail("FGM corner check supports n <= 20");
                double alpha = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) {
                    const auto* p = std::get_if<Pareto>(&s.marginals[i].params());
                    if (p == nullptr) return fail("FGM marginal " + idx(i) + " must be pareto");
                    if (i == 0) alpha = p->alpha;
                    if (std::abs(p->alpha - alpha) > 1e-12 * alpha)
                        return fail("FGM marginals must share a common alpha");
                }
                std::vector<std::uint32_t> seen;
                envelope_ = 1.0;
                for (const auto& t : s.terms) {
                    if (std::popcount(t.members) < 2) return fail("FGM term needs at least two members");
                    if (t.members >> dim_ != 0) return fail("FGM term index exceeds the dimension");
                    if (std::find(seen.begin(), seen.end(), t.members) != seen.end())
                        return fail("FGM term listed twice");
                    seen.push_back(t.members);
                    if (!(std::abs(t.theta) <= 1.0)) return fail("FGM |theta| must not exceed 1");
                    envelope_ += std::abs(t.theta);
                }
                // Copula density at the corner with signs eps is
                // 1 + sum theta_A prod_{j in A} eps_j.
                const std::uint32_t corners = 1u << dim_;
                for (std::uint32_t c = 0; c < corners; ++c) {
                    double density = 1.0;
                    for (const auto& t : s.terms) {
                        const int negatives = std::popcount(t.members & c);
                        density += (negatives % 2 == 0 ? t.theta : -t.theta);
                    }
                    if (density < -1e-12) {
                        return fail("FGM density is negative at a cube corner (" +
                                    std::to_string(density) + ")");
                    }
                }
                marginals_ = s.marginals;
                return {};
            },
        },
        spec_);
}

double JointRiskModel::fgm_density(std::span<const double> u) const {
    const auto& s = std::get<FgmSpec>(spec_);
    double d = 1.0;
    for (const auto& t : s.terms) {
        double prod = t.theta;
        for (std::uint32_t m = t.members; m != 0; m &= m - 1) {
            prod *= 1.0 - 2.0 * u[std::countr_zero(m)];
        }
        d += prod;
    }
    return d;
}

void JointRiskModel::sample(Stream& rng, std::span<double> out) const {
    if (!report_.valid) throw ValidationError("cannot sample invalid model: " + report_.violation);
    if (out.size() != dim_) throw DomainError("sample buffer has the wrong dimension");
    std::visit(
        Overloaded{
            [&](const IndependentSpec&) {
                for (std::size_t i = 0; i < dim_; ++i) out[i] = marginals_[i].sample(rng);
            },
            [&](const ComonotoneSpec&) {
                const double u = rng.uniform();
                for (std::size_t i = 0; i < dim_; ++i) out[i] = marginals_[i].quantile(u);
            },
            [&](const GaussLognormalSpec& s) {
                Eigen::VectorXd z(dim_);
                for (std::size_t i = 0; i < dim_; ++i) z(i) = rng.normal();
                const Eigen::VectorXd y = chol_.triangularView<Eigen::Lower>() * z;
                const double shared = s.coupling == WCoupling::comonotone ? rng.uniform() : 0.0;
                for (std::size_t i = 0; i < dim_; ++i) {
                    const double wv = s.coupling == WCoupling::comonotone ? s.w[i].quantile(shared)
                                                                          : s.w[i].sample(rng);
                    out[i] = std::exp(wv * (s.mu[i] + s.sigma[i] * y(i)));
                }
            },
            [&](const FgmSpec& s) {
                for (std::size_t tries = 0; tries < rejection_cap_; ++tries) {
                    for (std::size_t i = 0; i < dim_; ++i) out[i] = rng.uniform();
                    const double v = rng.uniform() * envelope_;
                    if (v <= fgm_density(out)) {
                        for (std::size_t i = 0; i < dim_; ++i) {
                            const auto& p = std::get<Pareto>(s.marginals[i].params());
                            // 1 - u is exact for u >= 1/2 and the law is unchanged.
                            out[i] = p.xmin * std::pow(1.0 - out[i], -1.0 / p.alpha);
                        }
                        return;
                    }
                }
                throw ConvergenceError("FGM rejection sampler exceeded its iteration cap");
            },
        },
        spec_);
}

std::optional<double> JointRiskModel::pairwise_joint_survival(std::size_t i, std::size_t j, double xi,
                                                              double xj) const {
    if (i == j) throw DomainError("pairwise_joint_survival requires i != j");
    if (i >= dim_ || j >= dim_) throw DomainError("pairwise_joint_survival index out of range");
    if (!report_.valid) throw ValidationError("invalid model: " + report_.violation);
    const Marginal& mi = marginals_[i];
    const Marginal& mj = marginals_[j];
    return std::visit(
        Overloaded{
            [&](const IndependentSpec&) -> std::optional<double> {
                return mi.survival(xi) * mj.survival(xj);
            },
            [&](const ComonotoneSpec&) -> std::optional<double> {
                return std::min(mi.survival(xi), mj.survival(xj));
            },
            [&](const FgmSpec& s) -> std::optional<double> {
                const std::uint32_t mask = (1u << i) | (1u << j);
                double theta = 0.0;
                for (const auto& t : s.terms)
                    if (t.members == mask) theta = t.theta;
                const double si = mi.survival(xi);
                const double sj = mj.survival(xj);
                return si * sj * (1.0 + theta * (1.0 - si) * (1.0 - sj));
            },
            [&](const GaussLognormalSpec& s) -> std::optional<double> {
                if (!s.w[i].is_degenerate() || !s.w[j].is_degenerate()) return std::nullopt;
                if (xi <= 0.0) return mj.survival(xj);
                if (xj <= 0.0) return mi.survival(xi);
                const auto& li = std::get<Lognormal>(mi.params());
                const auto& lj = std::get<Lognormal>(mj.params());
                const double a = (std::log(xi) - li.mu) / li.sigma;
                const double b = (std::log(xj) - lj.mu) / lj.sigma;
                return bivariate_normal_orthant(a, b, s.rho(i, j));
            },
        },
        spec_);
}

double JointRiskModel::marginal_tail_sum(double x) const {
    double s = 0.0;
    for (const auto& m : marginals_) s += m.survival(x);
    return s;
}

std::optional<MaxTailBounds> JointRiskModel::max_tail(double x) const {
    if (!report_.valid) throw ValidationError("invalid model: " + report_.violation);
    return std::visit(
        Overloaded{
            [&](const IndependentSpec&) -> std::optional<MaxTailBounds> {
                const double v = -std::expm1(log_survival_product(marginals_, x));
                return MaxTailBounds{v, v};
            },
            [&](const ComonotoneSpec&) -> std::optional<MaxTailBounds> {
                double v = 0.0;
                for (const auto& m : marginals_) v = std::max(v, m.survival(x));
                return MaxTailBounds{v, v};
            },
            [&](const FgmSpec& s) -> std::optional<MaxTailBounds> {
                // P(max <= x) = P (1 + T) with P = prod F_i and
                // T = sum theta_A prod_{j in A} Fbar_j; 1 - P is formed with
                // expm1 so the tail keeps full relative precision.
                std::vector<double> sv(dim_);
                for (std::size_t i = 0; i < dim_; ++i) sv[i] = marginals_[i].survival(x);
                const double log_p = log_survival_product(marginals_, x);
                double t_sum = 0.0;
                for (const auto& t : s.terms) {
                    double prod = t.theta;
                    for (std::uint32_t m = t.members; m != 0; m &= m - 1) prod *= sv[std::countr_zero(m)];
                    t_sum += prod;
                }
                const double v = -std::expm1(log_p) - std::exp(log_p) * t_sum;
                return MaxTailBounds{v, v};
            },
            [&](const GaussLognormalSpec& s) -> std::optional<MaxTailBounds> {
                for (const auto& w : s.w)
                    if (!w.is_degenerate()) return std::nullopt;
                double sum = 0.0;
                double largest = 0.0;
                for (const auto& m : marginals_) {
                    const double v = m.survival(x);
                    sum += v;
                    largest = std::max(largest, v);
                }
                double pairs = 0.0;
                for (std::size_t i = 0; i < dim_; ++i)
                    for (std::size_t j = i + 1; j < dim_; ++j) pairs += *pairwise_joint_survival(i, j, x, x);
                if (dim_ == 2) {
                    const double v = sum - pairs;
                    return MaxTailBounds{v, v};
                }
                return MaxTailBounds{std::max(largest, sum - pairs), std::min(1.0, sum)};
            },
        },
        spec_);
}

ValidationReport validate_model(const JointRiskModel& m) { return m.validation(); }

std::vector<double> sample_joint(const JointRiskModel& m, Stream& rng) {
    std::vector<double> out(m.dimension());
    m.sample(rng, out);
    return out;
}

std::optional<double> pairwise_joint_survival(const JointRiskModel& m, std::size_t i, std::size_t j,
                                              double xi, double xj) {
    return m.pairwise_joint_survival(i, j, xi, xj);
}

double bivariate_normal_orthant(double a, double b, double r) {
    if (!(std::abs(r) < 1.0)) throw DomainError("bivariate_normal_orthant requires |r| < 1");
    if (r == 0.0) return normal_tail(a) * normal_tail(b);
    if (a == -kInf) return normal_tail(b);
    if (b == -kInf) return normal_tail(a);
    // Condition on the first coordinate:
    //   P(Z1 > a, Z2 > b) = int_a^inf phi(z) Pbar((b - r z) / s) dz, s = sqrt(1 - r^2),
    // evaluated relative to the integrand's peak so deep tails do not underflow.
    const double s = std::sqrt(1.0 - r * r);
    auto log_f = [&](double z) { return log_normal_pdf(z) + log_normal_tail((b - r * z) / s); };
    const double hi = std::max({a, std::abs(b), 0.0}) + 40.0;
    double peak_z = a;
    double shift = log_f(a);
    constexpr int kScan = 400;
    for (int k = 1; k <= kScan; ++k) {
        const double z = a + (hi - a) * k / kScan;
        const double v = log_f(z);
        if (v > shift) {
            shift = v;
            peak_z = z;
        }
    }
    if (shift == -kInf) return 0.0;
    auto f = [&](double z) { return std::exp(log_f(z) - shift); };
    QuadratureOptions opts;
    opts.abs_tol = 1e-15;
    opts.rel_tol = 1e-11;
    double total = 0.0;
    if (peak_z > a) total += integrate(f, a, peak_z, opts).value;
    total += integrate(f, peak_z, std::min(hi, peak_z + 12.0), opts).value;
    if (peak_z + 12.0 < hi) total += integrate(f, peak_z + 12.0, hi, opts).value;
    return std::exp(shift + std::log(total));
}

DominatingSet dominating_set(const GaussLognormalSpec& spec, double tol) {
    const std::size_t n = spec.sigma.size();
    std::vector<double> sig(n), mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double wbar = spec.w.empty() ? 1.0 : spec.w[i].upper();
        sig[i] = wbar * spec.sigma[i];
        mu[i] = wbar * spec.mu[i];
    }
    const double smax = *std::max_element(sig.begin(), sig.end());
    double mmax = -kInf;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(sig[i] - smax) <= tol * smax) mmax = std::max(mmax, mu[i]);
    DominatingSet out{{}, smax, mmax};
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(sig[i] - smax) <= tol * smax &&
            std::abs(mu[i] - mmax) <= tol * std::max(1.0, std::abs(mmax))) {
            out.members.push_back(i);
        }
    }
    return out;
}

DominatingSet dominating_set(const JointRiskModel& m, double tol) {
    const auto* g = std::get_if<GaussLognormalSpec>(&m.spec());
    if (g == nullptr) throw DomainError("dominating_set requires a gauss_lognormal_w model");
    return dominating_set(*g, tol);
}

}  // namespace ordertail
