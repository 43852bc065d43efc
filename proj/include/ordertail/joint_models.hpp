#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ordertail/marginals.hpp"
#include "ordertail/rng.hpp"

namespace ordertail {

/// Independent components.
struct IndependentSpec {
    std::vector<Marginal> marginals;
};

/// All components driven by one uniform (X_i = Q_i(U)). Used as the
/// degenerate-dependence control in the diagnostics.
struct ComonotoneSpec {
    std::vector<Marginal> marginals;
};

enum class WCoupling { independent, comonotone };

/// X_i = exp(W_i Y_i), Y ~ N(mu, diag(sigma) rho diag(sigma)), W independent of Y.
struct GaussLognormalSpec {
    std::vector<double> mu;
    std::vector<double> sigma;
    Eigen::MatrixXd rho;
    std::vector<WSpec> w;
    WCoupling coupling = WCoupling::independent;
};

/// One FGM coefficient theta_A; `members` is a bit mask over 0-based indices
/// with at least two bits set.
struct FgmTerm {
    std::uint32_t members;
    double theta;
};

/// Farlie-Gumbel-Morgenstern copula over Pareto marginals with a common index.
struct FgmSpec {
    std::vector<Marginal> marginals;
    std::vector<FgmTerm> terms;
};

using JointSpec = std::variant<IndependentSpec, ComonotoneSpec, GaussLognormalSpec, FgmSpec>;

inline constexpr std::size_t kMaxFgmDimension = 20;

struct ValidationReport {
    bool valid = true;
    std::string violation;  // first violated constraint

    explicit operator bool() const { return valid; }
};

/// Bracket for P(X_{n:n} > x); lo == hi when exact.
struct MaxTailBounds {
    double lo;
    double hi;
    bool exact() const { return lo == hi; }
};

class JointRiskModel {
public:
    /// Never throws; invalid parameters yield a model whose
    /// validation() reports the first violated constraint.
    explicit JointRiskModel(JointSpec spec, std::size_t rejection_cap = 100000);

    const JointSpec& spec() const { return spec_; }
    std::string kind() const;
    std::size_t dimension() const { return dim_; }
    const ValidationReport& validation() const { return report_; }

    /// Per-component marginal laws (empty when validation failed).
    const std::vector<Marginal>& marginals() const { return marginals_; }
    const Marginal& marginal(std::size_t i) const { return marginals_.at(i); }

    /// One joint draw into `out` (size n). Throws ValidationError for an
    /// invalid model and ConvergenceError when FGM rejection exceeds the cap.
    void sample(Stream& rng, std::span<double> out) const;

    /// P(X_i > xi, X_j > xj) when a deterministic evaluation exists.
    std::optional<double> pairwise_joint_survival(std::size_t i, std::size_t j, double xi,
                                                  double xj) const;

    /// Deterministic bracket for the maximum's tail: exact for independent,
    /// comonotone, FGM and bivariate Gaussian models; second-order
    /// Bonferroni bounds for higher-dimensional Gaussian models with
    /// degenerate W. nullopt when no sharp deterministic bound exists.
    std::optional<MaxTailBounds> max_tail(double x) const;

    /// Sum of marginal tails, the first-order surrogate for the maximum.
    double marginal_tail_sum(double x) const;

    /// FGM density envelope 1 + sum |theta|.
    double fgm_envelope() const { return envelope_; }

private:
    void validate_and_build();
    double fgm_density(std::span<const double> u) const;

    JointSpec spec_;
    std::size_t dim_ = 0;
    std::size_t rejection_cap_;
    ValidationReport report_;
    std::vector<Marginal> marginals_;
    Eigen::MatrixXd chol_;
    double envelope_ = 1.0;
};

ValidationReport validate_model(const JointRiskModel& m);

/// Draws one joint sample; see JointRiskModel::sample.
std::vector<double> sample_joint(const JointRiskModel& m, Stream& rng);

std::optional<double> pairwise_joint_survival(const JointRiskModel& m, std::size_t i, std::size_t j,
                                              double xi, double xj);

/// P(Z1 > a, Z2 > b) for standard bivariate normal with correlation r.
double bivariate_normal_orthant(double a, double b, double r);

struct DominatingSet {
    std::vector<std::size_t> members;  // 0-based, ascending
    double sigma;
    double mu;
};

/// Components with maximal sigma, then maximal mu among those, each tie
/// decided with relative tolerance `tol`.
DominatingSet dominating_set(const GaussLognormalSpec& spec, double tol = 1e-9);
DominatingSet dominating_set(const JointRiskModel& m, double tol = 1e-9);

}  // namespace ordertail
