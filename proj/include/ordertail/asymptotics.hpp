#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ordertail/joint_models.hpp"
#include "ordertail/marginals.hpp"

namespace ordertail {

/// Box for the weights: c0 in [a, b]; c1..c_{n-1} in [0, d], or in [-d, d]
/// when every marginal is nonnegative and `signed_rest` is set.
struct WeightBox {
    double a;
    double b;
    double d;
    bool signed_rest = false;
};

struct FixedWeights {
    std::vector<double> c;  // c[0] multiplies the maximum
    WeightBox box;

    /// Box spanned by the weights themselves.
    static FixedWeights tight(std::vector<double> c);
};

/// C0 drawn from a bounded law on [a, b] independently of the risks; the
/// remaining weights are held fixed.
struct RandomWeights {
    BoundedLaw c0;
    std::vector<double> rest;
    double d;
};

using WeightSpec = std::variant<FixedWeights, RandomWeights>;

std::size_t weight_dimension(const WeightSpec& w);

/// First violated constraint for `w` against a model of dimension n.
std::optional<std::string> check_weights(const WeightSpec& w, std::size_t n, bool nonnegative_risks);

/// sum_i P(c0 X_i > x); depends on the weights only through c0.
double approx_tail(const JointRiskModel& m, const FixedWeights& w, double x);
double approx_tail(const JointRiskModel& m, double c0, double x);

/// sum_i E[P(C0 X_i > x)]: exact for atomic C0, quadrature otherwise.
double approx_tail_random_weights(const JointRiskModel& m, const RandomWeights& w, double x);

/// Dispatches on the weight variant.
double approx_tail(const JointRiskModel& m, const WeightSpec& w, double x);

/// Root of sum_i P(c0 X_i > x) = 1 - q, the plug-in VaR of both the
/// weighted sum and the maximum.
double asymptotic_var(const JointRiskModel& m, double q, double c0);

struct CteBounds {
    double u;
    double U;
    std::vector<double> x;
    std::vector<double> ratio;
    std::size_t tail_start;  // first index of the segment u and U are taken over
    bool converging;         // spread of the last three ratios below the tolerance
};

/// r(x) = sum_{i in omega} P(X_i > x) / sum_i P(X_i > x) over an increasing
/// grid of at least 8 points; u and U are the min and max over its upper half.
CteBounds cte_bounds(const JointRiskModel& m, const std::vector<std::size_t>& omega,
                     const std::vector<double>& x_grid, double convergence_tol = 1e-3);

struct DavisResnickPoint {
    double s;
    double lhs;  // P(X > x + h(x) s) / P(X > x)
    double rhs;  // (1 + eps)(1 + eps s)^(-1/eps)
    double margin;
};

struct DavisResnickReport {
    double x;
    double epsilon;
    std::vector<DavisResnickPoint> points;
    bool all_positive;
};

/// Default location for the check: the 1 - 1e-6 quantile of the marginal.
double davis_resnick_threshold(const Marginal& m);

DavisResnickReport davis_resnick_check(const Marginal& m, const ScalingFunction& h, double epsilon,
                                       double x, const std::vector<double>& s_grid);

/// P(X1 + X2 > x) for independent nonnegative marginals with densities, by
/// conditioning on X1 and integrating over log X1.
double independent_pair_sum_tail(const Marginal& first, const Marginal& second, double x);

}  // namespace ordertail
