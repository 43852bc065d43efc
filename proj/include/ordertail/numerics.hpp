#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ordertail {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

double normal_pdf(double z);
double log_normal_pdf(double z);

/// P(Z > z). Uses erfc up to z = 8 and the log-space asymptotic series above.
double normal_tail(double z);

/// log P(Z > z), finite for every finite z.
double log_normal_tail(double z);

/// z such that P(Z > z) = q. Accurate for q down to the smallest normal double.
double normal_upper_quantile(double q);

/// z such that P(Z <= z) = p.
double normal_quantile(double p);

/// log(exp(a) + exp(b)) without overflow; -inf absorbs.
double log_add_exp(double a, double b);

/// log(sum exp(v_i)).
double log_sum_exp(std::span<const double> v);

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-10;
    std::size_t max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration over a finite
/// interval. Throws QuadratureError when the interval budget is exhausted
/// before the tolerance max(abs_tol, rel_tol * |value|) is met.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Smallest x > 0 with g(x) <= target for g nonincreasing on (0, inf).
/// Brackets geometrically from `start` and bisects on log x until the
/// bracket ratio is below 1 + rel_tol. Throws ConvergenceError when the
/// target cannot be bracketed within [1e-300, 1e300].
double solve_decreasing_log(const std::function<double(double)>& g, double target, double start,
                            double rel_tol = 1e-10);

}  // namespace ordertail
