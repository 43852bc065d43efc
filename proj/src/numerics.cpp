#include "ordertail/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "ordertail/errors.hpp"
#include "ordertail/rng.hpp"

namespace ordertail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kSeriesSwitch = 8.0;

// Acklam's rational approximation to the lower normal quantile, relative
// error below 1.2e-9; refined by one Newton step by the callers.
double acklam_quantile(double p) {
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Kronrod nodes on [0, 1], with 7-point Gauss weights on the odd nodes.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double normal_pdf(double z) { return std::exp(log_normal_pdf(z)); }

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double log_normal_tail(double z) {
    if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z * kSqrt1_2));
    if (z <= kSeriesSwitch) return std::log(0.5 * std::erfc(z * kSqrt1_2));
    if (!std::isfinite(z)) return -kInf;
    // Mills-ratio asymptotic series; at z > 8 the terms shrink well past
    // double precision before they start to diverge.
    const double inv_z2 = 1.0 / (z * z);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = -term * (2.0 * k - 1.0) * inv_z2;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * sum) break;
    }
    return -0.5 * z * z - std::log(z) - kLogSqrt2Pi + std::log(sum);
}

double normal_tail(double z) {
    if (z <= kSeriesSwitch) return 0.5 * std::erfc(z * kSqrt1_2);
    return std::exp(log_normal_tail(z));
}

double normal_upper_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        if (q == 0.0) return kInf;
        if (q == 1.0) return -kInf;
        throw DomainError("normal_upper_quantile: probability outside [0, 1]");
    }
    double z = -acklam_quantile(q);
    // Newton on log P(Z > z) = log q; the derivative is minus the hazard.
    const double log_q = std::log(q);
    const double log_tail = log_normal_tail(z);
    const double hazard = std::exp(log_normal_pdf(z) - log_tail);
    z += (log_tail - log_q) / hazard;
    return z;
}

double normal_quantile(double p) { return -normal_upper_quantile(p); }

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf || m == kInf) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    QuadratureResult result;
    if (a == b) return result;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<Segment> heap;
    Segment first = kronrod15(f, a, b);
    result.evaluations = 15;
    double total = first.value;
    double error = first.error;
    heap.push(first);
    while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (heap.size() >= opts.max_intervals) {
            throw QuadratureError("integrate: interval budget exhausted", error);
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("integrate: interval underflow", error);
        }
        const Segment left = kronrod15(f, worst.a, mid);
        const Segment right = kronrod15(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        // Re-sum the error from the heap occasionally to shed rounding drift.
        error += left.error + right.error - worst.error;
        if (error < 0.0 || heap.size() % 64 == 0) {
            error = 0.0;
            total = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                error += copy.top().error;
                total += copy.top().value;
                copy.pop();
            }
        }
    }
    result.value = sign * total;
    result.error = error;
    return result;
}

double solve_decreasing_log(const std::function<double(double)>& g, double target, double start,
                            double rel_tol) {
    constexpr double kMin = 1e-300;
    constexpr double kMax = 1e300;
    if (!(start > 0.0) || !std::isfinite(start)) start = 1.0;
    double lo = start;
    double hi = start;
    if (g(start) <= target) {
        do {
            hi = lo;
            lo *= 0.5;
            if (lo < kMin) throw ConvergenceError("solve_decreasing_log: no lower bracket");
        } while (g(lo) <= target);
    } else {
        do {
            lo = hi;
            hi *= 2.0;
            if (hi > kMax) throw ConvergenceError("solve_decreasing_log: no upper bracket");
        } while (g(hi) > target);
    }
    // Invariant: g(lo) > target >= g(hi).
    while (hi / lo - 1.0 > rel_tol) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) break;
        if (g(mid) <= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double Stream::normal() { return normal_upper_quantile(uniform()); }

double Stream::gamma(double shape) {
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = normal();
        const double v0 = 1.0 + c * z;
        if (v0 <= 0.0) continue;
        const double v = v0 * v0 * v0;
        const double u = uniform();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace ordertail
