#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ordertail/joint_models.hpp"
#include "ordertail/marginals.hpp"
#include "ordertail/montecarlo.hpp"

namespace ordertail {

enum class Verdict { converging_to_zero, converging_to_positive, diverging, inconclusive };

std::string to_string(Verdict v);

struct VerdictThresholds {
    double zero_ci = 0.02;       // final upper CI below this for converging-to-zero
    double positive_ci = 0.02;   // final lower CI above this for converging-to-positive
    double diverge_slope = 0.1;  // log-log slope above this (with a rising tail) for diverging
};

struct DiagnosticCurve {
    std::string label;
    std::vector<double> x;
    std::vector<double> value;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::vector<bool> rare_event;
    bool deterministic = false;
    double slope = 0.0;  // least-squares slope of log value on log x over the upper half
    Verdict verdict = Verdict::inconclusive;
};

/// Fills slope and verdict from the points.
void classify(DiagnosticCurve& c, const VerdictThresholds& th = {});

struct DiagnosticOptions {
    VerdictThresholds thresholds;
    bool force_mc = false;  // skip the deterministic path even when available
};

/// P(|X_i| > t h(x), X_j > x) / P(X_{n:n} > x) for every ordered pair i != j.
std::vector<DiagnosticCurve> check_ds1(const JointRiskModel& m, const ScalingFunction& h, double t,
                                       const std::vector<double>& x_grid, const SimulationPlan& plan,
                                       const DiagnosticOptions& opts = {});

struct Ds2Report {
    std::vector<DiagnosticCurve> curves;  // one per (i < j, L)
    std::vector<double> L;
    bool pass = false;  // every pair has some L with a curve converging to zero
};

/// P(X_i > L h(x), X_j > L h(x)) / P(X_{n:n} > x) for every pair i < j and L in the grid.
Ds2Report check_ds2(const JointRiskModel& m, const ScalingFunction& h, const std::vector<double>& L_grid,
                    const std::vector<double>& x_grid, const SimulationPlan& plan,
                    const DiagnosticOptions& opts = {});

/// P(X_i > x, X_j > x) / P(X_{n:n} > x) for every pair i < j.
std::vector<DiagnosticCurve> check_v1(const JointRiskModel& m, const std::vector<double>& x_grid,
                                      const SimulationPlan& plan, const DiagnosticOptions& opts = {});

/// P(|X_{k:n}| / h(x) > t | X_{n:n} > x) by conditional Monte Carlo; k is the
/// 1-based ascending rank, 1 <= k <= n - 1.
DiagnosticCurve check_conditional_smallness(const JointRiskModel& m, const ScalingFunction& h, std::size_t k,
                                            double t, const std::vector<double>& x_grid,
                                            const SimulationPlan& plan, const DiagnosticOptions& opts = {});

struct PropertyCheck {
    std::string name;
    std::vector<double> x;
    std::vector<double> deviation;  // distance from the target, worst case over y
    bool pass = false;
};

struct HPropertyReport {
    PropertyCheck little_o;        // (i)   h(x)/x -> 0
    PropertyCheck insensitive;     // (ii)  F(x + y h(x)) / F(x) -> 1
    PropertyCheck weakly_sn;       // (iii) h(x + y h(x)) / h(x) bounded
    PropertyCheck self_neglecting; // (iii') h(x + y h(x)) / h(x) -> 1
    PropertyCheck gmda;            // F(x + y h(x)) / F(x) -> exp(-y)

    bool in_h_class() const { return little_o.pass && insensitive.pass && weakly_sn.pass; }
};

/// Evaluates the defining ratios of each property over the grids. `log_tail`
/// is log P(X_{n:n} > x). A property passes when its deviation is strictly
/// decreasing over the last three grid points and ends at most half its
/// first value, or is below 1e-9 throughout; (iii) passes when the ratio
/// stays below 1e3.
HPropertyReport check_h_properties(const std::function<double(double)>& log_tail, const ScalingFunction& h,
                                   const std::vector<double>& y_grid, const std::vector<double>& x_grid);

/// log P(X_{n:n} > x): exact or bound midpoint when the model has one,
/// else the log of the marginal tail sum. `deterministic` reports which was
/// used. The evaluator refers to `m`, which must outlive it.
std::function<double(double)> max_log_tail(const JointRiskModel& m, bool* deterministic = nullptr);

/// x with exp(log_tail(x)) = level for each level.
std::vector<double> level_grid(const std::function<double(double)>& log_tail, const std::vector<double>& levels,
                               double start);

struct AssumptionOptions {
    std::vector<double> t_values{0.5, 1.0, 2.0};
    std::vector<double> L_values{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> y_values{-1.0, -0.5, 0.5, 1.0, 2.0};
    SimulationPlan plan = SimulationPlan::make(2'000'000, 1);
    DiagnosticOptions diag;
};

struct CandidateReport {
    ScalingFunction h;
    std::vector<DiagnosticCurve> ds1;
    Ds2Report ds2;
    HPropertyReport properties;
    bool ds1_pass = false;
    bool gmda = false;
    bool A = false;
    bool B = false;
    bool C = false;
};

struct AssumptionReport {
    ClassTags max_tags;
    bool tags_inherited = false;  // v1 held, so the maximum inherits the common component tags
    bool deterministic = false;
    std::vector<double> x_grid;
    std::vector<double> property_grid;
    std::vector<DiagnosticCurve> v1;
    bool v1_pass = false;
    std::vector<CandidateReport> candidates;
    bool A = false;
    bool B = false;
    bool C = false;
    std::string summary;  // e.g. "A", "B,C" or "none supported"
};

AssumptionReport assumption_report(const JointRiskModel& m, const std::vector<ScalingFunction>& candidates,
                                   const AssumptionOptions& opts = {});

}  // namespace ordertail
