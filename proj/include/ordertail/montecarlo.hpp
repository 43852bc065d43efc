#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ordertail/asymptotics.hpp"
#include "ordertail/joint_models.hpp"
#include "ordertail/rng.hpp"

namespace ordertail {

struct SimulationPlan {
    std::uint64_t samples = 1'000'000;
    std::uint64_t chunk = 1u << 16;
    std::uint64_t seed = 0;
    double confidence = 0.95;
    unsigned workers = 0;  // 0: ORDERTAIL_WORKERS, else hardware concurrency

    /// Plan with the chunk size capped at the sample count.
    static SimulationPlan make(std::uint64_t samples, std::uint64_t seed, double confidence = 0.95);

    std::optional<std::string> check() const;
    std::uint64_t chunk_count() const { return (samples + chunk - 1) / chunk; }
    /// Two-sided normal critical value for the confidence level.
    double z() const;
};

/// Worker count for a plan. Never changes numeric results.
unsigned resolve_workers(const SimulationPlan& plan);

// Substream ids keep the estimator passes of one plan independent.
enum class StreamId : std::uint64_t {
    tail = 1,
    quantile = 2,
    cte_mean = 3,
    diagnostics = 4,
};

/// Runs fn(stream, count) once per chunk, chunk k on Stream(seed, id, k),
/// over any number of workers. Results come back in chunk order so callers
/// fold them deterministically.
template <class Partial, class Fn>
std::vector<Partial> run_chunks(const SimulationPlan& plan, StreamId id, Fn&& fn) {
    if (auto err = plan.check()) throw std::invalid_argument("simulation plan: " + *err);
    const std::uint64_t chunks = plan.chunk_count();
    std::vector<Partial> parts(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t k = next.fetch_add(1);
            if (k >= chunks || failed.load()) return;
            const std::uint64_t begin = k * plan.chunk;
            const std::uint64_t count = std::min(plan.chunk, plan.samples - begin);
            Stream rng(plan.seed, static_cast<std::uint64_t>(id), k);
            try {
                parts[k] = fn(rng, count);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(plan), chunks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return parts;
}

struct TailEstimate {
    double estimate = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    bool rare_event = false;  // zero hits; ci_hi is the rule-of-three bound 3/N
};

TailEstimate make_tail_estimate(std::uint64_t hits, std::uint64_t samples, double z);

/// Sum of c_i times the (i+1)-th largest sample value; c[0] multiplies the maximum.
double weighted_order_sum(std::span<const double> sample, std::span<const double> c);

/// Same statistic, sorting `sample` in place (descending).
double weighted_order_sum_inplace(std::span<double> sample, std::span<const double> c);

/// P(sum_i C_i X_{n-i:n} > x) by crude Monte Carlo.
TailEstimate estimate_tail(const JointRiskModel& m, const WeightSpec& w, double x,
                           const SimulationPlan& plan);

/// Same draws for every grid point; entry k equals estimate_tail at x_grid[k].
std::vector<TailEstimate> estimate_tail_grid(const JointRiskModel& m, const WeightSpec& w,
                                             const std::vector<double>& x_grid,
                                             const SimulationPlan& plan);

struct QuantileEstimate {
    double q = 0.0;
    double value = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t samples = 0;
};

/// Empirical q-quantile with a distribution-free order-statistic interval.
/// Requires samples * (1 - q) >= 100.
QuantileEstimate estimate_quantile(const JointRiskModel& m, const WeightSpec& w, double q,
                                   const SimulationPlan& plan);

struct CteEstimate {
    double q = 0.0;
    QuantileEstimate var;
    double cte = 0.0;  // E(sum_{i in omega} X_i | S_n > VaR)
    double cte_se = 0.0;
    double ratio = 0.0;  // cte / VaR
    double ratio_se = 0.0;
    double ratio_ci_lo = 0.0;
    double ratio_ci_hi = 0.0;
    std::uint64_t exceedances = 0;
};

/// Two-pass estimate of E(sum_{i in omega} X_i | S_n > VaR_q(S_n)) / VaR_q(S_n).
/// Requires nonnegative risks and samples * (1 - q) >= 1000.
CteEstimate estimate_cte_ratio(const JointRiskModel& m, const std::vector<std::size_t>& omega, double q,
                               const SimulationPlan& plan);

struct RatioPoint {
    double x = 0.0;
    TailEstimate estimate;
    double approx = 0.0;
    double ratio = 0.0;
    double ratio_lo = 0.0;
    double ratio_hi = 0.0;
};

/// estimate_tail(x) / approx_tail(x) along the grid.
std::vector<RatioPoint> ratio_curve(const JointRiskModel& m, const WeightSpec& w,
                                    const std::vector<double>& x_grid, const SimulationPlan& plan);

}  // namespace ordertail
