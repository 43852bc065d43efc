#include "ordertail/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>

#include "ordertail/diagnostics.hpp"
#include "ordertail/errors.hpp"

namespace ordertail {

namespace fs = std::filesystem;

namespace {

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& comments, const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw Error("cannot write " + path.string());
        for (const auto& c : comments) out_ << "# " << c << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << num17(values[i]);
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string file_label(const std::string& label) {
    std::string s;
    for (char ch : label) {
        if (ch == ' ') s += '_';
        else if (ch != '=') s += ch;
    }
    return s;
}

struct Context {
    const ExperimentConfig& cfg;
    const JointRiskModel& model;
    SimulationPlan plan;
    fs::path dir;
    std::vector<double> grid;
    std::string assumptions;
};

std::vector<std::string> run_approx(Context& ctx) {
    std::vector<std::string> files{"approx.csv"};
    CsvWriter w(ctx.dir / files[0],
                {"approx_tail: first-order tail sum_i P(C0 X_i > x) of sum_i c_i X_{n-i:n}", "x in risk units; approx is a probability"},
                {"x", "approx"});
    for (double x : ctx.grid) w.row({x, approx_tail(ctx.model, ctx.cfg.weights, x)});
    if (!ctx.cfg.q.empty()) {
        files.push_back("approx_var.csv");
        CsvWriter v(ctx.dir / files[1], {"asymptotic VaR: root of approx_tail(x) = 1 - q", "var in risk units"},
                    {"q", "var"});
        for (double q : ctx.cfg.q) {
            double x;
            if (const auto* f = std::get_if<FixedWeights>(&ctx.cfg.weights)) {
                x = asymptotic_var(ctx.model, q, f->c.at(0));
            } else {
                const double start = std::get<RandomWeights>(ctx.cfg.weights).c0.upper() * ctx.model.marginal(0).quantile(0.5);
                x = solve_decreasing_log([&](double s) { return approx_tail(ctx.model, ctx.cfg.weights, s); }, 1.0 - q, start);
            }
            v.row({q, x});
        }
    }
    return files;
}

std::vector<std::string> run_simulate(Context& ctx) {
    const auto est = estimate_tail_grid(ctx.model, ctx.cfg.weights, ctx.grid, ctx.plan);
    CsvWriter w(ctx.dir / "simulate.csv",
                {"crude Monte Carlo estimate of P(sum_i C_i X_{n-i:n} > x)",
                 "ci is the Wald interval at the plan confidence; rare_event marks zero hits (ci_hi = 3/N)"},
                {"x", "estimate", "se", "ci_lo", "ci_hi", "hits", "rare_event"});
    for (std::size_t k = 0; k < ctx.grid.size(); ++k) {
        const auto& e = est[k];
        w.row({ctx.grid[k], e.estimate, e.se, e.ci_lo, e.ci_hi, static_cast<double>(e.hits), e.rare_event ? 1.0 : 0.0});
    }
    return {"simulate.csv"};
}

std::vector<std::string> run_curve(Context& ctx) {
    const auto pts = ratio_curve(ctx.model, ctx.cfg.weights, ctx.grid, ctx.plan);
    CsvWriter w(ctx.dir / "curve.csv",
                {"ratio R(x) = Monte Carlo P(sum_i C_i X_{n-i:n} > x) / approx_tail(x); tends to 1 in the tail",
                 "x in risk units; estimate and approx are probabilities"},
                {"x", "estimate", "se", "ci_lo", "ci_hi", "approx", "ratio", "ratio_lo", "ratio_hi", "rare_event"});
    for (const auto& p : pts)
        w.row({p.x, p.estimate.estimate, p.estimate.se, p.estimate.ci_lo, p.estimate.ci_hi, p.approx, p.ratio,
               p.ratio_lo, p.ratio_hi, p.estimate.rare_event ? 1.0 : 0.0});
    return {"curve.csv"};
}

std::vector<std::string> run_var(Context& ctx) {
    CsvWriter w(ctx.dir / "var.csv",
                {"empirical q-quantile of sum_i C_i X_{n-i:n} with a binomial order-statistic interval",
                 "approx_var solves approx_tail(x) = 1 - q; values in risk units"},
                {"q", "var", "ci_lo", "ci_hi", "approx_var"});
    for (double q : ctx.cfg.q) {
        const auto e = estimate_quantile(ctx.model, ctx.cfg.weights, q, ctx.plan);
        double a = std::nan("");
        if (const auto* f = std::get_if<FixedWeights>(&ctx.cfg.weights)) a = asymptotic_var(ctx.model, q, f->c.at(0));
        w.row({q, e.value, e.ci_lo, e.ci_hi, a});
    }
    return {"var.csv"};
}

std::vector<std::string> run_cte(Context& ctx) {
    auto sum_tail = [&](double x) { return std::log(ctx.model.marginal_tail_sum(x)); };
    std::vector<double> levels;
    for (int e = 2; e <= 12; ++e) levels.push_back(std::pow(10.0, -e));
    const auto bgrid = level_grid(sum_tail, levels, ctx.model.marginal(0).quantile(0.5));
    const auto bounds = cte_bounds(ctx.model, ctx.cfg.omega, bgrid);
    CsvWriter w(ctx.dir / "cte.csv",
                {"CTE ratio E(sum_{i in omega} X_i | S_n > VaR_q(S_n)) / VaR_q(S_n), two-pass Monte Carlo",
                 "u and U bound the ratio asymptotically; var and cte in risk units"},
                {"q", "var", "cte", "cte_se", "ratio", "ratio_se", "ratio_ci_lo", "ratio_ci_hi", "exceedances", "u", "U"});
    for (double q : ctx.cfg.q) {
        const auto e = estimate_cte_ratio(ctx.model, ctx.cfg.omega, q, ctx.plan);
        w.row({q, e.var.value, e.cte, e.cte_se, e.ratio, e.ratio_se, e.ratio_ci_lo, e.ratio_ci_hi,
               static_cast<double>(e.exceedances), bounds.u, bounds.U});
    }
    return {"cte.csv"};
}

void write_curve(const fs::path& path, const DiagnosticCurve& c) {
    CsvWriter w(path,
                {c.label + (c.deterministic ? " (deterministic)" : " (Monte Carlo)"),
                 "verdict " + to_string(c.verdict) + "; slope " + num17(c.slope)},
                {"x", "value", "ci_lo", "ci_hi", "rare_event"});
    for (std::size_t k = 0; k < c.x.size(); ++k)
        w.row({c.x[k], c.value[k], c.ci_lo[k], c.ci_hi[k], c.rare_event[k] ? 1.0 : 0.0});
}

Json curve_summary(const DiagnosticCurve& c, const std::string& file) {
    return {{"label", c.label}, {"verdict", to_string(c.verdict)}, {"slope", c.slope},
            {"deterministic", c.deterministic}, {"file", file}};
}

std::vector<std::string> run_diagnose(Context& ctx) {
    std::vector<std::string> files;
    AssumptionOptions opts;
    opts.t_values = ctx.cfg.t;
    opts.L_values = ctx.cfg.L;
    opts.y_values = ctx.cfg.y;
    opts.plan = ctx.plan;
    const auto rep = assumption_report(ctx.model, ctx.cfg.candidates, opts);

    auto emit = [&](const DiagnosticCurve& c, const std::string& prefix) {
        const std::string f = "diag_" + prefix + file_label(c.label) + ".csv";
        write_curve(ctx.dir / f, c);
        files.push_back(f);
        return curve_summary(c, f);
    };

    Json verdict;
    verdict["summary"] = rep.summary;
    verdict["deterministic"] = rep.deterministic;
    verdict["v1_pass"] = rep.v1_pass;
    verdict["tags_inherited"] = rep.tags_inherited;
    verdict["max_tags"] = rep.tags_inherited ? rep.max_tags.describe() : std::string("unknown");
    verdict["x_grid"] = rep.x_grid;
    verdict["v1"] = Json::array();
    for (const auto& c : rep.v1) verdict["v1"].push_back(emit(c, ""));

    bool det = false;
    auto log_tail = max_log_tail(ctx.model, &det);
    std::vector<double> mc_levels;
    for (double e = 2.0; e <= 4.0 + 1e-12; e += 0.5) mc_levels.push_back(std::pow(10.0, -e));
    const auto mc_grid = level_grid(log_tail, mc_levels, ctx.model.marginal(0).quantile(0.5));

    verdict["candidates"] = Json::array();
    for (std::size_t hidx = 0; hidx < rep.candidates.size(); ++hidx) {
        const auto& cr = rep.candidates[hidx];
        const std::string prefix = "h" + std::to_string(hidx + 1) + "_";
        Json cj;
        cj["h"] = cr.h.describe();
        cj["A"] = cr.A;
        cj["B"] = cr.B;
        cj["C"] = cr.C;
        cj["ds1_pass"] = cr.ds1_pass;
        cj["ds2_pass"] = cr.ds2.pass;
        cj["gmda"] = cr.gmda;
        cj["in_h_class"] = cr.properties.in_h_class();
        cj["ds1"] = Json::array();
        for (const auto& c : cr.ds1) cj["ds1"].push_back(emit(c, prefix));
        cj["ds2"] = Json::array();
        for (const auto& c : cr.ds2.curves) cj["ds2"].push_back(emit(c, prefix));

        const std::string pf = "props_" + prefix.substr(0, prefix.size() - 1) + ".csv";
        {
            const auto& p = cr.properties;
            CsvWriter w(ctx.dir / pf,
                        {"scaling-function property deviations for " + cr.h.describe(),
                         "little_o h(x)/x; insensitive |F(x+yh)/F(x)-1|; weakly_sn max h(x+yh)/h(x); "
                         "self_neglecting |h(x+yh)/h(x)-1|; gmda |F(x+yh)/F(x)-exp(-y)|; worst case over y"},
                        {"x", "little_o", "insensitive", "weakly_sn", "self_neglecting", "gmda"});
            for (std::size_t k = 0; k < p.little_o.x.size(); ++k)
                w.row({p.little_o.x[k], p.little_o.deviation[k], p.insensitive.deviation[k], p.weakly_sn.deviation[k],
                       p.self_neglecting.deviation[k], p.gmda.deviation[k]});
            files.push_back(pf);
            cj["properties"] = {{"file", pf},
                                {"little_o", p.little_o.pass},
                                {"insensitive", p.insensitive.pass},
                                {"weakly_self_neglecting", p.weakly_sn.pass},
                                {"self_neglecting", p.self_neglecting.pass},
                                {"gmda", p.gmda.pass}};
        }

        cj["conditional"] = Json::array();
        bool cond_ok = true;
        for (double t : ctx.cfg.t)
            for (std::size_t k = 1; k < ctx.model.dimension(); ++k) {
                const auto c = check_conditional_smallness(ctx.model, cr.h, k, t, mc_grid, ctx.plan);
                cond_ok = cond_ok && c.verdict == Verdict::converging_to_zero;
                cj["conditional"].push_back(emit(c, prefix));
            }
        cj["conditional_pass"] = cond_ok;
        verdict["candidates"].push_back(cj);
    }
    std::ofstream(ctx.dir / "verdict.json") << verdict.dump(2) << '\n';
    files.push_back("verdict.json");
    ctx.assumptions = rep.summary;
    return files;
}

}  // namespace

Json RunManifest::to_json() const {
    Json p = Json::array();
    for (const auto& r : pipelines)
        p.push_back({{"name", r.name}, {"outputs", r.outputs}, {"seconds", r.seconds}, {"ok", r.ok}, {"error", r.error}});
    Json j = {{"name", name},       {"config_hash", config_hash}, {"seed", seed},         {"samples", samples},
              {"version", version}, {"output_dir", output_dir},   {"pipelines", p},       {"started", started},
              {"finished", finished}, {"status", ok ? "ok" : "failed"}};
    if (!assumptions.empty()) j["assumptions"] = assumptions;
    return j;
}

RunManifest run_experiment(const ExperimentConfig& c, const RunOptions& opts) {
    validate_config(c);
    const JointRiskModel model(c.model);

    RunManifest man;
    man.name = c.name;
    man.config_hash = config_hash(c);
    man.seed = c.plan.seed;
    man.samples = c.plan.samples;
    man.output_dir = c.output;
    man.started = now_utc();

    Context ctx{c, model, c.plan, fs::path(c.output), {}, {}};
    ctx.plan.workers = opts.workers;
    fs::create_directories(ctx.dir);
    ctx.grid = c.x_grid.resolve(model, c.weights);

    using Step = std::pair<Pipeline, std::function<std::vector<std::string>(Context&)>>;
    const std::vector<Step> steps{{Pipeline::approx, run_approx}, {Pipeline::simulate, run_simulate},
                                  {Pipeline::curve, run_curve},   {Pipeline::var, run_var},
                                  {Pipeline::cte, run_cte},       {Pipeline::diagnose, run_diagnose}};
    for (const auto& [p, fn] : steps) {
        if (c.pipeline != Pipeline::full && c.pipeline != p) continue;
        PipelineRecord rec;
        rec.name = to_string(p);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            rec.outputs = fn(ctx);
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
            man.ok = false;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        man.pipelines.push_back(std::move(rec));
    }
    man.assumptions = ctx.assumptions;
    man.finished = now_utc();
    std::ofstream(ctx.dir / "manifest.json") << man.to_json().dump(2) << '\n';
    return man;
}

}  // namespace ordertail
