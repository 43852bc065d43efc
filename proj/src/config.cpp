#include "ordertail/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ordertail/errors.hpp"

namespace ordertail {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ValidationError("config key '" + key + "': " + what);
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where + key, "missing");
    return j.at(key);
}

double num(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = need(j, key, where);
    if (!v.is_number()) bad(where + key, "expected a number");
    return v.get<double>();
}

std::vector<double> num_list(const Json& j, const std::string& key) {
    if (!j.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) bad(key, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<Marginal> parse_marginals(const Json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) bad(key, "expected a nonempty array of marginals");
    std::vector<Marginal> out;
    for (const auto& m : j) out.push_back(parse_marginal(m));
    return out;
}

Json marginals_json(const std::vector<Marginal>& ms) {
    Json a = Json::array();
    for (const auto& m : ms) a.push_back(to_json(m));
    return a;
}

Json grid_json(const GridSpec& g) {
    switch (g.kind) {
        case GridSpec::Kind::list: return g.values;
        case GridSpec::Kind::log_range:
            return Json{{"log_range", {{"from", g.from}, {"to", g.to}, {"points", g.points}}}};
        case GridSpec::Kind::tail_levels: return Json{{"tail_levels", g.values}};
    }
    return Json();
}

GridSpec parse_grid(const Json& j) {
    GridSpec g;
    if (j.is_array()) {
        g.kind = GridSpec::Kind::list;
        g.values = num_list(j, "grids.x");
    } else if (j.is_object() && j.contains("log_range")) {
        const Json& r = j.at("log_range");
        g.kind = GridSpec::Kind::log_range;
        g.from = num(r, "from", "grids.x.log_range.");
        g.to = num(r, "to", "grids.x.log_range.");
        const Json& p = need(r, "points", "grids.x.log_range.");
        if (!p.is_number_integer() || p.get<long long>() < 1) bad("grids.x.log_range.points", "expected a positive integer");
        g.points = p.get<std::size_t>();
    } else if (j.is_object() && j.contains("tail_levels")) {
        g.kind = GridSpec::Kind::tail_levels;
        g.values = num_list(j.at("tail_levels"), "grids.x.tail_levels");
    } else {
        bad("grids.x", "expected a list, {\"log_range\": ...} or {\"tail_levels\": ...}");
    }
    return g;
}

}  // namespace

std::vector<double> GridSpec::resolve(const JointRiskModel& m, const WeightSpec& w) const {
    std::vector<double> out;
    switch (kind) {
        case Kind::list: out = values; break;
        case Kind::log_range: {
            if (!(from > 0.0 && to >= from)) throw DomainError("log_range needs 0 < from <= to");
            if (points == 1) {
                out.push_back(from);
                break;
            }
            const double a = std::log(from), b = std::log(to);
            for (std::size_t k = 0; k < points; ++k)
                out.push_back(std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1)));
            break;
        }
        case Kind::tail_levels: {
            double c0 = 1.0;
            if (const auto* f = std::get_if<FixedWeights>(&w)) c0 = f->c.at(0);
            else c0 = std::get<RandomWeights>(w).c0.upper();
            const double start = c0 * m.marginal(0).quantile(0.5);
            for (double level : values) {
                if (!(level > 0.0 && level < 1.0)) throw DomainError("tail level must lie in (0, 1)");
                out.push_back(solve_decreasing_log([&](double x) { return approx_tail(m, w, x); }, level, start));
            }
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string to_string(Pipeline p) {
    switch (p) {
        case Pipeline::approx: return "approx";
        case Pipeline::simulate: return "simulate";
        case Pipeline::curve: return "curve";
        case Pipeline::var: return "var";
        case Pipeline::cte: return "cte";
        case Pipeline::diagnose: return "diagnose";
        case Pipeline::full: return "full";
    }
    return "full";
}

Pipeline parse_pipeline(const std::string& s) {
    for (Pipeline p : {Pipeline::approx, Pipeline::simulate, Pipeline::curve, Pipeline::var, Pipeline::cte,
                       Pipeline::diagnose, Pipeline::full})
        if (to_string(p) == s) return p;
    bad("pipeline", "unknown pipeline '" + s + "'");
}

// ---------------------------------------------------------------------------

BoundedLaw parse_law(const Json& j) {
    if (j.is_number()) return BoundedLaw::point(j.get<double>());
    if (j.is_object() && j.contains("atoms")) {
        std::vector<BoundedLaw::Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
                bad("atoms", "each atom is [value, probability]");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        return BoundedLaw::atoms(std::move(atoms));
    }
    if (j.is_object() && j.contains("beta")) {
        const Json& b = j.at("beta");
        return BoundedLaw::scaled_beta(num(b, "a", "beta."), num(b, "b", "beta."), num(b, "lo", "beta."),
                                       num(b, "hi", "beta."));
    }
    bad("law", "expected a number, {\"atoms\": ...} or {\"beta\": ...}");
}

Json to_json(const BoundedLaw& law) {
    if (law.is_atomic()) {
        Json a = Json::array();
        for (const auto& at : law.atom_list()) a.push_back({at.value, at.prob});
        return Json{{"atoms", a}};
    }
    const auto& b = law.beta();
    return Json{{"beta", {{"a", b.a}, {"b", b.b}, {"lo", b.lo}, {"hi", b.hi}}}};
}

Marginal parse_marginal(const Json& j) {
    const Json& fam = need(j, "family", "marginal.");
    if (!fam.is_string()) bad("marginal.family", "expected a string");
    const std::string f = fam.get<std::string>();
    try {
        if (f == "exponential") return Marginal::exponential(num(j, "rate", "marginal."));
        if (f == "pareto") return Marginal::pareto(num(j, "alpha", "marginal."), num(j, "xmin", "marginal."));
        if (f == "lognormal") return Marginal::lognormal(num(j, "mu", "marginal."), num(j, "sigma", "marginal."));
        if (f == "weibull") return Marginal::heavy_weibull(num(j, "rate", "marginal."), num(j, "shape", "marginal."));
        if (f == "randomized_lognormal")
            return Marginal::randomized_lognormal(num(j, "mu", "marginal."), num(j, "sigma", "marginal."),
                                                  parse_law(need(j, "w", "marginal.")));
    } catch (const DomainError& e) {
        bad("marginal", e.what());
    }
    bad("marginal.family", "unknown family '" + f + "'");
}

Json to_json(const Marginal& m) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>) return {{"family", "exponential"}, {"rate", p.rate}};
            else if constexpr (std::is_same_v<T, Pareto>)
                return {{"family", "pareto"}, {"alpha", p.alpha}, {"xmin", p.xmin}};
            else if constexpr (std::is_same_v<T, Lognormal>)
                return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
            else if constexpr (std::is_same_v<T, HeavyWeibull>)
                return {{"family", "weibull"}, {"rate", p.rate}, {"shape", p.shape}};
            else
                return {{"family", "randomized_lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}, {"w", to_json(p.w)}};
        },
        m.params());
}

ScalingFunction parse_scaling(const Json& j) {
    const Json& form = need(j, "form", "scaling.");
    if (!form.is_string()) bad("scaling.form", "expected a string");
    const std::string f = form.get<std::string>();
    try {
        if (f == "constant") return ScalingFunction::constant(num(j, "c", "scaling."));
        if (f == "power") return ScalingFunction::power(num(j, "coef", "scaling."), num(j, "exponent", "scaling."));
        if (f == "lognormal_type")
            return ScalingFunction::lognormal_type(num(j, "sigma", "scaling."), num(j, "mu", "scaling."));
        if (f == "weibull_type")
            return ScalingFunction::weibull_type(num(j, "rate", "scaling."), num(j, "shape", "scaling."));
        if (f == "power_of")
            return ScalingFunction::power_of(parse_scaling(need(j, "base", "scaling.")), num(j, "p", "scaling."));
    } catch (const DomainError& e) {
        bad("scaling", e.what());
    }
    bad("scaling.form", "unknown form '" + f + "'");
}

Json to_json(const ScalingFunction& h) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            using S = ScalingFunction;
            if constexpr (std::is_same_v<T, S::Constant>) return {{"form", "constant"}, {"c", p.c}};
            else if constexpr (std::is_same_v<T, S::Power>)
                return {{"form", "power"}, {"coef", p.coef}, {"exponent", p.exponent}};
            else if constexpr (std::is_same_v<T, S::LognormalType>)
                return {{"form", "lognormal_type"}, {"sigma", p.sigma}, {"mu", p.mu}};
            else if constexpr (std::is_same_v<T, S::WeibullType>)
                return {{"form", "weibull_type"}, {"rate", p.rate}, {"shape", p.shape}};
            else
                return {{"form", "power_of"}, {"base", to_json(*p.base)}, {"p", p.p}};
        },
        h.form());
}

ScalingFunction parse_scaling_text(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) bad("h", "expected form:arg[,arg]");
    const std::string form = s.substr(0, colon);
    std::vector<double> args;
    std::stringstream ss(s.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            args.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            bad("h", "bad number '" + tok + "'");
        }
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n) bad("h", form + " takes " + std::to_string(n) + " argument(s)");
    };
    try {
        if (form == "constant") {
            want(1);
            return ScalingFunction::constant(args[0]);
        }
        if (form == "power") {
            want(2);
            return ScalingFunction::power(args[0], args[1]);
        }
        if (form == "lognormal_type") {
            want(2);
            return ScalingFunction::lognormal_type(args[0], args[1]);
        }
        if (form == "weibull_type") {
            want(2);
            return ScalingFunction::weibull_type(args[0], args[1]);
        }
    } catch (const DomainError& e) {
        bad("h", e.what());
    }
    bad("h", "unknown form '" + form + "'");
}

JointSpec parse_model(const Json& j) {
    const Json& kind_j = need(j, "kind", "model.");
    if (!kind_j.is_string()) bad("model.kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    if (kind == "independent") return IndependentSpec{parse_marginals(need(j, "marginals", "model."), "model.marginals")};
    if (kind == "comonotone") return ComonotoneSpec{parse_marginals(need(j, "marginals", "model."), "model.marginals")};
    if (kind == "gauss_lognormal") {
        GaussLognormalSpec g;
        g.mu = num_list(need(j, "mu", "model."), "model.mu");
        g.sigma = num_list(need(j, "sigma", "model."), "model.sigma");
        const Json& rho = need(j, "rho", "model.");
        if (!rho.is_array()) bad("model.rho", "expected a square matrix");
        const auto n = static_cast<Eigen::Index>(rho.size());
        g.rho = Eigen::MatrixXd(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            auto row = num_list(rho[static_cast<std::size_t>(r)], "model.rho");
            if (static_cast<Eigen::Index>(row.size()) != n) bad("model.rho", "expected a square matrix");
            for (Eigen::Index c = 0; c < n; ++c) g.rho(r, c) = row[static_cast<std::size_t>(c)];
        }
        if (j.contains("w")) {
            if (!j.at("w").is_array()) bad("model.w", "expected an array of laws");
            for (const auto& w : j.at("w")) g.w.push_back(parse_law(w));
        } else {
            g.w.assign(g.mu.size(), BoundedLaw::point(1.0));
        }
        if (j.contains("coupling")) {
            const std::string c = j.at("coupling").get<std::string>();
            if (c == "independent") g.coupling = WCoupling::independent;
            else if (c == "comonotone") g.coupling = WCoupling::comonotone;
            else bad("model.coupling", "expected independent or comonotone");
        }
        return g;
    }
    if (kind == "fgm") {
        FgmSpec f;
        f.marginals = parse_marginals(need(j, "marginals", "model."), "model.marginals");
        const Json& terms = need(j, "terms", "model.");
        if (!terms.is_array()) bad("model.terms", "expected an array");
        for (const auto& t : terms) {
            FgmTerm term{0, num(t, "theta", "model.terms.")};
            for (const auto& idx : need(t, "members", "model.terms.")) {
                if (!idx.is_number_integer()) bad("model.terms.members", "expected 1-based integer indices");
                const long long k = idx.get<long long>();
                if (k < 1 || k > static_cast<long long>(kMaxFgmDimension))
                    bad("model.terms.members", "index out of range");
                term.members |= (1u << (k - 1));
            }
            f.terms.push_back(term);
        }
        return f;
    }
    bad("model.kind", "unknown kind '" + kind + "'");
}

Json to_json(const JointSpec& spec) {
    return std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, IndependentSpec>)
                return {{"kind", "independent"}, {"marginals", marginals_json(s.marginals)}};
            else if constexpr (std::is_same_v<T, ComonotoneSpec>)
                return {{"kind", "comonotone"}, {"marginals", marginals_json(s.marginals)}};
            else if constexpr (std::is_same_v<T, GaussLognormalSpec>) {
                Json rho = Json::array();
                for (Eigen::Index r = 0; r < s.rho.rows(); ++r) {
                    Json row = Json::array();
                    for (Eigen::Index c = 0; c < s.rho.cols(); ++c) row.push_back(s.rho(r, c));
                    rho.push_back(row);
                }
                Json w = Json::array();
                for (const auto& law : s.w) w.push_back(to_json(law));
                return {{"kind", "gauss_lognormal"}, {"mu", s.mu},  {"sigma", s.sigma}, {"rho", rho},
                        {"w", w},                    {"coupling", s.coupling == WCoupling::independent ? "independent"
                                                                                                        : "comonotone"}};
            } else {
                Json terms = Json::array();
                for (const auto& t : s.terms) {
                    Json members = Json::array();
                    for (std::size_t k = 0; k < 32; ++k)
                        if (t.members & (1u << k)) members.push_back(k + 1);
                    terms.push_back({{"members", members}, {"theta", t.theta}});
                }
                return {{"kind", "fgm"}, {"marginals", marginals_json(s.marginals)}, {"terms", terms}};
            }
        },
        spec);
}

WeightSpec parse_weights(const Json& j) {
    if (j.is_array()) return FixedWeights::tight(num_list(j, "weights"));
    if (!j.is_object()) bad("weights", "expected an array or an object");
    if (j.contains("c")) {
        FixedWeights f = FixedWeights::tight(num_list(j.at("c"), "weights.c"));
        if (j.contains("box")) {
            const Json& b = j.at("box");
            f.box.a = num(b, "a", "weights.box.");
            f.box.b = num(b, "b", "weights.box.");
            f.box.d = num(b, "d", "weights.box.");
            f.box.signed_rest = b.value("signed", false);
        }
        return f;
    }
    if (j.contains("c0")) {
        RandomWeights r{parse_law(j.at("c0")), num_list(need(j, "rest", "weights."), "weights.rest"), 0.0};
        for (double c : r.rest) r.d = std::max(r.d, std::abs(c));
        if (j.contains("d")) r.d = num(j, "d", "weights.");
        return r;
    }
    bad("weights", "expected \"c\" (fixed) or \"c0\" (random)");
}

Json to_json(const WeightSpec& w) {
    if (const auto* f = std::get_if<FixedWeights>(&w))
        return {{"c", f->c},
                {"box", {{"a", f->box.a}, {"b", f->box.b}, {"d", f->box.d}, {"signed", f->box.signed_rest}}}};
    const auto& r = std::get<RandomWeights>(w);
    return {{"c0", to_json(r.c0)}, {"rest", r.rest}, {"d", r.d}};
}

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) bad("", "config must be a JSON object");
    ExperimentConfig c;
    c.name = j.value("name", std::string("experiment"));
    c.model = parse_model(need(j, "model", ""));
    c.weights = parse_weights(need(j, "weights", ""));
    const Json& grids = need(j, "grids", "");
    c.x_grid = parse_grid(need(grids, "x", "grids."));
    if (grids.contains("q")) c.q = num_list(grids.at("q"), "grids.q");
    if (grids.contains("t")) c.t = num_list(grids.at("t"), "grids.t");
    if (grids.contains("L")) c.L = num_list(grids.at("L"), "grids.L");
    if (grids.contains("y")) c.y = num_list(grids.at("y"), "grids.y");
    if (j.contains("omega")) {
        for (const auto& v : j.at("omega")) {
            if (!v.is_number_integer() || v.get<long long>() < 1) bad("omega", "expected 1-based indices");
            c.omega.push_back(v.get<std::size_t>() - 1);
        }
    }
    if (j.contains("candidates")) {
        for (const auto& h : j.at("candidates")) c.candidates.push_back(parse_scaling(h));
    }
    const Json& plan = need(j, "plan", "");
    const Json& seed = need(plan, "seed", "plan.");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
        bad("plan.seed", "expected a nonnegative integer");
    const Json& samples = need(plan, "samples", "plan.");
    if (!samples.is_number() || samples.get<double>() < 1) bad("plan.samples", "expected a positive count");
    c.plan = SimulationPlan::make(static_cast<std::uint64_t>(samples.get<double>()), seed.get<std::uint64_t>());
    if (plan.contains("chunk")) c.plan.chunk = plan.at("chunk").get<std::uint64_t>();
    if (plan.contains("confidence")) c.plan.confidence = num(plan, "confidence", "plan.");
    if (j.contains("pipeline")) c.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config(j);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("config has a value of the wrong type: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path_or_builtin) {
    if (std::filesystem::is_regular_file(path_or_builtin)) {
        std::ifstream in(path_or_builtin);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }
    for (auto& b : builtin_configs())
        if (b.name == path_or_builtin) return b.config;
    throw ValidationError("no config file or builtin named '" + path_or_builtin + "'");
}

Json to_json(const ExperimentConfig& c) {
    Json omega = Json::array();
    for (std::size_t i : c.omega) omega.push_back(i + 1);
    Json cands = Json::array();
    for (const auto& h : c.candidates) cands.push_back(to_json(h));
    return {{"name", c.name},
            {"model", to_json(c.model)},
            {"weights", to_json(c.weights)},
            {"grids", {{"x", grid_json(c.x_grid)}, {"q", c.q}, {"t", c.t}, {"L", c.L}, {"y", c.y}}},
            {"omega", omega},
            {"candidates", cands},
            {"plan",
             {{"samples", c.plan.samples},
              {"chunk", c.plan.chunk},
              {"seed", c.plan.seed},
              {"confidence", c.plan.confidence}}},
            {"pipeline", to_string(c.pipeline)},
            {"output", c.output}};
}

void validate_config(const ExperimentConfig& c) {
    JointRiskModel m(c.model);
    if (!m.validation()) throw ValidationError("model: " + m.validation().violation);
    const bool nonneg = std::all_of(m.marginals().begin(), m.marginals().end(),
                                    [](const Marginal& mg) { return mg.nonnegative(); });
    if (auto err = check_weights(c.weights, m.dimension(), nonneg)) throw ValidationError("weights: " + *err);
    if (auto err = c.plan.check()) throw ValidationError("plan: " + *err);
    const auto& g = c.x_grid;
    if (g.kind != GridSpec::Kind::log_range && g.values.empty()) throw ValidationError("grids.x is empty");
    if (g.kind == GridSpec::Kind::log_range && g.points == 0) throw ValidationError("grids.x is empty");
    for (double q : c.q)
        if (!(q > 0.0 && q < 1.0)) throw ValidationError("grids.q entries must lie in (0, 1)");
    for (const auto* list : {&c.t, &c.L})
        for (double v : *list)
            if (!(v > 0.0)) throw ValidationError("grids.t and grids.L entries must be positive");
    for (std::size_t i : c.omega)
        if (i >= m.dimension()) throw ValidationError("omega index " + std::to_string(i + 1) + " exceeds the dimension");
    const bool diag = c.pipeline == Pipeline::diagnose || c.pipeline == Pipeline::full;
    if (diag && c.candidates.empty()) throw ValidationError("candidates must be nonempty for diagnostics");
    if (diag && (c.t.empty() || c.L.empty() || c.y.empty())) throw ValidationError("grids.t, grids.L and grids.y must be nonempty");
    const bool cte = c.pipeline == Pipeline::cte || c.pipeline == Pipeline::full;
    if (cte && c.omega.empty()) throw ValidationError("omega must be nonempty for the cte pipeline");
    const bool var = cte || c.pipeline == Pipeline::var;
    if (var && c.q.empty()) throw ValidationError("grids.q must be nonempty for the var and cte pipelines");
}

std::string config_hash(const ExperimentConfig& c) {
    Json j = to_json(c);
    j.erase("output");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<BuiltinConfig> builtin_configs() {
    std::vector<BuiltinConfig> out;
    {
        GaussLognormalSpec g;
        g.mu = {0.0, 0.0, 0.0};
        g.sigma = {1.0, 1.0, 0.5};
        g.rho = Eigen::MatrixXd::Identity(3, 3);
        g.rho(0, 1) = g.rho(1, 0) = 0.2;
        g.w.assign(3, BoundedLaw::point(1.0));
        ExperimentConfig c;
        c.name = "example41";
        c.model = g;
        c.weights = FixedWeights::tight({1.0, 1.0, 1.0});
        c.x_grid = {GridSpec::Kind::tail_levels, {1e-2, 1e-3, 1e-4}};
        c.q = {0.99, 0.999};
        c.omega = {0, 1};
        c.candidates = {ScalingFunction::lognormal_type(1.0, 0.0)};
        c.plan = SimulationPlan::make(2'000'000, 41);
        c.output = "out/example41";
        out.push_back({"example41", "n=3 Gaussian lognormal, sigma=(1,1,0.5), rho12=0.2; dominating pair {1,2}", c});
    }
    {
        FgmSpec f;
        f.marginals.assign(3, Marginal::pareto(2.0, 1.0));
        f.terms = {{0b011, 0.5}, {0b101, 0.5}, {0b110, 0.5}, {0b111, 0.5}};
        ExperimentConfig c;
        c.name = "example42";
        c.model = f;
        c.weights = FixedWeights::tight({1.0, 1.0, 1.0});
        c.x_grid = {GridSpec::Kind::tail_levels, {1e-2, 1e-3, 1e-4}};
        c.q = {0.99, 0.999};
        c.omega = {0};
        c.candidates = {ScalingFunction::power(1.0, 0.75)};
        c.plan = SimulationPlan::make(2'000'000, 42);
        c.output = "out/example42";
        out.push_back({"example42", "n=3 FGM copula over Pareto(2,1), all theta=0.5", c});
    }
    {
        ExperimentConfig c;
        c.name = "negcontrol-exp";
        c.model = IndependentSpec{{Marginal::exponential(1.0), Marginal::exponential(1.0)}};
        c.weights = FixedWeights::tight({1.0, 1.0});
        c.x_grid = {GridSpec::Kind::list, {1.0, 2.0, 3.0, 4.0, 5.0}};
        c.q = {0.9, 0.99};
        c.omega = {0};
        c.candidates = {ScalingFunction::constant(1.0)};
        c.plan = SimulationPlan::make(1'000'000, 7);
        c.output = "out/negcontrol-exp";
        out.push_back({"negcontrol-exp", "n=2 iid Exponential(1); light-tailed negative control", c});
    }
    {
        ExperimentConfig c;
        c.name = "pareto-iid";
        c.model = IndependentSpec{std::vector<Marginal>(3, Marginal::pareto(2.0, 1.0))};
        c.weights = FixedWeights::tight({1.0, 1.0, 1.0});
        c.x_grid = {GridSpec::Kind::tail_levels, {1e-2, 1e-3, 1e-4}};
        c.q = {0.99, 0.999, 0.9999};
        c.omega = {0};
        c.candidates = {ScalingFunction::power(1.0, 0.75)};
        c.plan = SimulationPlan::make(10'000'000, 3);
        c.output = "out/pareto-iid";
        out.push_back({"pareto-iid", "n=3 iid Pareto(2,1)", c});
    }
    return out;
}

}  // namespace ordertail
