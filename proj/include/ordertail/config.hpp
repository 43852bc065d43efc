#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ordertail/asymptotics.hpp"
#include "ordertail/joint_models.hpp"
#include "ordertail/marginals.hpp"
#include "ordertail/montecarlo.hpp"

namespace ordertail {

using Json = nlohmann::json;

/// x-grid given as an explicit list, a log-spaced range, or a list of tail
/// levels of approx_tail to be solved for.
struct GridSpec {
    enum class Kind { list, log_range, tail_levels };
    Kind kind = Kind::list;
    std::vector<double> values;  // list entries or tail levels
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;

    std::vector<double> resolve(const JointRiskModel& m, const WeightSpec& w) const;
};

enum class Pipeline { approx, simulate, curve, var, cte, diagnose, full };

std::string to_string(Pipeline p);
Pipeline parse_pipeline(const std::string& s);

struct ExperimentConfig {
    std::string name;
    JointSpec model;
    WeightSpec weights;
    GridSpec x_grid;
    std::vector<double> q;
    std::vector<double> t{0.5, 1.0, 2.0};
    std::vector<double> L{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> y{-1.0, -0.5, 0.5, 1.0, 2.0};
    std::vector<std::size_t> omega;  // 0-based; 1-based in the file
    std::vector<ScalingFunction> candidates;
    SimulationPlan plan;
    Pipeline pipeline = Pipeline::full;
    std::string output = "out";
};

/// Throws ValidationError naming the offending key.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path_or_builtin);

Json to_json(const ExperimentConfig& c);
Json to_json(const JointSpec& spec);
Json to_json(const WeightSpec& w);
Json to_json(const ScalingFunction& h);
Json to_json(const Marginal& m);
Json to_json(const BoundedLaw& law);

JointSpec parse_model(const Json& j);
WeightSpec parse_weights(const Json& j);
ScalingFunction parse_scaling(const Json& j);
Marginal parse_marginal(const Json& j);
BoundedLaw parse_law(const Json& j);

/// Compact form used on the command line: "constant:c", "power:coef,exp",
/// "lognormal_type:sigma,mu", "weibull_type:rate,shape".
ScalingFunction parse_scaling_text(const std::string& s);

/// Semantic checks: indices within the dimension, grids nonempty, weights in
/// their box, plan consistent.
void validate_config(const ExperimentConfig& c);

/// 64-bit FNV-1a of the canonical serialization, output directory excluded.
std::string config_hash(const ExperimentConfig& c);

struct BuiltinConfig {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

std::vector<BuiltinConfig> builtin_configs();

}  // namespace ordertail
