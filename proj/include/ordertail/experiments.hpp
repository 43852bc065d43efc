#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordertail/config.hpp"

namespace ordertail {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineRecord {
    std::string name;
    std::vector<std::string> outputs;  // file names relative to the output directory
    double seconds = 0.0;
    bool ok = true;
    std::string error;
};

struct RunManifest {
    std::string name;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string version = kVersion;
    std::string output_dir;
    std::vector<PipelineRecord> pipelines;
    std::string assumptions;  // assumption_report summary when diagnostics ran
    std::string started;
    std::string finished;
    bool ok = true;

    Json to_json() const;
};

struct RunOptions {
    unsigned workers = 0;  // 0: ORDERTAIL_WORKERS or hardware concurrency
};

/// Validates, runs the selected pipeline(s) in dependency order and writes
/// CSV/JSON outputs plus manifest.json into c.output. Validation failures
/// throw before any sampling; pipeline failures are recorded in the manifest.
RunManifest run_experiment(const ExperimentConfig& c, const RunOptions& opts = {});

}  // namespace ordertail
