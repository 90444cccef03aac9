#pragma once

#include <string>

#include "stratopt/pipeline.hpp"
#include "stratopt/tuning.hpp"

namespace stratopt {

// One config file fully determines a run (no wall-clock seeding anywhere).
struct RunConfig {
    std::string input;
    char delimiter = ',';
    Schema schema;
    Mode mode = Mode::Atomic;
    PrecisionSpec precision;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware threads
    std::string out_dir = "out";
    std::vector<StageSpec> stages;
    std::string combination;  // report label; defaults to the stage kinds joined

    // tune section (cmd_tune only)
    bool has_tune = false;
    int budget = 0;
    ParamSpace space;

    // report section (cmd_report only): stage_report.json paths
    std::vector<std::string> reports;

    PipelineSpec pipeline() const;
    ExecPolicy exec() const { return ExecPolicy{workers}; }
};

RunConfig parse_run_config_text(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace stratopt
