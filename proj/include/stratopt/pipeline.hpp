#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratopt/allocation.hpp"
#include "stratopt/clustering.hpp"
#include "stratopt/frame.hpp"
#include "stratopt/local_search.hpp"
#include "stratopt/strata.hpp"

namespace stratopt {

enum class Mode { Atomic, Continuous };

enum class StageKind {
    Km,
    KmScan,
    Em,
    Fc,
    Som,
    Ng,
    SomKm,
    SomEm,
    SomFc,
    NgKm,
    NgEm,
    NgFc,
    HillClimb,
};

std::string stage_kind_name(StageKind kind);
StageKind parse_stage_kind(const std::string& name);

// Numeric parameters, flat dotted keys (e.g. "som.iterations", "kmax", "m").
using ParamMap = std::map<std::string, double>;

struct StageSpec {
    StageKind kind = StageKind::KmScan;
    ParamMap params;

    double get(const std::string& key, double fallback) const {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    int get_int(const std::string& key, int fallback) const {
        return static_cast<int>(get(key, fallback));
    }
};

struct PipelineSpec {
    Mode mode = Mode::Atomic;
    std::vector<StageSpec> stages;
    PrecisionSpec precision;
    std::uint64_t seed = 0;

    // At most one HILL_CLIMB and only as the last stage; at least one
    // clustering stage. Throws ConfigError otherwise.
    void validate() const;
};

// One row of the stage report (sample size, per-stage and cumulative time).
struct StageRow {
    int stage = 0;
    std::string algorithm;
    double sample_size = 0.0;
    double time_s = 0.0;
    double cumulative_time_s = 0.0;
};

struct Solution {
    Stratification stratification;
    CostResult cost;
};

struct RunResult {
    Solution solution;
    std::vector<StageRow> report;
    std::vector<Stratification> stage_stratifications;  // aligned with report
    StrataBuild strata;
    std::vector<TraceEntry> trace;  // hill-climbing trace when that stage ran
};

// Builds the basic strata for the requested mode, runs the stages in order
// threading the stratification forward, and reports per-stage sample size and
// wall time. Per-domain clustering work parallelises across exec workers.
RunResult run_pipeline(const Frame& frame, const PipelineSpec& spec, const ExecPolicy& exec = {});

}  // namespace stratopt
