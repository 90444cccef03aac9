#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stratopt/pipeline.hpp"

namespace stratopt {

struct ParamRange {
    enum class Kind { Real, Integer, Choice };
    Kind kind = Kind::Real;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> choices;
};

// Tunable hyperparameters and their sampling ranges. Keys match the stage
// parameter keys, so a sampled value drops straight into a StageSpec.
struct ParamSpace {
    std::map<std::string, ParamRange> ranges;

    // Envelopes around the magnitudes that published tunings of these
    // algorithms tend to use.
    static ParamSpace defaults();
    void validate() const;
};

struct TrialRecord {
    int trial = 0;
    ParamMap params;
    double sample_size = 0.0;
    std::vector<double> stage_times;
    double total_time = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
};

struct TuneResult {
    int best_trial = -1;
    std::vector<TrialRecord> trials;

    const TrialRecord& best() const { return trials[best_trial]; }
};

// Uniform random search: budget parameter vectors sampled from the space with
// per-trial derived streams, each evaluated by run_pipeline on a copy of the
// template. Failing trials are recorded and excluded from best-selection;
// at least one trial must succeed. Trials run concurrently up to the worker
// count; the log is ordered by trial index regardless of completion order.
TuneResult random_search_tune(const Frame& frame, const PipelineSpec& spec_template,
                              const ParamSpace& space, int budget, std::uint64_t seed,
                              const ExecPolicy& exec = {});

// The sampled parameter vector of one trial (exposed for replay checks).
ParamMap sample_params(const ParamSpace& space, std::uint64_t seed, int trial);

// Template with one trial's parameters merged into every clustering stage.
PipelineSpec apply_params(const PipelineSpec& spec_template, const ParamMap& params,
                          std::uint64_t pipeline_seed);

}  // namespace stratopt
