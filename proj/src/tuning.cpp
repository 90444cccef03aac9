#include "stratopt/tuning.hpp"

#include <algorithm>
#include <chrono>

#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

ParamSpace ParamSpace::defaults() {
    ParamSpace s;
    s.ranges["som.iterations"] = {ParamRange::Kind::Integer, 100, 10000, {}};
    s.ranges["som.alpha_hi"] = {ParamRange::Kind::Real, 0.1, 0.99, {}};
    s.ranges["som.alpha_lo"] = {ParamRange::Kind::Real, 0.001, 0.1, {}};
    s.ranges["som.radius"] = {ParamRange::Kind::Real, 0.001, 1.0, {}};
    s.ranges["ng.lambda_hi"] = {ParamRange::Kind::Integer, 1, 30, {}};
    s.ranges["ng.lambda_lo"] = {ParamRange::Kind::Real, 0.01, 1.0, {}};
    s.ranges["ng.eps_hi"] = {ParamRange::Kind::Real, 0.1, 0.5, {}};
    s.ranges["ng.eps_lo"] = {ParamRange::Kind::Real, 0.005, 0.1, {}};
    s.ranges["m"] = {ParamRange::Kind::Integer, 2, 11, {}};
    return s;
}

void ParamSpace::validate() const {
    for (const auto& [key, range] : ranges) {
        if (range.kind == ParamRange::Kind::Choice) {
            if (range.choices.empty()) throw ConfigError("param space: empty choice set for " + key);
        } else if (!(range.lo <= range.hi)) {
            throw ConfigError("param space: empty range for " + key);
        }
    }
}

ParamMap sample_params(const ParamSpace& space, std::uint64_t seed, int trial) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(trial) + 1, 0xB22));
    ParamMap out;
    for (const auto& [key, range] : space.ranges) {  // map order: deterministic
        double v = 0.0;
        switch (range.kind) {
            case ParamRange::Kind::Real:
                v = rng.uniform(range.lo, range.hi);
                break;
            case ParamRange::Kind::Integer:
                v = range.lo + static_cast<double>(
                                   rng.below(static_cast<std::uint64_t>(range.hi - range.lo) + 1));
                break;
            case ParamRange::Kind::Choice:
                v = range.choices[rng.below(range.choices.size())];
                break;
        }
        out[key] = v;
    }
    // hi >= lo pairs enforced at sampling.
    for (const auto& [hi, lo] : {std::pair<std::string, std::string>{"som.alpha_hi", "som.alpha_lo"},
                                 {"ng.lambda_hi", "ng.lambda_lo"},
                                 {"ng.eps_hi", "ng.eps_lo"}}) {
        const auto hi_it = out.find(hi);
        const auto lo_it = out.find(lo);
        if (hi_it != out.end() && lo_it != out.end() && lo_it->second > hi_it->second) {
            std::swap(hi_it->second, lo_it->second);
        }
    }
    return out;
}

PipelineSpec apply_params(const PipelineSpec& spec_template, const ParamMap& params,
                          std::uint64_t pipeline_seed) {
    PipelineSpec spec = spec_template;
    spec.seed = pipeline_seed;
    for (auto& stage : spec.stages) {
        if (stage.kind == StageKind::HillClimb) continue;
        for (const auto& [key, value] : params) stage.params[key] = value;
    }
    return spec;
}

TuneResult random_search_tune(const Frame& frame, const PipelineSpec& spec_template,
                              const ParamSpace& space, int budget, std::uint64_t seed,
                              const ExecPolicy& exec) {
    if (budget < 1) throw ConfigError("tune: budget must be >= 1");
    space.validate();
    spec_template.validate();

    TuneResult result;
    result.trials.resize(budget);
    // Trials parallelise at the outer level; each trial's pipeline runs on the
    // serial path to keep the worker budget honest.
    const ExecPolicy inner{1};
    parallel_for(budget, exec, [&](int t) {
        TrialRecord& rec = result.trials[t];
        rec.trial = t;
        rec.params = sample_params(space, seed, t);
        rec.seed = Rng::derive(seed, static_cast<std::uint64_t>(t) + 1, 0xA11);
        const auto spec = apply_params(spec_template, rec.params, rec.seed);
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto run = run_pipeline(frame, spec, inner);
            rec.sample_size = run.solution.cost.total;
            for (const auto& row : run.report) rec.stage_times.push_back(row.time_s);
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        rec.total_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    for (int t = 0; t < budget; ++t) {
        const auto& rec = result.trials[t];
        if (!rec.ok) continue;
        if (result.best_trial < 0 || rec.sample_size < result.trials[result.best_trial].sample_size) {
            result.best_trial = t;
        }
    }
    if (result.best_trial < 0) throw ConfigError("tune: every trial failed");
    return result;
}

}  // namespace stratopt
