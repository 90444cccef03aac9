#include "stratopt/run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stratopt/errors.hpp"

namespace stratopt {
namespace {

using nlohmann::json;

StageSpec parse_stage(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: each stage needs a 'kind'");
    }
    StageSpec stage;
    stage.kind = parse_stage_kind(j.at("kind").get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") continue;
        if (!value.is_number()) {
            throw ConfigError("config: stage parameter '" + key + "' must be numeric");
        }
        stage.params[key] = value.get<double>();
    }
    return stage;
}

ParamRange parse_range(const std::string& key, const json& j) {
    ParamRange range;
    if (j.is_object() && j.contains("choices")) {
        range.kind = ParamRange::Kind::Choice;
        for (const auto& c : j.at("choices")) range.choices.push_back(c.get<double>());
        return range;
    }
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError("config: tune range for '" + key + "' must be [lo, hi]");
    }
    range.lo = j.at(0).get<double>();
    range.hi = j.at(1).get<double>();
    const bool integral = j.at(0).is_number_integer() && j.at(1).is_number_integer();
    range.kind = integral ? ParamRange::Kind::Integer : ParamRange::Kind::Real;
    return range;
}

}  // namespace

PipelineSpec RunConfig::pipeline() const {
    PipelineSpec spec;
    spec.mode = mode;
    spec.stages = stages;
    spec.precision = precision;
    spec.seed = seed;
    return spec;
}

RunConfig parse_run_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        RunConfig config;
        if (j.contains("input")) config.input = j.at("input").get<std::string>();
        if (j.contains("delimiter")) {
            const auto d = j.at("delimiter").get<std::string>();
            if (d.size() != 1) throw ConfigError("config: delimiter must be one character");
            config.delimiter = d[0];
        }
        if (j.contains("schema")) {
            const auto& s = j.at("schema");
            config.schema.domain = s.at("domain").get<std::string>();
            for (const auto& t : s.at("targets")) config.schema.targets.push_back(t.get<std::string>());
            if (s.contains("auxiliaries")) {
                for (const auto& a : s.at("auxiliaries")) {
                    config.schema.auxiliaries.push_back(a.get<std::string>());
                }
            }
        }
        if (j.contains("mode")) {
            const auto m = j.at("mode").get<std::string>();
            if (m == "atomic") {
                config.mode = Mode::Atomic;
            } else if (m == "continuous") {
                config.mode = Mode::Continuous;
            } else {
                throw ConfigError("config: mode must be 'atomic' or 'continuous'");
            }
        }
        if (j.contains("precision")) {
            for (const auto& e : j.at("precision").at("epsilon")) {
                config.precision.epsilon.push_back(e.get<double>());
            }
            for (double e : config.precision.epsilon) {
                if (!(e > 0.0) || !(e < 1.0)) throw ConfigError("config: epsilon must be in (0,1)");
            }
        }
        if (!j.contains("seed")) throw ConfigError("config: 'seed' is required (no wall-clock seeding)");
        config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("workers")) config.workers = j.at("workers").get<int>();
        if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
        if (j.contains("stages")) {
            for (const auto& s : j.at("stages")) config.stages.push_back(parse_stage(s));
        }
        if (j.contains("combination")) {
            config.combination = j.at("combination").get<std::string>();
        } else {
            std::ostringstream name;
            for (std::size_t i = 0; i < config.stages.size(); ++i) {
                if (i) name << '>';
                name << stage_kind_name(config.stages[i].kind);
            }
            config.combination = name.str();
        }
        if (j.contains("tune")) {
            config.has_tune = true;
            const auto& t = j.at("tune");
            config.budget = t.at("budget").get<int>();
            if (t.contains("space")) {
                for (const auto& [key, value] : t.at("space").items()) {
                    config.space.ranges[key] = parse_range(key, value);
                }
            } else {
                config.space = ParamSpace::defaults();
            }
            config.space.validate();
        }
        if (j.contains("reports")) {
            for (const auto& r : j.at("reports")) config.reports.push_back(r.get<std::string>());
        }
        return config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config_text(buffer.str());
}

}  // namespace stratopt
