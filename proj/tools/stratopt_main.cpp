// Command-line front end: build-strata, optimize, tune, report.
// Exit codes: 0 success, 2 config/parse error, 3 infeasible precision,
// 4 internal fault.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratopt/errors.hpp"
#include "stratopt/exports.hpp"
#include "stratopt/report.hpp"
#include "stratopt/run_config.hpp"

namespace fs = std::filesystem;
using namespace stratopt;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file (JSON)")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--workers", args.workers, "override the worker count (0 = hardware)");
    cmd->add_option("--out", args.out_dir, "override the output directory");
}

RunConfig load_with_overrides(const CommonArgs& args) {
    RunConfig config = load_run_config(args.config_path);
    if (args.seed) config.seed = *args.seed;
    if (args.workers) config.workers = *args.workers;
    if (args.out_dir) config.out_dir = *args.out_dir;
    return config;
}

Frame load_input(const RunConfig& config) {
    std::ifstream in(config.input);
    if (!in) throw ConfigError("cannot open input '" + config.input + "'");
    return load_frame(in, config.schema, config.delimiter);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

int cmd_build_strata(const CommonArgs& args) {
    const RunConfig config = load_with_overrides(args);
    const Frame frame = load_input(config);
    const StrataBuild build = config.mode == Mode::Atomic ? build_atomic_strata(frame)
                                                          : build_continuous_strata(frame);
    fs::create_directories(config.out_dir);
    auto out = open_out(fs::path(config.out_dir) / "basic_strata.csv");
    write_basic_strata_csv(out, frame, build.set);
    std::cout << build.set.items.size() << " basic strata in " << build.set.domains()
              << " domains\n";
    return 0;
}

int cmd_optimize(const CommonArgs& args) {
    const RunConfig config = load_with_overrides(args);
    const Frame frame = load_input(config);
    const auto result = run_pipeline(frame, config.pipeline(), config.exec());

    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);
    {
        auto out = open_out(dir / "solution.csv");
        write_solution_csv(out, frame, result.strata.set, result.solution.stratification);
    }
    {
        auto out = open_out(dir / "allocation.csv");
        write_allocation_csv(out, frame, result.strata.set, result.solution.stratification,
                             result.solution.cost);
    }
    {
        auto out = open_out(dir / "cv_summary.csv");
        write_cv_summary_csv(out, frame, result.solution.cost, config.precision);
    }
    if (!result.trace.empty()) {
        auto out = open_out(dir / "trace.csv");
        write_trace_csv(out, result.trace);
    }
    {
        auto out = open_out(dir / "stage_report.txt");
        write_stage_report_text(out, result.report);
    }
    {
        auto out = open_out(dir / "stage_report.json");
        write_stage_report_json(out, config.combination, result.report);
    }

    write_stage_report_text(std::cout, result.report);
    std::printf("%.2f\n", result.solution.cost.total);
    return 0;
}

int cmd_tune(const CommonArgs& args) {
    const RunConfig config = load_with_overrides(args);
    if (!config.has_tune) throw ConfigError("config: 'tune' section required for the tune command");
    const Frame frame = load_input(config);
    const auto tuned = random_search_tune(frame, config.pipeline(), config.space, config.budget,
                                          config.seed, config.exec());

    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);
    {
        auto out = open_out(dir / "trials.csv");
        write_trials_csv(out, tuned.trials);
    }
    {
        // Best trial's parameters merged back into the template; the file is a
        // complete config that cmd_optimize reproduces exactly.
        std::ifstream in(args.config_path);
        nlohmann::json j = nlohmann::json::parse(in);
        j.erase("tune");
        j["seed"] = tuned.best().seed;
        for (auto& stage : j.at("stages")) {
            if (stage.at("kind").get<std::string>() == "HILL_CLIMB") continue;
            for (const auto& [key, value] : tuned.best().params) stage[key] = value;
        }
        auto out = open_out(dir / "best_config.json");
        out << j.dump(2) << '\n';
    }
    std::printf("best trial %d sample size %.2f\n", tuned.best_trial, tuned.best().sample_size);
    return 0;
}

int cmd_report(const CommonArgs& args) {
    const RunConfig config = load_with_overrides(args);
    if (config.reports.empty()) throw ConfigError("config: 'reports' list required for the report command");
    std::vector<CombinationReport> combos;
    for (const auto& path : config.reports) combos.push_back(load_stage_report_json(path));
    const auto report = benchmark_report(combos);
    fs::create_directories(config.out_dir);
    {
        auto out = open_out(fs::path(config.out_dir) / "benchmark_table.txt");
        out << report.table_text;
    }
    {
        auto out = open_out(fs::path(config.out_dir) / "plot_data.csv");
        out << report.plot_csv;
    }
    std::cout << report.table_text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint stratification and sample allocation"};
    app.require_subcommand(1);

    CommonArgs build_args, optimize_args, tune_args, report_args;
    auto* build = app.add_subcommand("build-strata", "construct basic strata and export them");
    add_common(build, build_args);
    auto* optimize = app.add_subcommand("optimize", "run the configured pipeline");
    add_common(optimize, optimize_args);
    auto* tune = app.add_subcommand("tune", "random-search the hyperparameters");
    add_common(tune, tune_args);
    auto* report = app.add_subcommand("report", "benchmark table and plot data from stage reports");
    add_common(report, report_args);

    try {
        app.parse(argc, argv);
        if (build->parsed()) return cmd_build_strata(build_args);
        if (optimize->parsed()) return cmd_optimize(optimize_args);
        if (tune->parsed()) return cmd_tune(tune_args);
        if (report->parsed()) return cmd_report(report_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
