#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stratopt/errors.hpp"
#include "stratopt/exports.hpp"
#include "stratopt/run_config.hpp"
#include "stratopt/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace stratopt;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

const char* kConfigJson = R"({
  "input": "frame.csv",
  "schema": {"domain": "dom", "targets": ["Y1", "Y2"], "auxiliaries": ["X1"]},
  "mode": "atomic",
  "precision": {"epsilon": [0.05, 0.08]},
  "seed": 1234,
  "workers": 2,
  "out": "results",
  "stages": [
    {"kind": "KM_SCAN", "kmax": 12},
    {"kind": "HILL_CLIMB", "stall_limit": 500}
  ]
})";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(STRATOPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("stratopt_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("run config parses every section") {
    const auto config = parse_run_config_text(kConfigJson);
    CHECK(config.input == "frame.csv");
    CHECK(config.schema.domain == "dom");
    CHECK(config.schema.targets.size() == 2);
    CHECK(config.mode == Mode::Atomic);
    CHECK(config.precision.epsilon[1] == doctest::Approx(0.08));
    CHECK(config.seed == 1234);
    CHECK(config.workers == 2);
    CHECK(config.out_dir == "results");
    REQUIRE(config.stages.size() == 2);
    CHECK(config.stages[0].kind == StageKind::KmScan);
    CHECK(config.stages[0].get_int("kmax", 0) == 12);
    CHECK(config.stages[1].get_int("stall_limit", 0) == 500);
    CHECK(config.combination == "KM_SCAN>HILL_CLIMB");
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(parse_run_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_run_config_text(R"({"precision": {"epsilon": [0.0]}, "seed": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config_text(R"({"precision": {"epsilon": [0.05]}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config_text(R"({"seed": 1, "stages": [{"kmax": 3}]})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config_text(R"({"seed": 1, "mode": "banana"})"), ConfigError);
}

TEST_CASE("solution export round-trips and rescores identically") {
    SyntheticSpec sspec;
    sspec.records = 400;
    sspec.domains = 3;
    sspec.seed = 21;
    const auto frame = make_synthetic_frame(sspec);
    PipelineSpec pspec;
    pspec.mode = Mode::Atomic;
    pspec.stages = {{StageKind::KmScan, {{"kmax", 8}}}};
    pspec.precision = PrecisionSpec{{0.05, 0.05}};
    pspec.seed = 3;
    const auto run = run_pipeline(frame, pspec);

    std::ostringstream out;
    write_solution_csv(out, frame, run.strata.set, run.solution.stratification);
    std::istringstream in(out.str());
    const auto loaded = load_solution_csv(in, frame, run.strata.set);
    CHECK(loaded.labels == run.solution.stratification.labels);
    const auto rescored = evaluate_cost(run.strata.set, loaded, pspec.precision);
    CHECK(rescored.total == doctest::Approx(run.solution.cost.total).epsilon(1e-9));
}

TEST_CASE("basic strata export carries the documented columns") {
    const Schema schema{"dom", {"Y1"}, {"X1"}};
    const auto frame = frame_from_csv("dom,Y1,X1\nd,2,a\nd,4,a\nd,9,b\n", schema);
    const auto build = build_atomic_strata(frame);
    std::ostringstream out;
    write_basic_strata_csv(out, frame, build.set);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "id,domain,N,M_1,S_1");
    std::string row;
    std::getline(lines, row);
    CHECK(row == "0,d,2,3,1");
}

TEST_CASE("trace and trials exports are well formed") {
    std::vector<TraceEntry> trace = {{1, 10.5, true}, {2, 10.5, false}};
    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str() == "iteration,total_cost,accepted\n1,10.500000,1\n2,10.500000,0\n");

    TrialRecord t1;
    t1.trial = 0;
    t1.ok = true;
    t1.sample_size = 50.25;
    t1.total_time = 1.5;
    t1.seed = 9;
    t1.params["m"] = 3;
    TrialRecord t2;
    t2.trial = 1;
    t2.ok = false;
    t2.error = "boom";
    t2.total_time = 0.5;
    t2.seed = 10;
    t2.params["m"] = 4;
    std::ostringstream trials;
    write_trials_csv(trials, {t1, t2});
    std::istringstream lines(trials.str());
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(header == "trial,status,sample_size,total_time_s,seed,param:m");
    CHECK(row1 == "0,ok,50.250000,1.500000,9,3");
    CHECK(row2 == "1,failed,,0.500000,10,4");
}

TEST_CASE("cli end to end: optimize is deterministic, exit codes are mapped") {
    TempDir dir;
    // Write a small frame and a config pointing at it.
    SyntheticSpec sspec;
    sspec.records = 300;
    sspec.domains = 2;
    sspec.seed = 31;
    const auto frame = make_synthetic_frame(sspec);
    {
        std::ofstream csv(dir.path / "frame.csv");
        csv << "domain,Y1,Y2,X1,X2\n";
        for (const auto& rec : frame.records) {
            csv << frame.domain_levels[rec.domain] << ',' << rec.targets[0] << ',' << rec.targets[1]
                << ',' << frame.aux_levels[0][rec.auxiliaries[0]] << ','
                << frame.aux_levels[1][rec.auxiliaries[1]] << '\n';
        }
    }
    const std::string config = R"({
      "input": ")" + (dir.path / "frame.csv").string() + R"(",
      "schema": {"domain": "domain", "targets": ["Y1", "Y2"], "auxiliaries": ["X1", "X2"]},
      "mode": "atomic",
      "precision": {"epsilon": [0.05, 0.05]},
      "seed": 77,
      "workers": 1,
      "out": ")" + (dir.path / "out").string() + R"(",
      "stages": [{"kind": "KM_SCAN", "kmax": 6}, {"kind": "HILL_CLIMB", "stall_limit": 200}]
    })";
    {
        std::ofstream cfg(dir.path / "run.json");
        cfg << config;
    }

    const std::string cfg_arg = "--config " + (dir.path / "run.json").string();
    {
        // The final sample size is the last stdout line, two decimals.
        const std::string cmd = std::string(STRATOPT_CLI_PATH) + " optimize " + cfg_arg + " 2>/dev/null | tail -1 > " +
                                (dir.path / "last.txt").string();
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        const auto last = slurp(dir.path / "last.txt");
        REQUIRE(!last.empty());
        const auto dot = last.find('.');
        REQUIRE(dot != std::string::npos);
        CHECK(last.substr(dot + 1).size() == 3);  // two decimals + newline
        CHECK(std::stod(last) > 0.0);
    }
    CHECK(run_cli("optimize " + cfg_arg) == 0);
    const auto solution_a = slurp(dir.path / "out" / "solution.csv");
    const auto alloc_a = slurp(dir.path / "out" / "allocation.csv");
    CHECK(!solution_a.empty());
    CHECK(run_cli("optimize " + cfg_arg) == 0);
    CHECK(slurp(dir.path / "out" / "solution.csv") == solution_a);
    CHECK(slurp(dir.path / "out" / "allocation.csv") == alloc_a);

    // build-strata writes one row per basic stratum plus the header.
    CHECK(run_cli("build-strata " + cfg_arg) == 0);
    const auto strata_csv = slurp(dir.path / "out" / "basic_strata.csv");
    const auto rows = std::count(strata_csv.begin(), strata_csv.end(), '\n');
    const auto build = build_atomic_strata(frame);
    CHECK(rows == static_cast<long>(build.set.items.size()) + 1);

    // Infeasible precision exits 3 and names the target: a target whose total
    // is zero while variance remains has an undefined CV.
    {
        {
            std::ofstream csv(dir.path / "zero.csv");
            csv << "domain,Y1,X1\nd,1,a\nd,-1,b\nd,2,a\nd,-2,b\n";
        }
        std::ofstream cfg(dir.path / "zero.json");
        cfg << R"({
          "input": ")" << (dir.path / "zero.csv").string() << R"(",
          "schema": {"domain": "domain", "targets": ["Y1"], "auxiliaries": ["X1"]},
          "mode": "atomic",
          "precision": {"epsilon": [0.05]},
          "seed": 1,
          "out": ")" << (dir.path / "zero_out").string() << R"(",
          "stages": [{"kind": "KM_SCAN", "kmax": 2}]
        })";
        cfg.close();
        const std::string cmd = std::string(STRATOPT_CLI_PATH) + " optimize --config " +
                                (dir.path / "zero.json").string() + " 2>" +
                                (dir.path / "zero.err").string() + " >/dev/null";
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
        CHECK(slurp(dir.path / "zero.err").find("target") != std::string::npos);
    }

    // Config errors exit 2.
    CHECK(run_cli("optimize --config " + (dir.path / "missing.json").string()) == 2);
    {
        std::ofstream cfg(dir.path / "bad.json");
        cfg << R"({"seed": 1, "stages": [{"kind": "NOPE"}]})";
    }
    CHECK(run_cli("optimize --config " + (dir.path / "bad.json").string()) == 2);

    // Report consumes the stage report and emits the plot data.
    {
        std::ofstream cfg(dir.path / "report.json");
        cfg << R"({"seed": 1, "out": ")" << (dir.path / "rep").string() << R"(",
               "reports": [")" << (dir.path / "out" / "stage_report.json").string() << R"("]})";
    }
    CHECK(run_cli("report --config " + (dir.path / "report.json").string()) == 0);
    const auto plot = slurp(dir.path / "rep" / "plot_data.csv");
    CHECK(plot.rfind("combination,aggregated_total_time_s,sample_size\n", 0) == 0);

    // Tune writes trials and a replayable best config.
    {
        std::ofstream cfg(dir.path / "tune.json");
        cfg << R"({
          "input": ")" << (dir.path / "frame.csv").string() << R"(",
          "schema": {"domain": "domain", "targets": ["Y1", "Y2"], "auxiliaries": ["X1", "X2"]},
          "mode": "atomic",
          "precision": {"epsilon": [0.05, 0.05]},
          "seed": 99,
          "workers": 1,
          "out": ")" << (dir.path / "tuned").string() << R"(",
          "stages": [{"kind": "FC", "k": 3}],
          "tune": {"budget": 5, "space": {"m": [2, 6]}}
        })";
    }
    CHECK(run_cli("tune --config " + (dir.path / "tune.json").string()) == 0);
    const auto trials = slurp(dir.path / "tuned" / "trials.csv");
    CHECK(std::count(trials.begin(), trials.end(), '\n') == 6);  // header + 5 trials
    CHECK(fs::exists(dir.path / "tuned" / "best_config.json"));
}
