// Compares the serial reference path (workers=1) against the OpenMP path on
// the domain-parallel kernels: cost evaluation and a clustering stage.

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "stratopt/pipeline.hpp"
#include "stratopt/synthetic.hpp"

using namespace stratopt;

namespace {

template <typename F>
double time_s(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP comparison on the domain-parallel kernels"};
    int records = 20000;
    int domains = 30;
    int workers = 0;
    int repeats = 3;
    app.add_option("--records", records, "synthetic frame size");
    app.add_option("--domains", domains, "number of domains");
    app.add_option("--workers", workers, "parallel worker count (0 = hardware)");
    app.add_option("--repeats", repeats, "timing repeats");
    CLI11_PARSE(app, argc, argv);

    SyntheticSpec spec;
    spec.records = records;
    spec.domains = domains;
    spec.seed = 20240717;
    const Frame frame = make_synthetic_frame(spec);
    const auto build = build_atomic_strata(frame);
    const PrecisionSpec precision{{0.05, 0.05}};

    const ExecPolicy serial{1};
    const ExecPolicy parallel{workers};
    std::printf("records=%d domains=%d basic_strata=%zu workers=%d\n", records, domains,
                build.set.items.size(), parallel.resolved());

    PipelineSpec scan;
    scan.mode = Mode::Atomic;
    scan.stages = {{StageKind::KmScan, {{"kmax", 20}}}};
    scan.precision = precision;
    scan.seed = 1234;

    double cost_serial = 0.0, cost_parallel = 0.0;
    Stratification strat;
    {
        const auto run = run_pipeline(frame, scan, serial);
        strat = run.solution.stratification;
    }

    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial_s", "parallel_s", "speedup");
    double ts = 0.0, tp = 0.0;
    for (int r = 0; r < repeats; ++r) {
        ts += time_s([&] { cost_serial = evaluate_cost(build.set, strat, precision, serial).total; });
        tp += time_s([&] { cost_parallel = evaluate_cost(build.set, strat, precision, parallel).total; });
    }
    std::printf("%-28s %12.4f %12.4f %8.2fx\n", "evaluate_cost", ts / repeats, tp / repeats,
                ts / tp);
    if (cost_serial != cost_parallel) {
        std::printf("MISMATCH: serial %.9f vs parallel %.9f\n", cost_serial, cost_parallel);
        return 1;
    }

    double scan_serial = 0.0, scan_parallel = 0.0;
    const double scan_ts = time_s([&] {
        scan_serial = run_pipeline(frame, scan, serial).solution.cost.total;
    });
    const double scan_tp = time_s([&] {
        scan_parallel = run_pipeline(frame, scan, parallel).solution.cost.total;
    });
    std::printf("%-28s %12.4f %12.4f %8.2fx\n", "kmeans_scan stage", scan_ts, scan_tp,
                scan_ts / scan_tp);
    if (scan_serial != scan_parallel) {
        std::printf("MISMATCH: serial %.9f vs parallel %.9f\n", scan_serial, scan_parallel);
        return 1;
    }

    std::printf("totals agree bit-for-bit (cost %.6f)\n", cost_serial);
    return 0;
}
