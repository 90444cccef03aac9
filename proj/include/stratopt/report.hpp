#pragma once

#include <string>
#include <vector>

#include "stratopt/pipeline.hpp"

namespace stratopt {

struct CombinationReport {
    std::string combination;
    std::vector<StageRow> rows;
};

struct BenchmarkReport {
    std::string table_text;  // aligned stage table
    std::string plot_csv;    // combination,aggregated_total_time_s,sample_size
};

// One table row per stage and one plot point per combination (the final
// stage's sample size against its cumulative time).
BenchmarkReport benchmark_report(const std::vector<CombinationReport>& combos);

}  // namespace stratopt
