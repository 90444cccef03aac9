#include "stratopt/report.hpp"

#include <cstdio>
#include <sstream>

#include "stratopt/errors.hpp"

namespace stratopt {
namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace

BenchmarkReport benchmark_report(const std::vector<CombinationReport>& combos) {
    if (combos.empty()) throw ConfigError("report: no stage reports given");

    std::vector<std::vector<std::string>> cells;
    cells.push_back({"combination", "stage", "algorithm", "sample_size", "time_s", "cumulative_time_s"});
    for (const auto& combo : combos) {
        for (const auto& row : combo.rows) {
            cells.push_back({combo.combination, std::to_string(row.stage), row.algorithm,
                             fixed(row.sample_size, 2), fixed(row.time_s, 2),
                             fixed(row.cumulative_time_s, 2)});
        }
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream table;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            table << row[c];
            if (c + 1 < row.size()) table << std::string(width[c] - row[c].size() + 2, ' ');
        }
        table << '\n';
    }

    std::ostringstream plot;
    plot << "combination,aggregated_total_time_s,sample_size\n";
    for (const auto& combo : combos) {
        if (combo.rows.empty()) throw ConfigError("report: combination '" + combo.combination + "' has no rows");
        const auto& last = combo.rows.back();
        plot << combo.combination << ',' << fixed(last.cumulative_time_s, 6) << ','
             << fixed(last.sample_size, 6) << '\n';
    }

    BenchmarkReport out;
    out.table_text = table.str();
    out.plot_csv = plot.str();
    return out;
}

}  // namespace stratopt
