#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "stratopt/frame.hpp"
#include "stratopt/local_search.hpp"
#include "stratopt/pipeline.hpp"
#include "stratopt/report.hpp"
#include "stratopt/tuning.hpp"

namespace stratopt {

// All writers emit UTF-8 delimiter-separated text with a header row and a
// deterministic byte layout for identical inputs.

void write_basic_strata_csv(std::ostream& out, const Frame& frame, const StrataSet& strata);
void write_solution_csv(std::ostream& out, const Frame& frame, const StrataSet& strata,
                        const Stratification& s);
void write_allocation_csv(std::ostream& out, const Frame& frame, const StrataSet& strata,
                          const Stratification& s, const CostResult& cost);
void write_cv_summary_csv(std::ostream& out, const Frame& frame, const CostResult& cost,
                          const PrecisionSpec& spec);
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);
void write_stage_report_text(std::ostream& out, const std::vector<StageRow>& rows);
void write_stage_report_json(std::ostream& out, const std::string& combination,
                             const std::vector<StageRow>& rows);
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials);

// Reads a solution.csv back into a stratification over the same strata set.
Stratification load_solution_csv(std::istream& in, const Frame& frame, const StrataSet& strata);

// stage_report.json reader for cmd_report.
CombinationReport load_stage_report_json(const std::string& path);

}  // namespace stratopt
