#include "stratopt/exports.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stratopt/errors.hpp"

namespace stratopt {
namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_basic_strata_csv(std::ostream& out, const Frame& frame, const StrataSet& strata) {
    out << "id,domain,N";
    for (int g = 0; g < strata.targets; ++g) out << ",M_" << g + 1;
    for (int g = 0; g < strata.targets; ++g) out << ",S_" << g + 1;
    out << '\n';
    for (const auto& b : strata.items) {
        out << b.id << ',' << frame.domain_levels[b.domain] << ',' << b.n;
        for (double m : b.mean) out << ',' << num(m);
        for (double s : b.sd) out << ',' << num(s);
        out << '\n';
    }
}

void write_solution_csv(std::ostream& out, const Frame& frame, const StrataSet& strata,
                        const Stratification& s) {
    out << "domain,basic_stratum_id,stratum_label\n";
    for (int d = 0; d < strata.domains(); ++d) {
        const auto items = strata.domain_items(d);
        for (std::size_t i = 0; i < items.size(); ++i) {
            out << frame.domain_levels[d] << ',' << items[i].id << ',' << s.labels[d][i] << '\n';
        }
    }
}

void write_allocation_csv(std::ostream& out, const Frame& frame, const StrataSet& strata,
                          const Stratification& s, const CostResult& cost) {
    out << "domain,stratum,N_h,n_h\n";
    for (int d = 0; d < strata.domains(); ++d) {
        const auto summaries = summarize(strata, s, d);
        for (std::size_t h = 0; h < summaries.size(); ++h) {
            out << frame.domain_levels[d] << ',' << h + 1 << ',' << summaries[h].n << ','
                << fixed6(cost.per_domain[d].n[h]) << '\n';
        }
    }
}

void write_cv_summary_csv(std::ostream& out, const Frame& frame, const CostResult& cost,
                          const PrecisionSpec& spec) {
    out << "domain,target,achieved_cv,epsilon\n";
    for (std::size_t d = 0; d < cost.per_domain.size(); ++d) {
        for (std::size_t g = 0; g < spec.epsilon.size(); ++g) {
            out << frame.domain_levels[d] << ',' << frame.schema.targets[g] << ','
                << fixed6(cost.per_domain[d].achieved_cv[g]) << ',' << fixed6(spec.epsilon[g]) << '\n';
        }
    }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "iteration,total_cost,accepted\n";
    for (const auto& t : trace) {
        out << t.iteration << ',' << fixed6(t.total_cost) << ',' << (t.accepted ? 1 : 0) << '\n';
    }
}

void write_stage_report_text(std::ostream& out, const std::vector<StageRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"stage", "algorithm", "sample_size", "time_s", "cumulative_time_s"});
    for (const auto& r : rows) {
        char size_buf[64], time_buf[64], cum_buf[64];
        std::snprintf(size_buf, sizeof(size_buf), "%.2f", r.sample_size);
        std::snprintf(time_buf, sizeof(time_buf), "%.2f", r.time_s);
        std::snprintf(cum_buf, sizeof(cum_buf), "%.2f", r.cumulative_time_s);
        cells.push_back({std::to_string(r.stage), r.algorithm, size_buf, time_buf, cum_buf});
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
        }
        out << '\n';
    }
}

void write_stage_report_json(std::ostream& out, const std::string& combination,
                             const std::vector<StageRow>& rows) {
    nlohmann::json j;
    j["combination"] = combination;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"stage", r.stage},
                             {"algorithm", r.algorithm},
                             {"sample_size", r.sample_size},
                             {"time_s", r.time_s},
                             {"cumulative_time_s", r.cumulative_time_s}});
    }
    out << j.dump(2) << '\n';
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
    std::set<std::string> keys;
    for (const auto& t : trials) {
        for (const auto& [key, value] : t.params) keys.insert(key);
    }
    out << "trial,status,sample_size,total_time_s,seed";
    for (const auto& key : keys) out << ",param:" << key;
    out << '\n';
    for (const auto& t : trials) {
        out << t.trial << ',' << (t.ok ? "ok" : "failed") << ','
            << (t.ok ? fixed6(t.sample_size) : std::string()) << ',' << fixed6(t.total_time) << ','
            << t.seed;
        for (const auto& key : keys) {
            const auto it = t.params.find(key);
            out << ',' << (it == t.params.end() ? std::string() : num(it->second));
        }
        out << '\n';
    }
}

Stratification load_solution_csv(std::istream& in, const Frame& frame, const StrataSet& strata) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("solution file: missing header");
    std::map<std::string, int> domain_code;
    for (int d = 0; d < frame.domain_count(); ++d) domain_code[frame.domain_levels[d]] = d;

    Stratification s;
    s.labels.resize(strata.domains());
    s.h.assign(strata.domains(), 0);
    for (int d = 0; d < strata.domains(); ++d) s.labels[d].assign(strata.domain_size(d), 0);

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string domain, id_str, label_str;
        if (!std::getline(cells, domain, ',') || !std::getline(cells, id_str, ',') ||
            !std::getline(cells, label_str)) {
            throw ParseError("solution file: malformed line " + std::to_string(line_no));
        }
        const auto it = domain_code.find(domain);
        if (it == domain_code.end()) {
            throw ParseError("solution file: unknown domain '" + domain + "'");
        }
        const int d = it->second;
        const int id = std::stoi(id_str);
        const int label = std::stoi(label_str);
        if (id < 0 || id >= strata.domain_size(d)) {
            throw ParseError("solution file: basic stratum id out of range at line " +
                             std::to_string(line_no));
        }
        s.labels[d][id] = label;
        s.h[d] = std::max(s.h[d], label);
    }
    s.validate(strata);
    return s;
}

CombinationReport load_stage_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("report: invalid JSON in '" + path + "': " + e.what());
    }
    CombinationReport combo;
    try {
        combo.combination = j.at("combination").get<std::string>();
        for (const auto& r : j.at("rows")) {
            StageRow row;
            row.stage = r.at("stage").get<int>();
            row.algorithm = r.at("algorithm").get<std::string>();
            row.sample_size = r.at("sample_size").get<double>();
            row.time_s = r.at("time_s").get<double>();
            row.cumulative_time_s = r.at("cumulative_time_s").get<double>();
            combo.rows.push_back(row);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("report: malformed stage report '" + path + "': " + e.what());
    }
    return combo;
}

}  // namespace stratopt
