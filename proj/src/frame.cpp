#include "stratopt/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "stratopt/errors.hpp"

namespace stratopt {
namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delimiter) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_real(const std::string& cell, int line_no, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
        throw ParseError("non-numeric value '" + cell + "' in column '" + column + "' at line " +
                         std::to_string(line_no));
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite value '" + cell + "' in column '" + column + "' at line " +
                         std::to_string(line_no));
    }
    return value;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("column '" + name + "' not found in header");
    return static_cast<int>(it - header.begin());
}

}  // namespace

Frame load_frame(std::istream& in, const Schema& schema, char delimiter) {
    if (schema.domain.empty()) throw ConfigError("schema: domain column not set");
    if (schema.targets.empty()) throw ConfigError("schema: at least one target column required");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: header row missing");
    const auto header = split_line(line, delimiter);

    const int domain_col = find_column(header, schema.domain);
    std::vector<int> target_cols, aux_cols;
    for (const auto& name : schema.targets) target_cols.push_back(find_column(header, name));
    for (const auto& name : schema.auxiliaries) aux_cols.push_back(find_column(header, name));

    Frame frame;
    frame.schema = schema;
    const std::size_t ncols = header.size();
    const int g = static_cast<int>(target_cols.size());
    const int c = static_cast<int>(aux_cols.size());

    // Tokens are collected first and interned against sorted level tables
    // afterwards, so level codes compare like the label strings do.
    std::vector<std::string> domain_tokens;
    std::vector<std::vector<std::string>> aux_tokens(c);

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line, delimiter);
        if (cells.size() != ncols) {
            throw ParseError("expected " + std::to_string(ncols) + " cells, got " +
                             std::to_string(cells.size()) + " at line " + std::to_string(line_no));
        }
        Record rec;
        rec.targets.resize(g);
        for (int j = 0; j < g; ++j) {
            rec.targets[j] = parse_real(cells[target_cols[j]], line_no, schema.targets[j]);
        }
        if (cells[domain_col].empty()) {
            throw ParseError("empty domain cell at line " + std::to_string(line_no));
        }
        domain_tokens.push_back(cells[domain_col]);
        for (int j = 0; j < c; ++j) {
            const std::string& cell = cells[aux_cols[j]];
            aux_tokens[j].push_back(cell.empty() ? std::string(kMissingToken) : cell);
        }
        frame.records.push_back(std::move(rec));
    }

    auto intern = [](const std::vector<std::string>& tokens, std::vector<std::string>& levels) {
        std::map<std::string, int> codes;
        for (const auto& t : tokens) codes.emplace(t, 0);
        levels.clear();
        levels.reserve(codes.size());
        int next = 0;
        for (auto& [token, code] : codes) {
            code = next++;
            levels.push_back(token);
        }
        std::vector<int> out(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = codes.at(tokens[i]);
        return out;
    };

    const auto domain_codes = intern(domain_tokens, frame.domain_levels);
    frame.aux_levels.resize(c);
    std::vector<std::vector<int>> aux_codes(c);
    for (int j = 0; j < c; ++j) aux_codes[j] = intern(aux_tokens[j], frame.aux_levels[j]);

    for (std::size_t i = 0; i < frame.records.size(); ++i) {
        frame.records[i].domain = domain_codes[i];
        frame.records[i].auxiliaries.resize(c);
        for (int j = 0; j < c; ++j) frame.records[i].auxiliaries[j] = aux_codes[j][i];
    }
    return frame;
}

}  // namespace stratopt
