#pragma once

#include <istream>
#include <string>
#include <vector>

namespace stratopt {

// Column roles used when ingesting a population file.
struct Schema {
    std::string domain;
    std::vector<std::string> targets;
    std::vector<std::string> auxiliaries;
};

// One population unit. Domain and auxiliaries are interned level codes;
// the label tables live on the Frame.
struct Record {
    int domain = 0;
    std::vector<double> targets;
    std::vector<int> auxiliaries;
};

class Frame {
public:
    Schema schema;
    std::vector<std::string> domain_levels;               // sorted lexicographically
    std::vector<std::vector<std::string>> aux_levels;     // per auxiliary, sorted
    std::vector<Record> records;                          // file order

    int target_count() const { return static_cast<int>(schema.targets.size()); }
    int aux_count() const { return static_cast<int>(schema.auxiliaries.size()); }
    int domain_count() const { return static_cast<int>(domain_levels.size()); }
};

// Token used for an empty auxiliary cell; a missing category is its own level.
inline constexpr const char* kMissingToken = "__NA__";

// Reads a delimiter-separated stream with a header row. Throws ParseError on
// a missing schema column or a non-numeric/non-finite target cell (the message
// names the line and column).
Frame load_frame(std::istream& in, const Schema& schema, char delimiter = ',');

}  // namespace stratopt
