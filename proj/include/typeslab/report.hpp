#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "typeslab/projections.hpp"

namespace typeslab {

// One output row. `value_text` overrides the numeric column when the value is
// not an ordinary finite number ("inf", "undefined", "pass", "fail").
struct RunRecord {
    std::string scenario;
    std::string command;
    long n = 0;  // 0 marks rows about the asymptotic object, not a sample size
    std::string kind;
    int index_j = 0;
    std::string quantity;
    double value = 0;
    std::string value_text;
    std::string mode;
    double seconds = 0;
};

std::string format_double(double v);  // 12 significant digits, inf/nan spelled out
std::string record_value(const RunRecord& r);

extern const char* const kCsvHeader;
std::string to_csv_row(const RunRecord& r);
void write_csv(std::ostream& os, const std::vector<RunRecord>& records);

nlohmann::json to_json(const RunRecord& r);
nlohmann::json to_json(const ProjectionSet& set);
nlohmann::json report_json(const std::vector<RunRecord>& records,
                           const std::vector<ProjectionSet>& projections);
void write_json(std::ostream& os, const std::vector<RunRecord>& records,
                const std::vector<ProjectionSet>& projections);

}  // namespace typeslab
