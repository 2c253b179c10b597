#include "typeslab/report.hpp"

#include <cmath>
#include <cstdio>

namespace typeslab {

const char* const kCsvHeader = "scenario,command,n,kind,index_j,quantity,value,mode,seconds";

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string record_value(const RunRecord& r) {
    return r.value_text.empty() ? format_double(r.value) : r.value_text;
}

std::string to_csv_row(const RunRecord& r) {
    std::string row;
    row += r.scenario;
    row += ',';
    row += r.command;
    row += ',';
    row += std::to_string(r.n);
    row += ',';
    row += r.kind;
    row += ',';
    row += std::to_string(r.index_j);
    row += ',';
    row += r.quantity;
    row += ',';
    row += record_value(r);
    row += ',';
    row += r.mode;
    row += ',';
    row += format_double(r.seconds);
    return row;
}

void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << kCsvHeader << '\n';
    for (const RunRecord& r : records) os << to_csv_row(r) << '\n';
}

nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["command"] = r.command;
    j["n"] = r.n;
    j["kind"] = r.kind;
    j["index_j"] = r.index_j;
    if (!r.value_text.empty())
        j["value"] = r.value_text;
    else if (std::isfinite(r.value))
        j["value"] = r.value;
    else
        j["value"] = format_double(r.value);
    j["quantity"] = r.quantity;
    j["mode"] = r.mode;
    j["seconds"] = r.seconds;
    return j;
}

nlohmann::json to_json(const ProjectionSet& set) {
    nlohmann::json j;
    j["kind"] = kind_name(set.kind);
    j["n"] = set.n;
    j["k"] = set.k();
    j["degenerate"] = set.degenerate;
    j["warnings"] = set.warnings;
    nlohmann::json pts = nlohmann::json::array();
    for (const ProjectionPoint& p : set.points) {
        nlohmann::json pj;
        pj["point"] = p.point;
        if (p.type) pj["counts"] = p.type->counts;
        if (std::isfinite(p.log_objective))
            pj["log_objective"] = p.log_objective;
        else
            pj["log_objective"] = format_double(p.log_objective);
        pj["objective"] = p.objective;
        pj["proper"] = p.proper;
        pj["piece_index"] = p.piece_index;
        if (!p.multipliers.empty()) pj["multipliers"] = p.multipliers;
        pts.push_back(std::move(pj));
    }
    j["points"] = std::move(pts);
    return j;
}

nlohmann::json report_json(const std::vector<RunRecord>& records,
                           const std::vector<ProjectionSet>& projections) {
    nlohmann::json j;
    nlohmann::json rows = nlohmann::json::array();
    for (const RunRecord& r : records) rows.push_back(to_json(r));
    j["records"] = std::move(rows);
    nlohmann::json sets = nlohmann::json::array();
    for (const ProjectionSet& s : projections) sets.push_back(to_json(s));
    j["projections"] = std::move(sets);
    return j;
}

void write_json(std::ostream& os, const std::vector<RunRecord>& records,
                const std::vector<ProjectionSet>& projections) {
    os << report_json(records, projections).dump(2) << '\n';
}

}  // namespace typeslab
