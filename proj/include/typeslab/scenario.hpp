#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "typeslab/alphabet.hpp"
#include "typeslab/feasible_set.hpp"
#include "typeslab/pmf.hpp"

namespace typeslab {

enum class ArithmeticMode { Exact, Log };
enum class OutputFormat { Csv, Json };

std::string mode_name(ArithmeticMode m);
std::string format_name(OutputFormat f);

struct SweepSpec {
    std::vector<long> n_values;
    std::optional<Rational> epsilon;
    std::vector<std::string> prefix;  // labels, outermost first
    long samples = 0;
    std::uint64_t seed = 0;
};

struct OutputSpec {
    ArithmeticMode mode = ArithmeticMode::Exact;
    OutputFormat format = OutputFormat::Csv;
};

// A fully described experiment: alphabet, iid source, feasible set, sweep.
struct Scenario {
    std::string name;
    Alphabet alphabet;
    Pmf source;
    FeasibleSet set;
    SweepSpec sweep;
    OutputSpec output;

    int m() const { return alphabet.size(); }
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error("line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ": " + msg),
          line(line_), column(column_) {}
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Canonical text form; parse(serialize(s)) re-serializes identically.
std::string serialize_scenario(const Scenario& s);

// Parses one constraint line ("p[1] >= 3/4", "mean = 1/2", "moment(2) <= 1",
// "sum(0,1,-1) = 0") against an alphabet. Strict inequalities are rejected.
LinearConstraint parse_constraint(const std::string& text, const Alphabet& alphabet,
                                  int line_no = 0);

}  // namespace typeslab
