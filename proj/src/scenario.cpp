#include "typeslab/scenario.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace typeslab {

std::string mode_name(ArithmeticMode m) {
    return m == ArithmeticMode::Exact ? "exact" : "log";
}

std::string format_name(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

int column_of(const std::string& raw, const std::string& needle) {
    auto pos = raw.find(needle);
    return pos == std::string::npos ? 1 : static_cast<int>(pos) + 1;
}

Rational parse_number_at(const std::string& tok, int line_no, const std::string& raw) {
    try {
        return parse_number(tok);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, column_of(raw, tok));
    }
}

struct ConstraintSpec {
    enum Kind { Coordinate, Mean, Moment, Sum } kind;
    int coordinate = 0;    // 1-based, Coordinate only
    long moment_order = 0; // Moment only
    std::vector<Rational> sum_coeffs;
    Relation rel;
    Rational bound;
};

// "p[1] >= 3/4" | "mean = 1/2" | "moment(2) <= 1" | "sum(a1,...,am) = c"
ConstraintSpec parse_constraint_spec(const std::string& text, int line_no) {
    const std::string raw = text;
    std::string s = trim(text);

    auto fail = [&](const std::string& msg, const std::string& where) -> ConstraintSpec {
        throw ParseError(msg, line_no, column_of(raw, where.empty() ? s : where));
    };

    // Split off the relation.
    std::size_t rel_pos = std::string::npos;
    std::size_t rel_len = 0;
    Relation rel = Relation::Eq;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '<' || s[i] == '>') {
            if (i + 1 >= s.size() || s[i + 1] != '=')
                fail(std::string("strict inequality '") + s[i] +
                     "' is not allowed; use <= or >=", std::string(1, s[i]));
            rel = s[i] == '<' ? Relation::Le : Relation::Ge;
            rel_pos = i;
            rel_len = 2;
            break;
        }
        if (s[i] == '=') {
            rel = Relation::Eq;
            rel_pos = i;
            rel_len = 1;
            break;
        }
    }
    if (rel_pos == std::string::npos) fail("expected a relation (=, <=, >=)", "");

    std::string lhs = trim(s.substr(0, rel_pos));
    std::string rhs = trim(s.substr(rel_pos + rel_len));
    if (lhs.empty()) fail("missing left-hand side", "");
    if (rhs.empty()) fail("missing bound after relation", "");

    ConstraintSpec spec;
    spec.rel = rel;
    spec.bound = parse_number_at(rhs, line_no, raw);

    if (lhs.rfind("p[", 0) == 0) {
        if (lhs.back() != ']') fail("expected ']' in coordinate constraint", lhs);
        std::string inner = lhs.substr(2, lhs.size() - 3);
        for (char c : inner)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                fail("coordinate index must be a positive integer", inner);
        if (inner.empty()) fail("missing coordinate index", lhs);
        spec.kind = ConstraintSpec::Coordinate;
        spec.coordinate = std::stoi(inner);
        if (spec.coordinate < 1) fail("coordinate index is 1-based", inner);
        return spec;
    }
    if (lhs == "mean") {
        spec.kind = ConstraintSpec::Mean;
        return spec;
    }
    if (lhs.rfind("moment(", 0) == 0 && lhs.back() == ')') {
        std::string inner = lhs.substr(7, lhs.size() - 8);
        for (char c : inner)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                fail("moment order must be a positive integer", inner);
        if (inner.empty()) fail("missing moment order", lhs);
        spec.kind = ConstraintSpec::Moment;
        spec.moment_order = std::stol(inner);
        if (spec.moment_order < 1) fail("moment order must be >= 1", inner);
        return spec;
    }
    if (lhs.rfind("sum(", 0) == 0 && lhs.back() == ')') {
        std::string inner = lhs.substr(4, lhs.size() - 5);
        std::string tok;
        std::istringstream in(inner);
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) fail("empty coefficient in sum(...)", inner);
            spec.sum_coeffs.push_back(parse_number_at(tok, line_no, raw));
        }
        if (spec.sum_coeffs.empty()) fail("sum(...) needs coefficients", lhs);
        spec.kind = ConstraintSpec::Sum;
        return spec;
    }
    fail("unrecognized constraint form '" + lhs + "'", lhs);
    return spec;  // unreachable
}

std::string canonical_constraint_text(const ConstraintSpec& spec) {
    std::string lhs;
    switch (spec.kind) {
        case ConstraintSpec::Coordinate:
            lhs = "p[" + std::to_string(spec.coordinate) + "]";
            break;
        case ConstraintSpec::Mean:
            lhs = "mean";
            break;
        case ConstraintSpec::Moment:
            lhs = "moment(" + std::to_string(spec.moment_order) + ")";
            break;
        case ConstraintSpec::Sum: {
            lhs = "sum(";
            for (std::size_t i = 0; i < spec.sum_coeffs.size(); ++i) {
                if (i) lhs += ",";
                lhs += format_rational(spec.sum_coeffs[i]);
            }
            lhs += ")";
            break;
        }
    }
    return lhs + " " + relation_symbol(spec.rel) + " " + format_rational(spec.bound);
}

LinearConstraint realize_constraint(const ConstraintSpec& spec, const Alphabet& alphabet,
                                    int line_no) {
    const int m = alphabet.size();
    std::vector<Rational> coeffs(static_cast<std::size_t>(m), Rational(0));
    switch (spec.kind) {
        case ConstraintSpec::Coordinate:
            if (spec.coordinate > m)
                throw ParseError("coordinate index " + std::to_string(spec.coordinate) +
                                     " exceeds alphabet size " + std::to_string(m),
                                 line_no, 1);
            coeffs[static_cast<std::size_t>(spec.coordinate - 1)] = 1;
            break;
        case ConstraintSpec::Mean:
            if (!alphabet.has_values())
                throw ParseError("mean constraint needs alphabet values", line_no, 1);
            for (int i = 0; i < m; ++i) coeffs[static_cast<std::size_t>(i)] = alphabet.value(i);
            break;
        case ConstraintSpec::Moment:
            if (!alphabet.has_values())
                throw ParseError("moment constraint needs alphabet values", line_no, 1);
            for (int i = 0; i < m; ++i)
                coeffs[static_cast<std::size_t>(i)] =
                    rational_pow(alphabet.value(i), static_cast<unsigned long>(spec.moment_order));
            break;
        case ConstraintSpec::Sum:
            if (static_cast<int>(spec.sum_coeffs.size()) != m)
                throw ParseError("sum(...) needs exactly " + std::to_string(m) +
                                     " coefficients, got " +
                                     std::to_string(spec.sum_coeffs.size()),
                                 line_no, 1);
            coeffs = spec.sum_coeffs;
            break;
    }
    LinearConstraint c(std::move(coeffs), spec.rel, spec.bound);
    c.text = canonical_constraint_text(spec);
    return c;
}

}  // namespace

LinearConstraint parse_constraint(const std::string& text, const Alphabet& alphabet,
                                  int line_no) {
    return realize_constraint(parse_constraint_spec(text, line_no), alphabet, line_no);
}

Scenario parse_scenario(const std::string& text) {
    enum class Section { Top, Alphabet, Set, Piece, Sweep, Output };

    std::string name;
    std::vector<std::string> labels;
    std::vector<Rational> values;
    std::vector<Rational> source_weights;
    std::string set_name;
    std::vector<std::vector<std::string>> piece_lines;  // raw constraint text
    std::vector<std::vector<int>> piece_line_nos;
    SweepSpec sweep;
    OutputSpec output;
    bool have_source = false, have_set = false;

    Section section = Section::Top;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        auto key_of = [&]() -> std::string {
            auto colon = line.find(':');
            if (colon == std::string::npos) return "";
            std::string k = trim(line.substr(0, colon));
            for (char c : k)
                if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return "";
            return k;
        };
        std::string key = key_of();
        std::string rest = key.empty() ? "" : trim(line.substr(line.find(':') + 1));

        if (key == "scenario") {
            if (rest.empty()) throw ParseError("scenario needs a name", line_no, 1);
            name = rest;
            section = Section::Top;
        } else if (key == "alphabet") {
            section = Section::Alphabet;
        } else if (key == "source") {
            section = Section::Top;
            if (rest.empty()) throw ParseError("source needs weights", line_no, 1);
            for (const std::string& tok : split_ws(rest))
                source_weights.push_back(parse_number_at(tok, line_no, raw));
            have_source = true;
        } else if (key == "set") {
            section = Section::Set;
            have_set = true;
            if (!rest.empty()) set_name = rest;
        } else if (key == "piece") {
            if (section != Section::Set && section != Section::Piece)
                throw ParseError("piece outside a set block", line_no, 1);
            section = Section::Piece;
            piece_lines.emplace_back();
            piece_line_nos.emplace_back();
        } else if (key == "sweep") {
            section = Section::Sweep;
            
        } else if (key == "output") {
            section = Section::Output;
        } else if (section == Section::Alphabet && key == "labels") {
            labels = split_ws(rest);
        } else if (section == Section::Alphabet && key == "values") {
            for (const std::string& tok : split_ws(rest))
                values.push_back(parse_number_at(tok, line_no, raw));
        } else if ((section == Section::Set || section == Section::Piece) && key == "name") {
            set_name = rest;
        } else if (section == Section::Sweep && key == "n") {
            for (const std::string& tok : split_ws(rest)) {
                Rational r = parse_number_at(tok, line_no, raw);
                if (r.get_den() != 1 || r < 1)
                    throw ParseError("n must be a positive integer", line_no,
                                     column_of(raw, tok));
                long value = static_cast<long>(r.get_num().get_si());
                if (!sweep.n_values.empty() && value <= sweep.n_values.back())
                    throw ParseError("n values must be strictly increasing", line_no,
                                     column_of(raw, tok));
                sweep.n_values.push_back(value);
            }
        } else if (section == Section::Sweep && key == "epsilon") {
            sweep.epsilon = parse_number_at(rest, line_no, raw);
            if (*sweep.epsilon <= 0)
                throw ParseError("epsilon must be positive", line_no, column_of(raw, rest));
        } else if (section == Section::Sweep && key == "prefix") {
            sweep.prefix = split_ws(rest);
        } else if (section == Section::Sweep && key == "samples") {
            Rational r = parse_number_at(rest, line_no, raw);
            if (r.get_den() != 1 || r < 0)
                throw ParseError("samples must be a nonnegative integer", line_no, 1);
            sweep.samples = static_cast<long>(r.get_num().get_si());
        } else if (section == Section::Sweep && key == "seed") {
            Rational r = parse_number_at(rest, line_no, raw);
            if (r.get_den() != 1 || r < 0)
                throw ParseError("seed must be a nonnegative integer", line_no, 1);
            sweep.seed = static_cast<std::uint64_t>(r.get_num().get_ui());
        } else if (section == Section::Output && key == "mode") {
            if (rest == "exact") output.mode = ArithmeticMode::Exact;
            else if (rest == "log") output.mode = ArithmeticMode::Log;
            else throw ParseError("mode must be 'exact' or 'log'", line_no, column_of(raw, rest));
        } else if (section == Section::Output && key == "format") {
            if (rest == "csv") output.format = OutputFormat::Csv;
            else if (rest == "json") output.format = OutputFormat::Json;
            else throw ParseError("format must be 'csv' or 'json'", line_no, column_of(raw, rest));
        } else if (section == Section::Piece) {
            piece_lines.back().push_back(line);
            piece_line_nos.back().push_back(line_no);
        } else {
            throw ParseError("unexpected line '" + line + "'", line_no, 1);
        }
    }

    if (name.empty()) throw ParseError("missing 'scenario:' header", line_no, 1);
    if (labels.empty()) throw ParseError("missing alphabet labels", line_no, 1);
    if (!have_source) throw ParseError("missing 'source:' line", line_no, 1);
    if (!have_set || piece_lines.empty())
        throw ParseError("missing 'set:' with at least one piece", line_no, 1);

    Scenario s;
    s.name = name;
    try {
        s.alphabet = Alphabet(labels, values);
        if (source_weights.size() != labels.size())
            throw std::invalid_argument("source needs one weight per label");
        s.source = Pmf::exact(source_weights);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, 1);
    }

    std::vector<ConvexPiece> pieces;
    for (std::size_t pi = 0; pi < piece_lines.size(); ++pi) {
        std::vector<LinearConstraint> cons;
        for (std::size_t li = 0; li < piece_lines[pi].size(); ++li)
            cons.push_back(parse_constraint(piece_lines[pi][li], s.alphabet,
                                            piece_line_nos[pi][li]));
        if (cons.empty())
            throw ParseError("piece " + std::to_string(pi + 1) + " has no constraints",
                             line_no, 1);
        pieces.emplace_back(s.alphabet.size(), std::move(cons));
    }
    s.set = FeasibleSet(s.alphabet.size(), std::move(pieces),
                        set_name.empty() ? name : set_name);

    for (const std::string& label : sweep.prefix)
        if (!s.alphabet.index_of(label))
            throw ParseError("prefix letter '" + label + "' is not in the alphabet",
                             line_no, 1);
    s.sweep = sweep;
    s.output = output;
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "scenario: " << s.name << "\n";
    out << "alphabet:\n";
    out << "  labels:";
    for (const std::string& l : s.alphabet.labels()) out << " " << l;
    out << "\n";
    if (s.alphabet.has_values()) {
        out << "  values:";
        for (const Rational& v : s.alphabet.values()) out << " " << format_rational(v);
        out << "\n";
    }
    out << "source:";
    for (int i = 0; i < s.source.size(); ++i)
        out << " " << format_rational(s.source.exact_value(i));
    out << "\n";
    out << "set: " << s.set.name() << "\n";
    for (int pi = 0; pi < s.set.piece_count(); ++pi) {
        out << "  piece:\n";
        for (const LinearConstraint& c : s.set.piece(pi).constraints()) {
            std::string text = c.text;
            if (text.empty()) {
                text = "sum(";
                for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
                    if (i) text += ",";
                    text += format_rational(c.coeffs[i]);
                }
                text += ") " + relation_symbol(c.rel) + " " + format_rational(c.bound);
            }
            out << "    " << text << "\n";
        }
    }
    if (!s.sweep.n_values.empty() || s.sweep.epsilon || !s.sweep.prefix.empty() ||
        s.sweep.samples > 0 || s.sweep.seed != 0) {
        out << "sweep:\n";
        if (!s.sweep.n_values.empty()) {
            out << "  n:";
            for (long n : s.sweep.n_values) out << " " << n;
            out << "\n";
        }
        if (s.sweep.epsilon) out << "  epsilon: " << format_rational(*s.sweep.epsilon) << "\n";
        if (!s.sweep.prefix.empty()) {
            out << "  prefix:";
            for (const std::string& l : s.sweep.prefix) out << " " << l;
            out << "\n";
        }
        if (s.sweep.samples > 0) out << "  samples: " << s.sweep.samples << "\n";
        if (s.sweep.seed != 0) out << "  seed: " << s.sweep.seed << "\n";
    }
    out << "output:\n";
    out << "  mode: " << mode_name(s.output.mode) << "\n";
    out << "  format: " << format_name(s.output.format) << "\n";
    return out.str();
}

}  // namespace typeslab
