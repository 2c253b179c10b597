#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "typeslab/scenario.hpp"

using namespace typeslab;

namespace {

const char* kS1 =
    "scenario: s1\n"
    "alphabet:\n"
    "  labels: a b\n"
    "source: 1/2 1/2\n"
    "set: upper-tail\n"
    "  piece:\n"
    "    p[1] >= 3/4\n"
    "sweep:\n"
    "  n: 4 8 12\n"
    "  epsilon: 1/20\n"
    "  prefix: a\n"
    "  samples: 1000\n"
    "  seed: 42\n"
    "output:\n"
    "  mode: exact\n"
    "  format: csv\n";

const char* kS3 =
    "scenario: s3\n"
    "alphabet:\n"
    "  labels: -1 0 1\n"
    "  values: -1 0 1\n"
    "source: 1/3 1/3 1/3\n"
    "set: half-mean\n"
    "  piece:\n"
    "    mean = 1/2\n"
    "  piece:\n"
    "    mean = -1/2\n"
    "output:\n"
    "  mode: log\n"
    "  format: json\n";

int parse_error_line(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e.line;
    }
    return -1;
}

}  // namespace

TEST_CASE("a full scenario parses") {
    Scenario s = parse_scenario(kS1);
    CHECK(s.name == "s1");
    CHECK(s.m() == 2);
    CHECK(s.alphabet.label(0) == "a");
    CHECK_FALSE(s.alphabet.has_values());
    CHECK(s.source.exact_value(0) == Rational(1, 2));
    CHECK(s.set.name() == "upper-tail");
    REQUIRE(s.set.piece_count() == 1);
    CHECK(s.set.contains_type({3, 1}, 4));
    CHECK_FALSE(s.set.contains_type({2, 2}, 4));
    CHECK(s.sweep.n_values == std::vector<long>{4, 8, 12});
    CHECK(s.sweep.epsilon == Rational(1, 20));
    CHECK(s.sweep.prefix == std::vector<std::string>{"a"});
    CHECK(s.sweep.samples == 1000);
    CHECK(s.sweep.seed == 42);
    CHECK(s.output.mode == ArithmeticMode::Exact);
    CHECK(s.output.format == OutputFormat::Csv);
}

TEST_CASE("values, mean constraints and signed labels") {
    Scenario s = parse_scenario(kS3);
    CHECK(s.alphabet.has_values());
    CHECK(s.alphabet.value(0) == Rational(-1));
    REQUIRE(s.set.piece_count() == 2);
    // mean 1/2 at n = 4 needs c[2] - c[0] = 2
    CHECK(s.set.contains_type({0, 2, 2}, 4));
    CHECK(s.set.contains_type({2, 2, 0}, 4));  // second piece, mean -1/2
    CHECK_FALSE(s.set.contains_type({1, 2, 1}, 4));
    CHECK(s.output.mode == ArithmeticMode::Log);
    CHECK(s.output.format == OutputFormat::Json);
}

TEST_CASE("serialization round-trips to a fixed point") {
    for (const char* text : {kS1, kS3}) {
        Scenario first = parse_scenario(text);
        std::string one = serialize_scenario(first);
        Scenario second = parse_scenario(one);
        std::string two = serialize_scenario(second);
        CHECK(one == two);
    }
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text = std::string("# experiment\n\n") + kS1 + "# trailing\n";
    Scenario s = parse_scenario(text);
    CHECK(s.name == "s1");
}

TEST_CASE("strict inequalities are rejected with guidance") {
    std::string bad = kS1;
    bad.replace(bad.find(">="), 2, "> ");
    try {
        parse_scenario(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("strict inequality") != std::string::npos);
        CHECK(msg.find("<= or >=") != std::string::npos);
        CHECK(e.line == 7);
    }
}

TEST_CASE("error positions point at the offending token") {
    // bad source weight on line 4
    std::string bad = kS1;
    bad.replace(bad.find("1/2 1/2"), 7, "1/2 oops");
    CHECK(parse_error_line(bad) == 4);

    // n values must increase
    std::string unsorted = kS1;
    unsorted.replace(unsorted.find("4 8 12"), 6, "8 4 12");
    CHECK(parse_error_line(unsorted) == 9);
}

TEST_CASE("structural validation") {
    CHECK(parse_error_line("alphabet:\n  labels: a b\nsource: 1 0\n") > 0);  // no name
    CHECK(parse_error_line("scenario: x\nsource: 1 0\n") > 0);               // no labels
    CHECK(parse_error_line("scenario: x\nalphabet:\n  labels: a b\n") > 0);  // no source

    // weight count mismatch
    std::string bad = kS1;
    bad.replace(bad.find("source: 1/2 1/2"), 15, "source: 1/2 1/4 1/4");
    CHECK(parse_error_line(bad) > 0);

    // weights must sum to one
    std::string off = kS1;
    off.replace(off.find("source: 1/2 1/2"), 15, "source: 1/2 1/3");
    CHECK(parse_error_line(off) > 0);

    // prefix letter must exist
    std::string ghost = kS1;
    ghost.replace(ghost.find("prefix: a"), 9, "prefix: c");
    CHECK(parse_error_line(ghost) > 0);

    // epsilon must be positive
    std::string eps = kS1;
    eps.replace(eps.find("epsilon: 1/20"), 13, "epsilon: 0");
    CHECK(parse_error_line(eps) == 10);

    // mean constraint needs values
    std::string mean = kS1;
    mean.replace(mean.find("p[1] >= 3/4"), 11, "mean = 1/2");
    CHECK(parse_error_line(mean) > 0);
}

TEST_CASE("constraint forms against an alphabet with values") {
    Alphabet ab({"-1", "0", "1"}, {Rational(-1), Rational(0), Rational(1)});

    LinearConstraint coord = parse_constraint("p[2] <= 1/3", ab);
    CHECK(coord.rel == Relation::Le);
    CHECK(coord.coeffs == std::vector<Rational>{0, 1, 0});
    CHECK(coord.bound == Rational(1, 3));

    LinearConstraint mean = parse_constraint("mean = 1/2", ab);
    CHECK(mean.rel == Relation::Eq);
    CHECK(mean.coeffs == std::vector<Rational>{-1, 0, 1});

    LinearConstraint mom = parse_constraint("moment(2) >= 1/4", ab);
    CHECK(mom.coeffs == std::vector<Rational>{1, 0, 1});

    LinearConstraint sum = parse_constraint("sum(1,-2,1/2) <= 0", ab);
    CHECK(sum.coeffs == std::vector<Rational>{1, -2, Rational(1, 2)});

    CHECK_THROWS_AS(parse_constraint("p[0] >= 1/2", ab), ParseError);   // 1-based
    CHECK_THROWS_AS(parse_constraint("p[4] >= 1/2", ab), ParseError);   // out of range
    CHECK_THROWS_AS(parse_constraint("sum(1,2) = 0", ab), ParseError);  // wrong arity
    CHECK_THROWS_AS(parse_constraint("entropy >= 1", ab), ParseError);
    CHECK_THROWS_AS(parse_constraint("p[1] 1/2", ab), ParseError);      // no relation
}

TEST_CASE("canonical text survives in constraints") {
    Scenario s = parse_scenario(kS1);
    CHECK(s.set.piece(0).constraints()[0].text == "p[1] >= 3/4");
}
