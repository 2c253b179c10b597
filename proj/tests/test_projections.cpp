#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "typeslab/feasible_set.hpp"
#include "typeslab/projections.hpp"
#include "typeslab/types_core.hpp"

using namespace typeslab;

namespace {

LinearConstraint ge(std::vector<Rational> a, Rational b) {
    return LinearConstraint(std::move(a), Relation::Ge, std::move(b));
}
LinearConstraint le(std::vector<Rational> a, Rational b) {
    return LinearConstraint(std::move(a), Relation::Le, std::move(b));
}
LinearConstraint eq(std::vector<Rational> a, Rational b) {
    return LinearConstraint(std::move(a), Relation::Eq, std::move(b));
}

Pmf half_half() { return Pmf::exact({Rational(1, 2), Rational(1, 2)}); }
Pmf uniform3() { return Pmf::uniform(3); }

FeasibleSet s1() {
    return FeasibleSet(2, {ConvexPiece(2, {ge({1, 0}, Rational(3, 4))})}, "upper-tail");
}

FeasibleSet s2() {
    return FeasibleSet(2,
                       {ConvexPiece(2, {le({1, 0}, Rational(1, 4))}),
                        ConvexPiece(2, {ge({1, 0}, Rational(3, 4))})},
                       "two-tails");
}

FeasibleSet s3() {
    return FeasibleSet(3,
                       {ConvexPiece(3, {eq({-1, 0, 1}, Rational(1, 2))}),
                        ConvexPiece(3, {eq({-1, 0, 1}, Rational(-1, 2))})},
                       "half-mean");
}

// two-letter divergences restricted to the segment p = (x, 1-x)
double kl2(double x, double q1) {
    auto term = [](double p, double q) { return p > 0 ? p * std::log(p / q) : 0.0; };
    return term(x, q1) + term(1 - x, 1 - q1);
}

double j2(double x, double q1) {
    return kl2(x, q1) + kl2(q1, x);
}

}  // namespace

TEST_CASE("I-projection onto a half-space hits the boundary") {
    ProjectionSet ps = i_projections(half_half(), s1());
    REQUIRE(ps.k() == 1);
    const ProjectionPoint& pt = ps.points[0];
    CHECK(pt.point[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(pt.point[1] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(pt.objective == doctest::Approx(kl2(0.75, 0.5)).epsilon(1e-10));
    CHECK(pt.proper);
    CHECK(pt.piece_index == 0);

    // grid scan over the feasible edge as an independent oracle
    double best = 1e9;
    for (int i = 0; i <= 200000; ++i) {
        double x = 0.75 + 0.25 * i / 200000.0;
        best = std::min(best, kl2(x, 0.5));
    }
    CHECK(pt.objective == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("symmetric pieces tie and both minimizers are reported") {
    ProjectionSet ps = i_projections(half_half(), s2());
    REQUIRE(ps.k() == 2);
    // sorted by point
    CHECK(ps.points[0].point[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(ps.points[1].point[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(ps.points[0].objective ==
          doctest::Approx(ps.points[1].objective).epsilon(1e-12));
    CHECK(ps.points[0].proper);
    CHECK(ps.points[1].proper);
    CHECK(ps.warnings.empty());

    ProjectionSet js = j_projections(half_half(), s2());
    REQUIRE(js.k() == 2);
    CHECK(js.points[0].point[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(js.points[1].point[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(js.points[0].objective == doctest::Approx(j2(0.25, 0.5)).epsilon(1e-9));
    CHECK(js.points[1].objective == doctest::Approx(j2(0.75, 0.5)).epsilon(1e-9));
}

TEST_CASE("tilted solution on a mean constraint matches the closed form") {
    ProjectionSet ps = i_projections(uniform3(), s3());
    REQUIRE(ps.k() == 2);

    // On {mean = 1/2} with a uniform source the minimizer is exponential in
    // the values: p = (1/t, 1, t) / Z with t^2 - t - 3 = 0.
    double t = (1 + std::sqrt(13.0)) / 2;
    double z = 1 / t + 1 + t;
    std::vector<double> expect{1 / (t * z), 1 / z, t / z};

    // points are sorted; the mean = -1/2 solution is the mirror image
    const ProjectionPoint& hi = ps.points[0];
    const ProjectionPoint& lo = ps.points[1];
    for (int i = 0; i < 3; ++i) {
        CHECK(hi.point[static_cast<std::size_t>(i)] ==
              doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-9));
        CHECK(lo.point[static_cast<std::size_t>(i)] ==
              doctest::Approx(expect[static_cast<std::size_t>(2 - i)]).epsilon(1e-9));
    }
    CHECK(hi.objective == doctest::Approx(lo.objective).epsilon(1e-10));
    CHECK(hi.proper);

    // the optimum is exponential-family: log(p_i / q_i) affine in the value
    // v_i; fit the two coefficients on letters 0, 2 and check letter 1
    std::vector<double> v{-1, 0, 1};
    double l0 = std::log(hi.point[0] / (1.0 / 3));
    double l2 = std::log(hi.point[2] / (1.0 / 3));
    double slope = (l2 - l0) / (v[2] - v[0]);
    double intercept = l0 - slope * v[0];
    double predicted1 = intercept + slope * v[1];
    CHECK(std::log(hi.point[1] / (1.0 / 3)) ==
          doctest::Approx(predicted1).epsilon(1e-8));
}

TEST_CASE("J-projection on the mean segment beats a grid scan") {
    ProjectionSet ps = j_projections(uniform3(), s3());
    REQUIRE(ps.k() == 2);
    // parametrize {mean = 1/2}: p(s) = (s, 1/2 - 2s, 1/2 + s), s in [0, 1/4]
    auto jval = [](double s) {
        std::vector<double> p{s, 0.5 - 2 * s, 0.5 + s};
        std::vector<double> q{1.0 / 3, 1.0 / 3, 1.0 / 3};
        return symmetric_kl(p, q);
    };
    double best = 1e9;
    for (int i = 1; i < 400000; ++i) best = std::min(best, jval(0.25 * i / 400000.0));
    CHECK(ps.points[0].objective == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("feasible source is its own projection") {
    FeasibleSet loose(2, {ConvexPiece(2, {ge({1, 0}, Rational(1, 4))})}, "loose");
    ProjectionSet ps = i_projections(half_half(), loose);
    REQUIRE(ps.k() == 1);
    CHECK(ps.points[0].objective == 0.0);
    CHECK(ps.points[0].point[0] == doctest::Approx(0.5));
    CHECK(ps.points[0].proper);
}

TEST_CASE("isolated singleton projections are improper") {
    FeasibleSet point_set(2, {ConvexPiece(2, {eq({1, 0}, Rational(2, 5))})}, "dot");
    ProjectionSet ps = i_projections(half_half(), point_set);
    REQUIRE(ps.k() == 1);
    CHECK(ps.points[0].point[0] == doctest::Approx(0.4).epsilon(1e-10));
    CHECK_FALSE(ps.points[0].proper);
}

TEST_CASE("near-ties produce a warning but a single winner") {
    // second piece loses by ~1.1e-7: inside the 1000x warning band
    FeasibleSet lopsided(
        2,
        {ConvexPiece(2, {ge({1, 0}, Rational(3, 4))}),
         ConvexPiece(2, {le({1, 0}, Rational(1, 4) - Rational(1, 10000000))})},
        "lopsided");
    ProjectionSet ps = i_projections(half_half(), lopsided);
    CHECK(ps.k() == 1);
    REQUIRE(!ps.warnings.empty());
    CHECK(ps.warnings[0].find("near-tie") != std::string::npos);
}

TEST_CASE("divergence projections reject hopeless sets") {
    FeasibleSet gone(2, {ConvexPiece(2, {ge({1, 0}, Rational(2))})}, "void");
    CHECK_THROWS_AS(i_projections(half_half(), gone), FeasibilityError);

    // q puts no mass on letter 0 but the set demands it: I is infinite
    Pmf degenerate = Pmf::exact({Rational(0), Rational(1)});
    CHECK_THROWS_AS(i_projections(degenerate, s1()), FeasibilityError);
}

TEST_CASE("source zeros stay zero when the set allows it") {
    // q = (0, 1/2, 1/2), constraint p3 <= 1/4: projection keeps p1 = 0
    Pmf q = Pmf::exact({Rational(0), Rational(1, 2), Rational(1, 2)});
    FeasibleSet set(3, {ConvexPiece(3, {le({0, 0, 1}, Rational(1, 4))})}, "cap");
    ProjectionSet ps = i_projections(q, set);
    REQUIRE(ps.k() == 1);
    CHECK(ps.points[0].point[0] == doctest::Approx(0.0));
    CHECK(ps.points[0].point[2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(ps.points[0].point[1] == doctest::Approx(0.75).epsilon(1e-9));
    double expect = kl_divergence({0.0, 0.75, 0.25}, {0.0, 0.5, 0.5});
    CHECK(ps.points[0].objective == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("multistart agrees with the single start") {
    SolverOptions one;
    SolverOptions many;
    many.multistart = 4;
    ProjectionSet a = i_projections(half_half(), s2(), one);
    ProjectionSet b = i_projections(half_half(), s2(), many);
    REQUIRE(a.k() == b.k());
    for (int j = 0; j < a.k(); ++j)
        CHECK(total_variation(a.points[static_cast<std::size_t>(j)].point,
                              b.points[static_cast<std::size_t>(j)].point) <= 1e-9);
}

TEST_CASE("most probable type: hand values and exact ties") {
    ProjectionSet mu5 = mu_projections(half_half(), s1(), 5);
    REQUIRE(mu5.k() == 1);
    REQUIRE(mu5.points[0].type.has_value());
    CHECK(mu5.points[0].type->counts == std::vector<long>{4, 1});
    CHECK(mu5.points[0].objective ==
          doctest::Approx(5.0 / 32.0).epsilon(1e-12));  // C(5,4) / 2^5
    CHECK(mu5.n == 5);

    ProjectionSet mu4 = mu_projections(half_half(), s2(), 4);
    REQUIRE(mu4.k() == 2);
    CHECK(mu4.points[0].type->counts == std::vector<long>{1, 3});
    CHECK(mu4.points[1].type->counts == std::vector<long>{3, 1});
    CHECK(mu4.points[0].objective == doctest::Approx(0.25).epsilon(1e-12));

    // empty feasible type set: no points, a warning, not an exception
    ProjectionSet odd = mu_projections(uniform3(), s3(), 5);
    CHECK(odd.points.empty());
    CHECK(!odd.warnings.empty());
}

TEST_CASE("float sources take the log-domain argmax path") {
    Pmf fq = Pmf::from_doubles({0.5, 0.5});
    ProjectionSet mu = mu_projections(fq, s1(), 5);
    REQUIRE(mu.k() == 1);
    CHECK(mu.points[0].type->counts == std::vector<long>{4, 1});
}

TEST_CASE("double-weighting argmax on the full simplex") {
    FeasibleSet simplex(2, {ConvexPiece(2, {})}, "simplex");
    ProjectionSet g = gamma_projections(half_half(), simplex, 2);
    REQUIRE(g.k() == 1);
    CHECK(g.points[0].type->counts == std::vector<long>{1, 1});
    // pi((1,1); q) * pi((1,1); (1/2,1/2)) = 1/2 * 1/2
    CHECK(g.points[0].objective == doctest::Approx(0.25).epsilon(1e-12));

    ProjectionSet o = or_projections(half_half(), simplex, 2);
    REQUIRE(o.k() == 1);
    CHECK(o.points[0].type->counts == std::vector<long>{1, 1});
    // both summands are 1/2
    CHECK(o.points[0].objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("double weighting dies on the tail set at tiny n") {
    // Pi_2 = {(2,0)} but drawing (1,1) from the point mass on letter 0 is
    // impossible: every weight vanishes
    ProjectionSet g = gamma_projections(half_half(), s1(), 2);
    CHECK(g.degenerate);
    CHECK(g.points.empty());
    CHECK(!g.warnings.empty());

    ProjectionSet g4 = gamma_projections(half_half(), s1(), 4);
    REQUIRE(g4.k() == 1);
    CHECK(g4.points[0].type->counts == std::vector<long>{3, 1});
    CHECK_FALSE(g4.degenerate);

    // the additive variant survives: pi(nu; q) alone can be positive
    ProjectionSet o2 = or_projections(half_half(), s1(), 2);
    REQUIRE(o2.k() == 1);
    CHECK(o2.points[0].type->counts == std::vector<long>{2, 0});
}

TEST_CASE("double weighting needs a compatible source and length") {
    CHECK(jeffreys_base(half_half()) == 2);
    CHECK(jeffreys_base(Pmf::exact({Rational(1, 6), Rational(1, 2), Rational(1, 3)})) == 6);
    CHECK_THROWS_AS(jeffreys_base(Pmf::from_doubles({0.5, 0.5})), std::invalid_argument);
    CHECK_THROWS_AS(gamma_projections(half_half(), s1(), 3), std::invalid_argument);
    CHECK_THROWS_AS(or_projections(half_half(), s1(), 5), std::invalid_argument);
}

TEST_CASE("gamma and J projections approach each other") {
    // the finite-n argmax should sit near the asymptotic J minimizer
    ProjectionSet j = j_projections(half_half(), s2());
    ProjectionSet g = gamma_projections(half_half(), s2(), 500);
    REQUIRE(j.k() == 2);
    REQUIRE(g.k() == 2);
    for (int a = 0; a < 2; ++a) {
        double best = 1e9;
        for (int b = 0; b < 2; ++b)
            best = std::min(best, total_variation(g.points[static_cast<std::size_t>(a)].point,
                                                  j.points[static_cast<std::size_t>(b)].point));
        CHECK(best <= 0.02);
    }
}

TEST_CASE("projection kinds carry their names") {
    CHECK(kind_name(ProjectionKind::I) == "I");
    CHECK(kind_name(ProjectionKind::J) == "J");
    CHECK(kind_name(ProjectionKind::Mu) == "mu");
    CHECK(kind_name(ProjectionKind::Gamma) == "gamma");
    CHECK(kind_name(ProjectionKind::Or) == "or");
}
