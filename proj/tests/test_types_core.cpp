#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "typeslab/pmf.hpp"
#include "typeslab/rng.hpp"
#include "typeslab/type_vec.hpp"
#include "typeslab/types_core.hpp"

using namespace typeslab;

namespace {
const double inf = std::numeric_limits<double>::infinity();

Pmf half_half() { return Pmf::exact({Rational(1, 2), Rational(1, 2)}); }
}  // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_number("3/4") == Rational(3, 4));
    CHECK(parse_number("2") == Rational(2));
    CHECK(parse_number("-1") == Rational(-1));
    CHECK(parse_number("0.25") == Rational(1, 4));
    CHECK(parse_number("-0.5") == Rational(-1, 2));
    CHECK(parse_number("1e-2") == Rational(1, 100));
    CHECK(parse_number("2.5e3") == Rational(2500));
    CHECK_THROWS_AS(parse_number("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
}

TEST_CASE("rational formatting and helpers") {
    CHECK(format_rational(Rational(3, 4)) == "3/4");
    CHECK(format_rational(Rational(5)) == "5");
    CHECK(format_rational(Rational(-1, 2)) == "-1/2");
    CHECK(best_rational(0.75, 1e-9) == Rational(3, 4));
    CHECK(best_rational(1.0 / 3.0, 1e-9) == Rational(1, 3));
    CHECK(rational_pow(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(rational_pow(Rational(5), 0) == Rational(1));
}

TEST_CASE("log of huge integers stays accurate") {
    BigInt z = 1;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, 10000);
    CHECK(log_bigint(z) == doctest::Approx(10000 * std::log(2.0)).epsilon(1e-12));
    CHECK(log_rational(Rational(1, 3)) == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("composition enumeration is lexicographic and complete") {
    std::vector<TypeVec> ts = enumerate_types(4, 2);
    REQUIRE(ts.size() == 5);
    CHECK(ts.front().counts == std::vector<long>{0, 4});
    CHECK(ts.back().counts == std::vector<long>{4, 0});
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i - 1].counts < ts[i].counts);

    CHECK(enumerate_types(2, 3).size() == 6);
    CHECK(count_types(4, 2) == 5);
    CHECK(count_types(2, 3) == 6);
    CHECK(count_types(200, 3) == 20301);

    long seen = 0;
    for_each_type(7, 4, [&](const std::vector<long>& c) {
        long s = 0;
        for (long v : c) s += v;
        CHECK(s == 7);
        seen += 1;
    });
    CHECK(BigInt(seen) == count_types(7, 4));
}

TEST_CASE("multiplicity counts words") {
    CHECK(multiplicity(TypeVec({2, 1, 1})) == 12);
    CHECK(multiplicity(TypeVec({0, 3})) == 1);
    CHECK(multiplicity(TypeVec({3, 3})) == 20);
    CHECK(multiplicity(TypeVec({0, 0, 5})) == 1);

    // Sum over all types of length n equals the number of words m^n.
    for (int m = 2; m <= 4; ++m)
        for (long n : {1L, 5L, 9L}) {
            BigInt sum = 0;
            for_each_type(n, m, [&](const std::vector<long>& c) {
                sum += multiplicity(TypeVec(c));
            });
            BigInt words;
            mpz_ui_pow_ui(words.get_mpz_t(), static_cast<unsigned long>(m),
                          static_cast<unsigned long>(n));
            CHECK(sum == words);
        }
}

TEST_CASE("type probabilities") {
    Pmf q = half_half();
    CHECK(type_probability(TypeVec({1, 1}), q) == Rational(1, 2));
    CHECK(type_probability(TypeVec({3, 1}), q) == Rational(1, 4));
    Pmf skew = Pmf::exact({Rational(1, 4), Rational(3, 4)});
    CHECK(type_probability(TypeVec({0, 4}), skew) == Rational(81, 256));

    // Off-support types carry zero probability.
    Pmf degenerate = Pmf::exact({Rational(1), Rational(0)});
    CHECK(type_probability(TypeVec({1, 1}), degenerate) == Rational(0));
    CHECK(log_type_probability(TypeVec({1, 1}), degenerate) == -inf);

    // The law of counts sums to one exactly.
    for (long n : {1L, 7L, 30L}) {
        Rational sum = 0;
        for_each_type(n, 2, [&](const std::vector<long>& c) {
            sum += type_probability(TypeVec(c), skew);
        });
        CHECK(sum == Rational(1));
    }
    Pmf q3 = Pmf::exact({Rational(1, 6), Rational(1, 3), Rational(1, 2)});
    Rational sum3 = 0;
    for_each_type(11, 3, [&](const std::vector<long>& c) {
        sum3 += type_probability(TypeVec(c), q3);
    });
    CHECK(sum3 == Rational(1));
}

TEST_CASE("log and exact probabilities agree to 1e-10 relative") {
    Pmf q = Pmf::exact({Rational(2, 7), Rational(4, 7), Rational(1, 7)});
    for (long n : {5L, 20L, 60L}) {
        for_each_type(n, 3, [&](const std::vector<long>& c) {
            TypeVec t(c);
            double lx = log_rational(type_probability(t, q));
            double ll = log_type_probability(t, q);
            CHECK(std::fabs(ll - lx) <= 1e-10 * std::max(1.0, std::fabs(lx)));
        });
    }
}

TEST_CASE("scaled numerators reproduce exact probabilities") {
    Pmf q = Pmf::exact({Rational(1, 6), Rational(1, 2), Rational(1, 3)});
    ScaledSource src(q);
    CHECK(src.denom == 6);
    CHECK(src.scaled == std::vector<BigInt>{1, 3, 2});
    for_each_type(9, 3, [&](const std::vector<long>& c) {
        TypeVec t(c);
        BigInt numer = type_weight_numerator(t, src);
        BigInt dn;
        mpz_ui_pow_ui(dn.get_mpz_t(), 6, 9);
        CHECK(make_ratio(numer, dn) == type_probability(t, q));
    });
}

TEST_CASE("counts_power conventions") {
    CHECK(counts_power({0, 2}, {0, 3}) == 8);   // 0^0 = 1
    CHECK(counts_power({0, 2}, {1, 1}) == 0);   // 0^1 kills the product
    CHECK(counts_power({3, 2}, {2, 2}) == 36);
    CHECK(counts_power({}, {}) == 1);
}

TEST_CASE("total variation in the summed form") {
    CHECK(total_variation({1, 0}, {0, 1}) == doctest::Approx(2.0));
    Pmf a = Pmf::exact({Rational(3, 4), Rational(1, 4)});
    Pmf b = half_half();
    CHECK(total_variation(a, b) == doctest::Approx(0.5));
    CHECK(total_variation_exact(a, b) == Rational(1, 2));

    // Metric axioms on random triples.
    CounterRng rng(7);
    std::uint64_t ctr = 0;
    for (int rep = 0; rep < 200; ++rep) {
        auto draw = [&] {
            std::vector<double> v(3);
            double s = 0;
            for (double& x : v) {
                x = rng.uniform(ctr++) + 1e-3;
                s += x;
            }
            for (double& x : v) x /= s;
            return v;
        };
        auto x = draw(), y = draw(), z = draw();
        CHECK(total_variation(x, x) == 0.0);
        CHECK(total_variation(x, y) == doctest::Approx(total_variation(y, x)));
        CHECK(total_variation(x, z) <=
              total_variation(x, y) + total_variation(y, z) + 1e-12);
    }
}

TEST_CASE("KL divergence") {
    std::vector<double> p{0.75, 0.25}, q{0.5, 0.5};
    double expected = 0.75 * std::log(0.75 / 0.5) + 0.25 * std::log(0.25 / 0.5);
    CHECK(kl_divergence(p, q) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(kl_divergence(p, q) == doctest::Approx(0.130812).epsilon(1e-5));
    CHECK(kl_divergence(q, q) == 0.0);

    // 0 log 0 contributes nothing; escaping the support costs infinity.
    CHECK(kl_divergence({0.0, 1.0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    CHECK(kl_divergence({0.5, 0.5}, {1.0, 0.0}) == inf);

    CHECK(symmetric_kl(p, q) ==
          doctest::Approx(kl_divergence(p, q) + kl_divergence(q, p)).epsilon(1e-14));
    CHECK(symmetric_kl(p, q) == doctest::Approx(symmetric_kl(q, p)).epsilon(1e-14));
}

TEST_CASE("relabeling the alphabet permutes everything consistently") {
    Pmf q = Pmf::exact({Rational(1, 6), Rational(1, 2), Rational(1, 3)});
    Pmf qp = Pmf::exact({Rational(1, 3), Rational(1, 6), Rational(1, 2)});
    // permutation: new letter 0 = old 2, new 1 = old 0, new 2 = old 1
    for_each_type(8, 3, [&](const std::vector<long>& c) {
        std::vector<long> cp{c[2], c[0], c[1]};
        CHECK(multiplicity(TypeVec(c)) == multiplicity(TypeVec(cp)));
        CHECK(type_probability(TypeVec(c), q) == type_probability(TypeVec(cp), qp));
    });
}

TEST_CASE("log multiplicity tracks the exact one") {
    for (long n : {3L, 17L, 60L}) {
        for_each_type(n, 2, [&](const std::vector<long>& c) {
            double lx = log_bigint(multiplicity(TypeVec(c)));
            double ll = log_multiplicity(TypeVec(c));
            CHECK(std::fabs(ll - lx) <= 1e-10 * std::max(1.0, std::fabs(lx)));
        });
    }
}

TEST_CASE("pmf construction rules") {
    CHECK_THROWS_AS(Pmf::exact({Rational(1, 2), Rational(1, 3)}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::exact({Rational(3, 2), Rational(-1, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(Pmf::from_doubles({0.5, 0.6}), std::invalid_argument);
    Pmf u = Pmf::uniform(4);
    CHECK(u.is_exact());
    CHECK(u.exact_value(0) == Rational(1, 4));
    CHECK(u.strictly_positive());
    Pmf f = Pmf::from_doubles({0.25, 0.75});
    CHECK_FALSE(f.is_exact());
    Pmf snapped = f;
    REQUIRE(f.rationalize(1e-9, &snapped));
    CHECK(snapped.is_exact());
    CHECK(snapped.exact_value(1) == Rational(3, 4));
    CHECK(Pmf::exact({Rational(1), Rational(0)}).support_size() == 1);
}

TEST_CASE("type vector basics") {
    TypeVec t({2, 0, 3});
    CHECK(t.n == 5);
    CHECK(t.m() == 3);
    CHECK(t.to_string() == "[2,0,3]");
    Pmf f = t.frequencies();
    CHECK(f.exact_value(0) == Rational(2, 5));
    CHECK(f.exact_value(2) == Rational(3, 5));
    CHECK_THROWS_AS(TypeVec({1, -2}), std::invalid_argument);
}
