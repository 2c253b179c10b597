#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace typeslab {

using BigInt = mpz_class;
using Rational = mpq_class;

// num/den reduced to lowest terms. mpq's two-argument constructor stores the
// pair verbatim and mpq equality assumes canonical form, so every ratio built
// from computed integers must go through here.
Rational make_ratio(const BigInt& num, const BigInt& den);
Rational make_ratio(long num, long den);

// Parses "3", "-2", "3/4", "0.25", "2.5e-3" into an exact rational.
// Decimal and exponent forms are converted without rounding.
// Throws std::invalid_argument on malformed input.
Rational parse_number(std::string_view text);

// Canonical text form: "num/den" in lowest terms, or just "num" when den == 1.
std::string format_rational(const Rational& r);

// Best rational approximation of x with |r - x| <= tol and denominator
// <= max_den, via continued fractions. Throws std::invalid_argument when x
// is not finite or no convergent lands within tol under the cap.
Rational best_rational(double x, double tol, unsigned long max_den = 1000000);

// Least common multiple of the denominators (values in lowest terms).
BigInt lcm_denominators(const std::vector<Rational>& values);

// r^e for e >= 0.
Rational rational_pow(const Rational& r, unsigned long e);

double to_double(const Rational& r);

// log(r) for r > 0, robust to magnitudes far outside double range.
double log_rational(const Rational& r);

// log(z) for z > 0, robust to huge integers.
double log_bigint(const BigInt& z);

}  // namespace typeslab
