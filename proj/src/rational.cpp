#include "typeslab/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace typeslab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void bad_number(std::string_view text) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
}

}  // namespace

Rational make_ratio(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("make_ratio: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational make_ratio(long num, long den) {
    return make_ratio(BigInt(num), BigInt(den));
}

Rational parse_number(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) bad_number(text);

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) bad_number(text);

    // a/b form
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = s.substr(0, slash);
        std::string_view den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad_number(text);
        BigInt n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        Rational r(n, d);
        r.canonicalize();
        return negative ? Rational(-r) : r;
    }

    // [digits][.digits][e[+-]digits]
    std::string_view mantissa = s;
    long exponent10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        std::string_view es = s.substr(e + 1);
        bool eneg = false;
        if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
            eneg = es.front() == '-';
            es.remove_prefix(1);
        }
        if (!all_digits(es) || es.size() > 6) bad_number(text);
        exponent10 = std::strtol(std::string(es).c_str(), nullptr, 10);
        if (eneg) exponent10 = -exponent10;
    }

    std::string digits;
    long frac_digits = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        std::string_view ip = mantissa.substr(0, dot);
        std::string_view fp = mantissa.substr(dot + 1);
        if (ip.empty() && fp.empty()) bad_number(text);
        if (!ip.empty() && !all_digits(ip)) bad_number(text);
        if (!fp.empty() && !all_digits(fp)) bad_number(text);
        digits = std::string(ip) + std::string(fp);
        frac_digits = static_cast<long>(fp.size());
    } else {
        if (!all_digits(mantissa)) bad_number(text);
        digits = std::string(mantissa);
    }
    if (digits.empty()) bad_number(text);

    BigInt n(digits, 10);
    long net = exponent10 - frac_digits;
    Rational r(n);
    if (net > 0) {
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(net));
        r *= Rational(scale);
    } else if (net < 0) {
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(-net));
        r /= Rational(scale);
    }
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational best_rational(double x, double tol, unsigned long max_den) {
    if (!std::isfinite(x)) throw std::invalid_argument("best_rational: non-finite input");
    if (tol <= 0) throw std::invalid_argument("best_rational: tolerance must be positive");

    bool negative = x < 0;
    double y = std::fabs(x);

    // Continued-fraction convergents h_k / k_k.
    BigInt h0 = 0, k0 = 1, h1 = 1, k1 = 0;
    double frac = y;
    for (int iter = 0; iter < 64; ++iter) {
        double ai = std::floor(frac);
        if (ai > 9e18) break;
        BigInt a(static_cast<unsigned long>(ai));
        BigInt h2 = a * h1 + h0;
        BigInt k2 = a * k1 + k0;
        if (k2 > BigInt(max_den)) break;
        Rational conv(h2, k2);
        conv.canonicalize();
        double err = std::fabs(to_double(conv) - y);
        if (err <= tol) return negative ? Rational(-conv) : conv;
        h0 = h1; k0 = k1; h1 = h2; k1 = k2;
        double rem = frac - ai;
        if (rem < 1e-18) break;
        frac = 1.0 / rem;
    }
    throw std::invalid_argument("best_rational: no approximation within tolerance");
}

BigInt lcm_denominators(const std::vector<Rational>& values) {
    BigInt l = 1;
    for (const Rational& v : values)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
    return l;
}

Rational rational_pow(const Rational& r, unsigned long e) {
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num().get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), r.get_den().get_mpz_t(), e);
    Rational out(num, den);
    out.canonicalize();
    return out;
}

double to_double(const Rational& r) { return r.get_d(); }

double log_bigint(const BigInt& z) {
    if (z <= 0) throw std::domain_error("log_bigint: nonpositive argument");
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

double log_rational(const Rational& r) {
    if (r <= 0) throw std::domain_error("log_rational: nonpositive argument");
    return log_bigint(r.get_num()) - log_bigint(r.get_den());
}

}  // namespace typeslab
