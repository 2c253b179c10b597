#include "typeslab/types_core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace typeslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

BigInt multiplicity(const TypeVec& t) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(t.n));
    BigInt f;
    for (long k : t.counts) {
        if (k > 1) {
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
            mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), f.get_mpz_t());
        }
    }
    return r;
}

double log_multiplicity(const TypeVec& t) {
    double s = std::lgamma(static_cast<double>(t.n) + 1.0);
    for (long k : t.counts) s -= std::lgamma(static_cast<double>(k) + 1.0);
    return s;
}

Rational type_probability(const TypeVec& t, const Pmf& q) {
    check_same_size(t.counts.size(), static_cast<std::size_t>(q.size()), "type_probability");
    if (!q.is_exact())
        throw std::invalid_argument("type_probability: exact form needs an exact source");
    Rational p(multiplicity(t));
    for (int i = 0; i < q.size(); ++i) {
        long c = t.count(i);
        if (c == 0) continue;
        p *= rational_pow(q.exact_value(i), static_cast<unsigned long>(c));
    }
    return p;
}

double log_type_probability(const TypeVec& t, const Pmf& q) {
    check_same_size(t.counts.size(), static_cast<std::size_t>(q.size()), "log_type_probability");
    double s = log_multiplicity(t);
    for (int i = 0; i < q.size(); ++i) {
        long c = t.count(i);
        if (c == 0) continue;
        double qi = q.value(i);
        if (qi <= 0) {
            if (q.is_exact() && q.exact_value(i) > 0) {
                s += static_cast<double>(c) * log_rational(q.exact_value(i));
                continue;
            }
            return -kInf;
        }
        double lq = q.is_exact() ? log_rational(q.exact_value(i)) : std::log(qi);
        s += static_cast<double>(c) * lq;
    }
    return s;
}

ScaledSource::ScaledSource(const Pmf& q) {
    if (!q.is_exact())
        throw std::invalid_argument("scaled source: needs an exact source");
    denom = lcm_denominators(q.exact_values());
    scaled.reserve(static_cast<std::size_t>(q.size()));
    log_q.reserve(static_cast<std::size_t>(q.size()));
    for (int i = 0; i < q.size(); ++i) {
        const Rational& qi = q.exact_value(i);
        BigInt u = qi.get_num() * (denom / qi.get_den());
        scaled.push_back(u);
        log_q.push_back(qi > 0 ? log_rational(qi) : -kInf);
    }
}

BigInt type_weight_numerator(const TypeVec& t, const ScaledSource& src) {
    check_same_size(t.counts.size(), src.scaled.size(), "type_weight_numerator");
    BigInt w = multiplicity(t);
    BigInt pw;
    for (std::size_t i = 0; i < src.scaled.size(); ++i) {
        long c = t.counts[i];
        if (c == 0) continue;
        if (src.scaled[i] == 0) return BigInt(0);
        mpz_pow_ui(pw.get_mpz_t(), src.scaled[i].get_mpz_t(), static_cast<unsigned long>(c));
        w *= pw;
    }
    return w;
}

BigInt counts_power(const std::vector<long>& base, const std::vector<long>& exps) {
    if (base.size() != exps.size()) throw std::invalid_argument("counts_power: size mismatch");
    BigInt r = 1, pw;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (exps[i] == 0) continue;
        if (exps[i] < 0 || base[i] < 0) throw std::invalid_argument("counts_power: negative input");
        if (base[i] == 0) return BigInt(0);
        BigInt b(base[i]);
        mpz_pow_ui(pw.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exps[i]));
        r *= pw;
    }
    return r;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    check_same_size(a.size(), b.size(), "total_variation");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double total_variation(const Pmf& a, const Pmf& b) {
    return total_variation(a.values(), b.values());
}

Rational total_variation_exact(const Pmf& a, const Pmf& b) {
    check_same_size(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()),
                    "total_variation");
    if (!a.is_exact() || !b.is_exact())
        throw std::invalid_argument("total_variation: exact form needs exact arguments");
    Rational s = 0;
    for (int i = 0; i < a.size(); ++i) {
        Rational d = a.exact_value(i) - b.exact_value(i);
        s += d < 0 ? Rational(-d) : d;
    }
    return s;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    check_same_size(p.size(), q.size(), "kl_divergence");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] <= 0) return kInf;
        s += p[i] * std::log(p[i] / q[i]);
    }
    return s;
}

double kl_divergence(const Pmf& p, const Pmf& q) {
    return kl_divergence(p.values(), q.values());
}

double symmetric_kl(const std::vector<double>& p, const std::vector<double>& q) {
    double a = kl_divergence(p, q);
    double b = kl_divergence(q, p);
    return a + b;
}

double symmetric_kl(const Pmf& p, const Pmf& q) {
    return symmetric_kl(p.values(), q.values());
}

}  // namespace typeslab
