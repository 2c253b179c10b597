#include "typeslab/pmf.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace typeslab {

Pmf Pmf::exact(std::vector<Rational> w) {
    if (w.empty()) throw std::invalid_argument("pmf: empty weight vector");
    Rational sum = 0;
    for (Rational& r : w) {
        r.canonicalize();
        if (r < 0) throw std::invalid_argument("pmf: negative weight");
        sum += r;
    }
    if (sum != 1) throw std::invalid_argument("pmf: weights must sum to 1 exactly");
    Pmf p;
    p.values_.reserve(w.size());
    for (const Rational& r : w) p.values_.push_back(to_double(r));
    p.exact_ = std::move(w);
    return p;
}

Pmf Pmf::from_doubles(std::vector<double> w) {
    if (w.empty()) throw std::invalid_argument("pmf: empty weight vector");
    double sum = 0;
    for (double x : w) {
        if (!(x >= 0)) throw std::invalid_argument("pmf: negative or NaN weight");
        sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("pmf: weights must sum to 1 within 1e-12");
    Pmf p;
    p.values_ = std::move(w);
    return p;
}

Pmf Pmf::uniform(int m) {
    if (m < 1) throw std::invalid_argument("pmf: m must be positive");
    return exact(std::vector<Rational>(static_cast<std::size_t>(m), Rational(1, m)));
}

const Rational& Pmf::exact_value(int i) const {
    if (!is_exact()) throw std::logic_error("pmf: exact value requested from float pmf");
    return exact_[static_cast<std::size_t>(i)];
}

const std::vector<Rational>& Pmf::exact_values() const {
    if (!is_exact()) throw std::logic_error("pmf: exact values requested from float pmf");
    return exact_;
}

bool Pmf::strictly_positive() const {
    if (is_exact()) {
        for (const Rational& r : exact_)
            if (r <= 0) return false;
        return true;
    }
    for (double x : values_)
        if (!(x > 0)) return false;
    return true;
}

int Pmf::support_size() const {
    int k = 0;
    for (int i = 0; i < size(); ++i) {
        if (is_exact() ? exact_[static_cast<std::size_t>(i)] > 0 : values_[static_cast<std::size_t>(i)] > 0) ++k;
    }
    return k;
}

bool Pmf::rationalize(double tol, Pmf* out) const {
    if (is_exact()) {
        *out = *this;
        return true;
    }
    std::vector<Rational> w(values_.size());
    Rational partial = 0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        try {
            w[i] = best_rational(values_[i], tol);
        } catch (const std::invalid_argument&) {
            return false;
        }
        if (w[i] < 0) return false;
        partial += w[i];
    }
    Rational last = 1 - partial;
    if (last < 0) return false;
    if (std::fabs(to_double(last) - values_.back()) > tol * static_cast<double>(values_.size())) return false;
    w.back() = last;
    *out = Pmf::exact(std::move(w));
    return true;
}

std::string Pmf::to_string() const {
    std::string s = "(";
    for (int i = 0; i < size(); ++i) {
        if (i) s += ", ";
        if (is_exact()) {
            s += format_rational(exact_[static_cast<std::size_t>(i)]);
        } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", values_[static_cast<std::size_t>(i)]);
            s += buf;
        }
    }
    s += ")";
    return s;
}

}  // namespace typeslab
