#include "typeslab/type_vec.hpp"

#include <stdexcept>

namespace typeslab {

TypeVec::TypeVec(std::vector<long> c) : counts(std::move(c)) {
    if (counts.empty()) throw std::invalid_argument("type: empty count vector");
    n = 0;
    for (long k : counts) {
        if (k < 0) throw std::invalid_argument("type: negative count");
        n += k;
    }
}

Pmf TypeVec::frequencies() const {
    if (n == 0) throw std::logic_error("type: frequencies of the empty word");
    std::vector<Rational> w;
    w.reserve(counts.size());
    for (long k : counts) w.push_back(make_ratio(k, n));
    return Pmf::exact(std::move(w));
}

std::vector<double> TypeVec::frequencies_double() const {
    if (n == 0) throw std::logic_error("type: frequencies of the empty word");
    std::vector<double> w;
    w.reserve(counts.size());
    for (long k : counts) w.push_back(static_cast<double>(k) / static_cast<double>(n));
    return w;
}

std::string TypeVec::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(counts[i]);
    }
    s += "]";
    return s;
}

std::vector<long> first_composition(long n, int m) {
    if (n < 0 || m < 1) throw std::invalid_argument("types: need n >= 0 and m >= 1");
    std::vector<long> c(static_cast<std::size_t>(m), 0);
    c.back() = n;
    return c;
}

bool next_composition(std::vector<long>& c) {
    const int m = static_cast<int>(c.size());
    long tail = c[static_cast<std::size_t>(m - 1)];
    for (int j = m - 2; j >= 0; --j) {
        if (tail > 0) {
            c[static_cast<std::size_t>(j)] += 1;
            for (int i = j + 1; i < m; ++i) c[static_cast<std::size_t>(i)] = 0;
            c[static_cast<std::size_t>(m - 1)] = tail - 1;
            return true;
        }
        tail += c[static_cast<std::size_t>(j)];
    }
    return false;
}

std::vector<TypeVec> enumerate_types(long n, int m) {
    std::vector<TypeVec> out;
    for_each_type(n, m, [&](const std::vector<long>& c) { out.emplace_back(c); });
    return out;
}

BigInt count_types(long n, int m) {
    if (n < 0 || m < 1) throw std::invalid_argument("types: need n >= 0 and m >= 1");
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n + m - 1),
                 static_cast<unsigned long>(m - 1));
    return r;
}

}  // namespace typeslab
