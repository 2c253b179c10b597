#pragma once

#include <string>
#include <vector>

#include "typeslab/pmf.hpp"
#include "typeslab/rational.hpp"

namespace typeslab {

// Empirical count vector of a length-n word over m letters.
struct TypeVec {
    std::vector<long> counts;
    long n = 0;

    TypeVec() = default;
    explicit TypeVec(std::vector<long> c);

    int m() const { return static_cast<int>(counts.size()); }
    long count(int i) const { return counts[static_cast<std::size_t>(i)]; }

    // Rational frequencies counts/n.
    Pmf frequencies() const;
    std::vector<double> frequencies_double() const;

    std::string to_string() const;

    bool operator==(const TypeVec& other) const { return counts == other.counts; }
};

// First count vector of the lexicographic enumeration: (0, ..., 0, n).
std::vector<long> first_composition(long n, int m);

// Advances c to the next composition of n in lexicographic order.
// Returns false when c was the last one, (n, 0, ..., 0).
bool next_composition(std::vector<long>& c);

// All types of length n over m letters in lexicographic order.
std::vector<TypeVec> enumerate_types(long n, int m);

// Streaming variant; fn receives each count vector in lexicographic order.
template <typename Fn>
void for_each_type(long n, int m, Fn&& fn) {
    std::vector<long> c = first_composition(n, m);
    do {
        fn(c);
    } while (next_composition(c));
}

// Number of types: C(n + m - 1, m - 1).
BigInt count_types(long n, int m);

}  // namespace typeslab
