#include "typeslab/sequence_oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace typeslab {

namespace {

void check_budget(int m, long n) {
    if (n < 1) throw std::invalid_argument("sequence oracle: n must be positive");
    double words = n * std::log2(static_cast<double>(m));
    if (words > 24.0)
        throw std::invalid_argument("sequence oracle: m^n too large for exhaustion");
}

// Visits every word of length n over {0..m-1} with its exact probability.
template <typename Fn>
void for_each_word(const Pmf& q, long n, Fn&& fn) {
    const int m = q.size();
    std::vector<int> word(static_cast<std::size_t>(n), 0);
    std::vector<long> counts(static_cast<std::size_t>(m), 0);
    counts[0] = n;
    for (;;) {
        Rational p = 1;
        for (int x : word) p *= q.exact_value(x);
        fn(word, counts, p);
        long pos = n - 1;
        while (pos >= 0 && word[static_cast<std::size_t>(pos)] == m - 1) {
            counts[static_cast<std::size_t>(m - 1)] -= 1;
            counts[0] += 1;
            word[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        int& digit = word[static_cast<std::size_t>(pos)];
        counts[static_cast<std::size_t>(digit)] -= 1;
        digit += 1;
        counts[static_cast<std::size_t>(digit)] += 1;
    }
}

}  // namespace

OracleMass oracle_conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                   const Region& region) {
    if (q.size() != set.m())
        throw std::invalid_argument("sequence oracle: source/set dimension mismatch");
    if (!q.is_exact())
        throw std::invalid_argument("sequence oracle: needs an exact rational source");
    check_budget(q.size(), n);

    std::map<std::vector<long>, std::pair<bool, bool>> seen;  // counts -> (in set, in region)
    Rational total = 0, hit = 0;
    for_each_word(q, n, [&](const std::vector<int>&, const std::vector<long>& counts,
                            const Rational& p) {
        auto it = seen.find(counts);
        if (it == seen.end()) {
            bool in_set = set.contains_type(counts, n);
            bool in_region = in_set && region.contains(counts, n);
            it = seen.emplace(counts, std::make_pair(in_set, in_region)).first;
        }
        if (!it->second.first) return;
        total += p;
        if (it->second.second) hit += p;
    });

    OracleMass out;
    if (total == 0) return out;
    out.defined = true;
    out.value = hit / total;
    return out;
}

OracleMass oracle_prefix_law(const Pmf& q, const FeasibleSet& set, long n,
                             const std::vector<int>& prefix) {
    if (q.size() != set.m())
        throw std::invalid_argument("sequence oracle: source/set dimension mismatch");
    if (!q.is_exact())
        throw std::invalid_argument("sequence oracle: needs an exact rational source");
    if (static_cast<long>(prefix.size()) > n)
        throw std::invalid_argument("sequence oracle: prefix longer than the word");
    for (int x : prefix)
        if (x < 0 || x >= q.size())
            throw std::out_of_range("sequence oracle: prefix letter outside the alphabet");
    check_budget(q.size(), n);

    std::map<std::vector<long>, bool> seen;
    Rational total = 0, hit = 0;
    for_each_word(q, n, [&](const std::vector<int>& word, const std::vector<long>& counts,
                            const Rational& p) {
        auto it = seen.find(counts);
        if (it == seen.end()) it = seen.emplace(counts, set.contains_type(counts, n)).first;
        if (!it->second) return;
        total += p;
        bool starts = true;
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (word[i] != prefix[i]) {
                starts = false;
                break;
            }
        if (starts) hit += p;
    });

    OracleMass out;
    if (total == 0) return out;
    out.defined = true;
    out.value = hit / total;
    return out;
}

}  // namespace typeslab
