#pragma once

#include <vector>

#include "typeslab/conditioning.hpp"
#include "typeslab/feasible_set.hpp"
#include "typeslab/pmf.hpp"
#include "typeslab/rational.hpp"

namespace typeslab {

// Exhaustive sequence-space evaluation for small words. Walks all m^n words,
// multiplies per-letter source probabilities along each word and conditions on
// the word's empirical counts. No multiplicities, no type enumeration, so it
// cross-checks the type-level engine from the other side of the identity
// "probability of a type = count of its words x probability of one word".
// Exact rational arithmetic throughout; feasible only for m^n up to ~2^24.

struct OracleMass {
    bool defined = false;  // false when no word lands in the conditioning set
    Rational value = 0;
};

OracleMass oracle_conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                   const Region& region);

OracleMass oracle_prefix_law(const Pmf& q, const FeasibleSet& set, long n,
                             const std::vector<int>& prefix);

}  // namespace typeslab
