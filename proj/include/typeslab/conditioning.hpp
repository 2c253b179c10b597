#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typeslab/feasible_set.hpp"
#include "typeslab/pmf.hpp"
#include "typeslab/projections.hpp"
#include "typeslab/rational.hpp"
#include "typeslab/scenario.hpp"
#include "typeslab/type_vec.hpp"

namespace typeslab {

// Closed total-variation ball around a center. Membership is exact when both
// the center and the radius are exact rationals; otherwise it uses doubles
// with a 1e-12 slack on the boundary.
struct Ball {
    Pmf center;
    double epsilon = 0;
    std::optional<Rational> epsilon_exact;

    Ball(Pmf c, Rational eps)
        : center(std::move(c)), epsilon(to_double(eps)), epsilon_exact(std::move(eps)) {}
    Ball(Pmf c, double eps) : center(std::move(c)), epsilon(eps) {}

    bool is_exact() const { return center.is_exact() && epsilon_exact.has_value(); }
    bool contains(const std::vector<long>& counts, long n) const;
};

// A set of types to condition on: an explicit list, a TV ball, or a feasible
// set used as a region.
class Region {
public:
    static Region of_types(std::vector<TypeVec> types);
    static Region of_ball(Ball ball);
    static Region of_set(FeasibleSet set);

    bool contains(const std::vector<long>& counts, long n) const;
    std::string describe() const;

private:
    enum class Kind { Types, BallKind, Set } kind_ = Kind::Types;
    std::vector<TypeVec> types_;
    std::optional<Ball> ball_;
    std::optional<FeasibleSet> set_;
};

// A conditional quantity; undefined when the conditioning event has zero
// mass (empty Pi_n or a source that cannot reach it).
struct ConditionalValue {
    bool defined = false;
    double value = 0;
    double log_value = 0;
    std::optional<Rational> exact;
};

// P(type in region | type in Pi_n) under iid source q.
ConditionalValue conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                  const Region& region, ArithmeticMode mode);

struct BallReport {
    long n = 0;
    bool defined = false;
    double epsilon = 0;
    std::optional<Rational> epsilon_exact;
    std::vector<ConditionalValue> masses;  // one per center, same order
    ConditionalValue complement;
    std::vector<std::string> warnings;
};

// Conditional mass of the epsilon-ball around every center, plus the
// complement. Default epsilon: min(1/10, half the minimum pairwise TV
// distance between centers). Balls must be pairwise disjoint; a type falling
// into two balls raises std::runtime_error("overlapping balls...").
BallReport ball_concentrations(const Pmf& q, const FeasibleSet& set, long n,
                               const std::vector<Pmf>& centers,
                               std::optional<Rational> epsilon, ArithmeticMode mode);

// Same report under the double weighting w(nu) = pi(nu;q) * pi(n q; nu).
// Needs an exact source and n divisible by jeffreys_base(q).
BallReport jeffreys_ball_concentrations(const Pmf& q, const FeasibleSet& set, long n,
                                        const std::vector<Pmf>& centers,
                                        std::optional<Rational> epsilon,
                                        ArithmeticMode mode);

ConditionalValue jeffreys_conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                           const Region& region, ArithmeticMode mode);

// P(first t letters = prefix | the word has exactly the counts of `type`):
// sampling without replacement from the count vector.
Rational prefix_given_type(const std::vector<int>& prefix, const TypeVec& type);

// P(first t letters = prefix | type in Pi_n): the finite-n law, computed by
// summing pi(nu;q) * prefix_given_type over Pi_n.
ConditionalValue prefix_law_exact(const Pmf& q, const FeasibleSet& set, long n,
                                  const std::vector<int>& prefix, ArithmeticMode mode);

// Equal-weight mixture over the projection points of the iid prefix
// probability prod_l point[x_l].
double mixture_prediction(const ProjectionSet& centers, const std::vector<int>& prefix);

struct McEstimate {
    bool defined = false;
    double estimate = 0;
    double std_error = 0;
    double acceptance_rate = 0;
    long long accepted = 0;
    long long samples = 0;
};

// Rejection sampling: draw iid q-words of length n, keep those whose type
// lands in Pi_n, and estimate P(type in region | Pi_n). The counter-based
// generator makes the result independent of the worker partition.
McEstimate mc_conditional(const Pmf& q, const FeasibleSet& set, long n,
                          const Region& region, long long samples, std::uint64_t seed,
                          int workers = 1);

// Same sampler, estimating the prefix law.
McEstimate mc_prefix(const Pmf& q, const FeasibleSet& set, long n,
                     const std::vector<int>& prefix, long long samples,
                     std::uint64_t seed, int workers = 1);

// Exact ratio pi(t1;q)/pi(t2;q) and the multiplicity-free bound
// (n/m)^m * prod_i (q_i n / c1_i)^{c1_i} / prod_j (q_j n / c2_j)^{c2_j}.
// Both returned exactly; callers assert ratio < bound. Requires a strictly
// positive exact source and types of equal length.
std::pair<Rational, Rational> lemma_bound(const TypeVec& t1, const TypeVec& t2,
                                          const Pmf& q);

// Smallest n (per alphabet size) from which the bound above strictly
// dominates the ratio for every pair of types of length n. Values were
// frozen from an exhaustive exact scan; see the tests for the scan itself.
long lemma_valid_floor(int m);

}  // namespace typeslab
