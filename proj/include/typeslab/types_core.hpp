#pragma once

#include <vector>

#include "typeslab/pmf.hpp"
#include "typeslab/rational.hpp"
#include "typeslab/type_vec.hpp"

namespace typeslab {

// Number of length-n words with count vector c: n! / prod c_i!.
BigInt multiplicity(const TypeVec& t);
double log_multiplicity(const TypeVec& t);

// Probability that an iid q-word of length n has exactly the counts c:
// multiplicity(c) * prod q_i^{c_i}. Exact form requires an exact q.
Rational type_probability(const TypeVec& t, const Pmf& q);

// Natural-log version; -inf when some q_i = 0 has c_i > 0. Works for exact
// and float q alike (exact weights are converted through log_rational).
double log_type_probability(const TypeVec& t, const Pmf& q);

// Exact source q = u_i / d with a common denominator d = lcm of the
// denominators. Ratios of type probabilities at fixed n only need the
// integer numerators multiplicity(c) * prod u_i^{c_i}; the d^n cancels.
struct ScaledSource {
    BigInt denom;
    std::vector<BigInt> scaled;   // u_i = q_i * denom
    std::vector<double> log_q;    // log q_i, -inf at zeros

    explicit ScaledSource(const Pmf& q);
    int m() const { return static_cast<int>(scaled.size()); }
};

// multiplicity(c) * prod u_i^{c_i}; zero when the type leaves the support.
BigInt type_weight_numerator(const TypeVec& t, const ScaledSource& src);

// prod_i base_i ^ exp_i with 0^0 = 1; zero when base_i = 0 has exp_i > 0.
BigInt counts_power(const std::vector<long>& base, const std::vector<long>& exps);

// Total variation distance in the summed form: sum_i |a_i - b_i|.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);
double total_variation(const Pmf& a, const Pmf& b);
Rational total_variation_exact(const Pmf& a, const Pmf& b);

// Kullback-Leibler divergence sum p_i log(p_i / q_i), natural log,
// 0 log 0 = 0; +inf when p escapes q's support.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
double kl_divergence(const Pmf& p, const Pmf& q);

// Symmetrized divergence KL(p||q) + KL(q||p).
double symmetric_kl(const std::vector<double>& p, const std::vector<double>& q);
double symmetric_kl(const Pmf& p, const Pmf& q);

}  // namespace typeslab
