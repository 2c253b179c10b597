#pragma once

#include <optional>
#include <string>
#include <vector>

#include "typeslab/feasible_set.hpp"
#include "typeslab/pmf.hpp"
#include "typeslab/type_vec.hpp"

namespace typeslab {

enum class ProjectionKind { I, J, Mu, Gamma, Or };

std::string kind_name(ProjectionKind k);

struct SolverOptions {
    int max_iterations = 5000;
    double objective_tol = 1e-12;
    double tie_tol = 1e-9;   // relative window for collecting tied minimizers
    int multistart = 1;      // convex objectives rarely need more
};

struct ProjectionPoint {
    std::vector<double> point;
    std::optional<TypeVec> type;      // finite-n kinds only
    double objective = 0;             // divergence, probability, weight or score
    double log_objective = 0;         // log of the objective for finite-n kinds
    bool proper = true;               // false when the point is isolated in the set
    int piece_index = -1;             // convex piece that produced the point
    std::vector<double> multipliers;  // equality-path dual variables, when available
};

struct ProjectionSet {
    ProjectionKind kind = ProjectionKind::I;
    long n = 0;  // 0 for the asymptotic kinds
    std::vector<ProjectionPoint> points;
    bool degenerate = false;  // every candidate had zero objective
    std::vector<std::string> warnings;

    int k() const { return static_cast<int>(points.size()); }
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The problem itself is vacuous: every piece empty, or the divergence is
// infinite everywhere on the set. Distinct from a solver giving up.
struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Divergence minimizers over the union of convex pieces. One point per
// distinct global minimizer; k > 1 happens when pieces tie.
ProjectionSet i_projections(const Pmf& q, const FeasibleSet& set,
                            const SolverOptions& options = {});
ProjectionSet j_projections(const Pmf& q, const FeasibleSet& set,
                            const SolverOptions& options = {});

// Most probable feasible type of length n. Exact source: exact argmax and
// exact tie detection; float source: log-domain argmax with a 1e-12 window.
ProjectionSet mu_projections(const Pmf& q, const FeasibleSet& set, long n);

// Double-weighting argmax over Pi_n: weight(nu) = pi(nu; q) * pi(n q; nu).
// Needs an exact source and n divisible by jeffreys_base(q).
ProjectionSet gamma_projections(const Pmf& q, const FeasibleSet& set, long n);

// Sum-weighting argmax over Pi_n: score(nu) = pi(nu; q) + pi(n q; nu).
ProjectionSet or_projections(const Pmf& q, const FeasibleSet& set, long n);

// Smallest n0 such that n0 * q is integral: lcm of the denominators of q.
long jeffreys_base(const Pmf& q);

// The integer count vector n * q; requires an exact q with n divisible by
// jeffreys_base(q).
std::vector<long> scaled_source_counts(const Pmf& q, long n);

}  // namespace typeslab
