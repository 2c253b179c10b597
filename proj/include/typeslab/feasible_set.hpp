#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "typeslab/pmf.hpp"
#include "typeslab/rational.hpp"
#include "typeslab/type_vec.hpp"

namespace typeslab {

enum class Relation { Eq, Le, Ge };

std::string relation_symbol(Relation r);

// One closed half-space or hyperplane: sum_i coeffs[i] * p[i]  rel  bound.
struct LinearConstraint {
    std::vector<Rational> coeffs;
    Relation rel = Relation::Eq;
    Rational bound;

    // Source text of the constraint when it came from a scenario file;
    // kept verbatim so serialization round-trips.
    std::string text;

    LinearConstraint() = default;
    LinearConstraint(std::vector<Rational> a, Relation r, Rational b);

    int m() const { return static_cast<int>(coeffs.size()); }

    bool satisfied_exact(const std::vector<Rational>& p) const;
    // Float membership uses an absolute slack on the constraint residual.
    bool satisfied(const std::vector<double>& p, double slack) const;

    // Exact test on integer counts c with sum n: decides whether c/n
    // satisfies the constraint without forming any rationals, by comparing
    // sum_i A_i c_i against B * n where A_i, B are the coefficients and
    // bound scaled by the lcm of their denominators.
    bool satisfied_by_counts(const std::vector<long>& c, long n) const;

private:
    // Scaled integer form, built once at construction.
    std::vector<BigInt> int_coeffs_;
    BigInt int_bound_;
};

// Intersection of closed half-spaces/hyperplanes with the probability
// simplex. Exact vertex geometry is computed lazily.
class ConvexPiece {
public:
    ConvexPiece(int m, std::vector<LinearConstraint> constraints);

    int m() const { return m_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }

    bool contains(const Pmf& p, double slack = 1e-12) const;
    bool contains_point(const std::vector<double>& p, double slack = 1e-12) const;
    bool contains_exact(const std::vector<Rational>& p) const;
    bool contains_type(const std::vector<long>& counts, long n) const;

    // Exact vertices of the polytope (no duplicates, canonical order).
    const std::vector<std::vector<Rational>>& vertices() const;

    // Affine dimension; nullopt when the piece is empty.
    std::optional<int> dimension() const;

    bool empty() const { return !dimension().has_value(); }
    bool is_singleton() const { return dimension() == 0; }

    // Letters i with p_i = 0 everywhere on the piece (empty piece: all).
    std::vector<int> forced_zero_letters() const;

    // Barycenter of the vertex set; requires a nonempty piece.
    std::vector<Rational> barycenter_exact() const;

    // True when exact geometry was abandoned for the probe-based fallback
    // (only happens beyond the enumeration cap; dimension is then an upper
    // bound from constraint ranks and emptiness comes from a float probe).
    bool geometry_is_approximate() const;

private:
    struct Geometry;
    const Geometry& geometry() const;

    int m_;
    std::vector<LinearConstraint> constraints_;
    mutable std::shared_ptr<const Geometry> geom_;
};

// Finite union of convex pieces. Membership is the disjunction.
class FeasibleSet {
public:
    FeasibleSet() = default;
    FeasibleSet(int m, std::vector<ConvexPiece> pieces, std::string name = "");

    int m() const { return m_; }
    const std::string& name() const { return name_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    const ConvexPiece& piece(int i) const { return pieces_.at(static_cast<std::size_t>(i)); }
    const std::vector<ConvexPiece>& pieces() const { return pieces_; }

    bool contains(const Pmf& p, double slack = 1e-12) const;
    bool contains_point(const std::vector<double>& p, double slack = 1e-12) const;
    bool contains_type(const std::vector<long>& counts, long n) const;

    // All of Pi_n = Pi intersected with the types of length n, in
    // lexicographic order. Empty result is legal and means Pi_n is empty.
    std::vector<TypeVec> restrict_to_types(long n) const;

    // True when every piece is empty.
    bool empty() const;

private:
    int m_ = 0;
    std::string name_;
    std::vector<ConvexPiece> pieces_;
};

// Streams the count vectors of Pi_n in lexicographic order.
template <typename Fn>
void for_each_feasible_type(const FeasibleSet& set, long n, Fn&& fn) {
    for_each_type(n, set.m(), [&](const std::vector<long>& c) {
        if (set.contains_type(c, n)) fn(c);
    });
}

// Solves A x = b over the rationals (square system). Returns nullopt when A
// is singular.
std::optional<std::vector<Rational>> solve_linear_exact(
    std::vector<std::vector<Rational>> a, std::vector<Rational> b);

// Rank of a rational matrix.
int rational_rank(std::vector<std::vector<Rational>> rows);

}  // namespace typeslab
