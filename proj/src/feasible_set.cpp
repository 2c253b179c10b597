#include "typeslab/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace typeslab {

std::string relation_symbol(Relation r) {
    switch (r) {
        case Relation::Eq: return "=";
        case Relation::Le: return "<=";
        case Relation::Ge: return ">=";
    }
    return "?";
}

LinearConstraint::LinearConstraint(std::vector<Rational> a, Relation r, Rational b)
    : coeffs(std::move(a)), rel(r), bound(std::move(b)) {
    if (coeffs.empty()) throw std::invalid_argument("constraint: empty coefficient vector");
    std::vector<Rational> all = coeffs;
    all.push_back(bound);
    BigInt l = lcm_denominators(all);
    int_coeffs_.reserve(coeffs.size());
    for (const Rational& c : coeffs)
        int_coeffs_.push_back(c.get_num() * (l / c.get_den()));
    int_bound_ = bound.get_num() * (l / bound.get_den());
}

bool LinearConstraint::satisfied_exact(const std::vector<Rational>& p) const {
    if (p.size() != coeffs.size()) throw std::invalid_argument("constraint: dimension mismatch");
    Rational lhs = 0;
    for (std::size_t i = 0; i < p.size(); ++i) lhs += coeffs[i] * p[i];
    switch (rel) {
        case Relation::Eq: return lhs == bound;
        case Relation::Le: return lhs <= bound;
        case Relation::Ge: return lhs >= bound;
    }
    return false;
}

bool LinearConstraint::satisfied(const std::vector<double>& p, double slack) const {
    if (p.size() != coeffs.size()) throw std::invalid_argument("constraint: dimension mismatch");
    double lhs = 0;
    for (std::size_t i = 0; i < p.size(); ++i) lhs += to_double(coeffs[i]) * p[i];
    double b = to_double(bound);
    switch (rel) {
        case Relation::Eq: return std::fabs(lhs - b) <= slack;
        case Relation::Le: return lhs <= b + slack;
        case Relation::Ge: return lhs >= b - slack;
    }
    return false;
}

bool LinearConstraint::satisfied_by_counts(const std::vector<long>& c, long n) const {
    if (c.size() != coeffs.size()) throw std::invalid_argument("constraint: dimension mismatch");
    BigInt lhs = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != 0) lhs += int_coeffs_[i] * c[i];
    }
    BigInt rhs = int_bound_ * n;
    switch (rel) {
        case Relation::Eq: return lhs == rhs;
        case Relation::Le: return lhs <= rhs;
        case Relation::Ge: return lhs >= rhs;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Exact linear algebra

std::optional<std::vector<Rational>> solve_linear_exact(
    std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("solve: non-square system");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        Rational inv = a[col][col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / inv;
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

int rational_rank(std::vector<std::vector<Rational>> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows.size(); ++col) {
        std::size_t pivot = row;
        while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[row]);
        for (std::size_t r = row + 1; r < rows.size(); ++r) {
            if (rows[r][col] == 0) continue;
            Rational f = rows[r][col] / rows[row][col];
            for (std::size_t k = col; k < cols; ++k) rows[r][k] -= f * rows[row][k];
        }
        ++row;
        ++rank;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// Piece geometry

struct ConvexPiece::Geometry {
    std::vector<std::vector<Rational>> vertices;
    std::optional<int> dimension;
    bool approximate = false;
};

namespace {

// Hyperplane a . p = b in R^m.
struct Plane {
    std::vector<Rational> a;
    Rational b;
};

BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

void enumerate_vertices(int m, const std::vector<Plane>& required,
                        const std::vector<Plane>& optional_planes,
                        const std::vector<LinearConstraint>& constraints,
                        std::vector<std::vector<Rational>>* out) {
    const int need = m - static_cast<int>(required.size());
    if (need < 0) return;
    std::vector<int> idx(static_cast<std::size_t>(need));
    std::vector<std::vector<Rational>> a(static_cast<std::size_t>(m));
    std::vector<Rational> b(static_cast<std::size_t>(m));
    for (std::size_t r = 0; r < required.size(); ++r) {
        a[r] = required[r].a;
        b[r] = required[r].b;
    }

    auto try_system = [&]() {
        for (int j = 0; j < need; ++j) {
            a[required.size() + static_cast<std::size_t>(j)] = optional_planes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])].a;
            b[required.size() + static_cast<std::size_t>(j)] = optional_planes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])].b;
        }
        auto x = solve_linear_exact(a, b);
        if (!x) return;
        for (const Rational& xi : *x)
            if (xi < 0) return;
        for (const LinearConstraint& c : constraints)
            if (!c.satisfied_exact(*x)) return;
        if (std::find(out->begin(), out->end(), *x) == out->end()) out->push_back(*x);
    };

    // All combinations of `need` optional planes.
    const int total = static_cast<int>(optional_planes.size());
    if (need == 0) {
        try_system();
        return;
    }
    if (total < need) return;
    for (int j = 0; j < need; ++j) idx[static_cast<std::size_t>(j)] = j;
    while (true) {
        try_system();
        int j = need - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == total - need + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int k = j + 1; k < need; ++k) idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
}

int affine_dimension(const std::vector<std::vector<Rational>>& vertices) {
    if (vertices.size() <= 1) return 0;
    std::vector<std::vector<Rational>> diffs;
    diffs.reserve(vertices.size() - 1);
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        std::vector<Rational> d(vertices[i].size());
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = vertices[i][j] - vertices[0][j];
        diffs.push_back(std::move(d));
    }
    return rational_rank(std::move(diffs));
}

}  // namespace

ConvexPiece::ConvexPiece(int m, std::vector<LinearConstraint> constraints)
    : m_(m), constraints_(std::move(constraints)) {
    if (m_ < 1) throw std::invalid_argument("piece: need at least one letter");
    for (const LinearConstraint& c : constraints_)
        if (c.m() != m_) throw std::invalid_argument("piece: constraint dimension mismatch");
}

const ConvexPiece::Geometry& ConvexPiece::geometry() const {
    if (geom_) return *geom_;
    auto g = std::make_shared<Geometry>();

    std::vector<Plane> required;
    std::vector<Plane> optional_planes;

    // Simplex normalization is always tight.
    required.push_back({std::vector<Rational>(static_cast<std::size_t>(m_), Rational(1)), Rational(1)});
    for (const LinearConstraint& c : constraints_) {
        if (c.rel == Relation::Eq)
            required.push_back({c.coeffs, c.bound});
        else
            optional_planes.push_back({c.coeffs, c.bound});
    }
    // Nonnegativity facets.
    for (int i = 0; i < m_; ++i) {
        std::vector<Rational> a(static_cast<std::size_t>(m_), Rational(0));
        a[static_cast<std::size_t>(i)] = 1;
        optional_planes.push_back({std::move(a), Rational(0)});
    }

    const int need = m_ - static_cast<int>(required.size());
    bool tractable = need >= 0;
    if (tractable && need > 0) {
        BigInt combos = binomial(static_cast<unsigned long>(optional_planes.size()),
                                 static_cast<unsigned long>(need));
        tractable = combos <= 200000;
    }

    if (need < 0) {
        // More equalities than dimensions: the system is overdetermined but
        // may still be consistent. Solve a maximal square subsystem and
        // check the solution against everything.
        std::vector<std::vector<Rational>> rows;
        std::vector<Rational> rhs;
        for (const Plane& pl : required) {
            rows.push_back(pl.a);
            rhs.push_back(pl.b);
        }
        // Reduce to an independent square system by Gaussian elimination on
        // the augmented matrix.
        std::vector<std::vector<Rational>> aug;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto row = rows[i];
            row.push_back(rhs[i]);
            aug.push_back(std::move(row));
        }
        int rank = rational_rank(aug);
        std::vector<std::vector<Rational>> coef_only = rows;
        int crank = rational_rank(coef_only);
        if (crank < rank) {
            g->dimension = std::nullopt;  // inconsistent
        } else {
            // Pick `crank` independent rows, pad with nonnegativity facets if
            // still under-determined, then fall through to enumeration with
            // those rows as required planes. Simplest correct route: keep the
            // first maximal independent subset.
            std::vector<Plane> indep;
            std::vector<std::vector<Rational>> acc;
            for (const Plane& pl : required) {
                acc.push_back(pl.a);
                if (rational_rank(acc) == static_cast<int>(indep.size()) + 1)
                    indep.push_back(pl);
                else
                    acc.pop_back();
            }
            required = std::move(indep);
            enumerate_vertices(m_, required, optional_planes, constraints_, &g->vertices);
            std::sort(g->vertices.begin(), g->vertices.end());
            if (!g->vertices.empty()) g->dimension = affine_dimension(g->vertices);
        }
    } else if (tractable) {
        enumerate_vertices(m_, required, optional_planes, constraints_, &g->vertices);
        std::sort(g->vertices.begin(), g->vertices.end());
        if (!g->vertices.empty()) g->dimension = affine_dimension(g->vertices);
    } else {
        // Probe fallback for large systems: dimension bound from ranks and a
        // float feasibility probe with 1e-9 tolerance.
        g->approximate = true;
        std::vector<std::vector<Rational>> eq_rows;
        eq_rows.push_back(std::vector<Rational>(static_cast<std::size_t>(m_), Rational(1)));
        for (const LinearConstraint& c : constraints_)
            if (c.rel == Relation::Eq) eq_rows.push_back(c.coeffs);
        int bound_dim = m_ - rational_rank(eq_rows);
        std::vector<double> probe(static_cast<std::size_t>(m_), 1.0 / m_);
        bool feasible = true;
        for (const LinearConstraint& c : constraints_)
            if (!c.satisfied(probe, 1e-9)) feasible = false;
        g->dimension = feasible ? std::optional<int>(bound_dim) : std::nullopt;
    }

    geom_ = std::move(g);
    return *geom_;
}

bool ConvexPiece::contains(const Pmf& p, double slack) const {
    if (p.size() != m_) throw std::invalid_argument("piece: pmf dimension mismatch");
    if (p.is_exact()) return contains_exact(p.exact_values());
    return contains_point(p.values(), slack);
}

bool ConvexPiece::contains_point(const std::vector<double>& p, double slack) const {
    for (const LinearConstraint& c : constraints_)
        if (!c.satisfied(p, slack)) return false;
    return true;
}

bool ConvexPiece::contains_exact(const std::vector<Rational>& p) const {
    for (const LinearConstraint& c : constraints_)
        if (!c.satisfied_exact(p)) return false;
    return true;
}

bool ConvexPiece::contains_type(const std::vector<long>& counts, long n) const {
    for (const LinearConstraint& c : constraints_)
        if (!c.satisfied_by_counts(counts, n)) return false;
    return true;
}

const std::vector<std::vector<Rational>>& ConvexPiece::vertices() const {
    return geometry().vertices;
}

std::optional<int> ConvexPiece::dimension() const { return geometry().dimension; }

bool ConvexPiece::geometry_is_approximate() const { return geometry().approximate; }

std::vector<int> ConvexPiece::forced_zero_letters() const {
    std::vector<int> out;
    const auto& vs = vertices();
    if (vs.empty()) {
        for (int i = 0; i < m_; ++i) out.push_back(i);
        return out;
    }
    for (int i = 0; i < m_; ++i) {
        bool all_zero = true;
        for (const auto& v : vs)
            if (v[static_cast<std::size_t>(i)] != 0) { all_zero = false; break; }
        if (all_zero) out.push_back(i);
    }
    return out;
}

std::vector<Rational> ConvexPiece::barycenter_exact() const {
    const auto& vs = vertices();
    if (vs.empty()) throw std::logic_error("piece: barycenter of an empty piece");
    std::vector<Rational> c(static_cast<std::size_t>(m_), Rational(0));
    for (const auto& v : vs)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += v[i];
    for (Rational& x : c) x /= Rational(static_cast<long>(vs.size()));
    return c;
}

// ---------------------------------------------------------------------------
// FeasibleSet

FeasibleSet::FeasibleSet(int m, std::vector<ConvexPiece> pieces, std::string name)
    : m_(m), name_(std::move(name)), pieces_(std::move(pieces)) {
    if (m_ < 1) throw std::invalid_argument("set: need at least one letter");
    if (pieces_.empty()) throw std::invalid_argument("set: need at least one piece");
    for (const ConvexPiece& p : pieces_)
        if (p.m() != m_) throw std::invalid_argument("set: piece dimension mismatch");
}

bool FeasibleSet::contains(const Pmf& p, double slack) const {
    for (const ConvexPiece& piece : pieces_)
        if (piece.contains(p, slack)) return true;
    return false;
}

bool FeasibleSet::contains_point(const std::vector<double>& p, double slack) const {
    for (const ConvexPiece& piece : pieces_)
        if (piece.contains_point(p, slack)) return true;
    return false;
}

bool FeasibleSet::contains_type(const std::vector<long>& counts, long n) const {
    for (const ConvexPiece& piece : pieces_)
        if (piece.contains_type(counts, n)) return true;
    return false;
}

std::vector<TypeVec> FeasibleSet::restrict_to_types(long n) const {
    std::vector<TypeVec> out;
    for_each_feasible_type(*this, n, [&](const std::vector<long>& c) { out.emplace_back(c); });
    return out;
}

bool FeasibleSet::empty() const {
    for (const ConvexPiece& p : pieces_)
        if (!p.empty()) return false;
    return true;
}

}  // namespace typeslab
