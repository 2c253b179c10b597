#include "typeslab/projections.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include "typeslab/rng.hpp"
#include "typeslab/types_core.hpp"

namespace typeslab {

std::string kind_name(ProjectionKind k) {
    switch (k) {
        case ProjectionKind::I: return "I";
        case ProjectionKind::J: return "J";
        case ProjectionKind::Mu: return "mu";
        case ProjectionKind::Gamma: return "gamma";
        case ProjectionKind::Or: return "or";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DivKind { I, J };

// ---------------------------------------------------------------------------
// Dense double linear algebra (systems stay tiny: m plus a few constraints).

bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>* x) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > best) {
                best = std::fabs(a[r][col]);
                pivot = r;
            }
        }
        if (best < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            if (f == 0) continue;
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*x)[i] = b[i] / a[i][i];
    return true;
}

// ---------------------------------------------------------------------------
// Divergence objectives on the reduced letter set. q holds the original
// source weights of the active letters (not renormalized); entries of p
// outside the active set are zero and contribute nothing.

double divergence_value(DivKind kind, const std::vector<double>& p,
                        const std::vector<double>& q) {
    double f = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0) {
            if (q[i] <= 0) return kInf;
            f += p[i] * std::log(p[i] / q[i]);
        } else if (kind == DivKind::J && q[i] > 0) {
            return kInf;
        }
        if (kind == DivKind::J && q[i] > 0) f += q[i] * std::log(q[i] / p[i]);
    }
    return f;
}

void divergence_gradient(DivKind kind, const std::vector<double>& p,
                         const std::vector<double>& q, std::vector<double>* g) {
    g->resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double v = std::log(p[i] / q[i]) + 1.0;
        if (kind == DivKind::J) v -= q[i] / p[i];
        (*g)[i] = v;
    }
}

void divergence_hessian_diag(DivKind kind, const std::vector<double>& p,
                             const std::vector<double>& q, std::vector<double>* h) {
    h->resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double v = 1.0 / p[i];
        if (kind == DivKind::J) v += q[i] / (p[i] * p[i]);
        (*h)[i] = v;
    }
}

// ---------------------------------------------------------------------------
// Equality-constrained solves on the reduced letter set.

struct EqualitySolve {
    std::vector<double> p;
    std::vector<double> multipliers;
    double residual = 0;
    bool converged = false;
};

// I-divergence: maximize the dual g(lambda) = lambda.b - log sum q e^{A'lambda}
// with Newton steps on the constraint residual. The primal iterates
// p_i ~ q_i exp(sum_j lambda_j A_ji) stay strictly positive throughout.
EqualitySolve dual_newton_i(const std::vector<double>& q,
                            const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& rhs, int max_iterations) {
    const std::size_t m = q.size();
    const std::size_t k = rows.size();
    std::vector<double> lam(k, 0.0);
    std::vector<double> logq(m);
    for (std::size_t i = 0; i < m; ++i) logq[i] = std::log(q[i]);

    auto primal = [&](const std::vector<double>& l, std::vector<double>* p) {
        std::vector<double> s(m);
        double mx = -kInf;
        for (std::size_t i = 0; i < m; ++i) {
            double v = logq[i];
            for (std::size_t j = 0; j < k; ++j) v += l[j] * rows[j][i];
            s[i] = v;
            mx = std::max(mx, v);
        }
        double z = 0;
        for (std::size_t i = 0; i < m; ++i) z += std::exp(s[i] - mx);
        double logz = mx + std::log(z);
        p->resize(m);
        for (std::size_t i = 0; i < m; ++i) (*p)[i] = std::exp(s[i] - logz);
        return logz;
    };
    auto dual_value = [&](const std::vector<double>& l, std::vector<double>* p) {
        double logz = primal(l, p);
        double g = -logz;
        for (std::size_t j = 0; j < k; ++j) g += l[j] * rhs[j];
        return g;
    };

    double scale = 1.0;
    for (double b : rhs) scale = std::max(scale, std::fabs(b));

    EqualitySolve out;
    std::vector<double> p;
    double g = dual_value(lam, &p);
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::vector<double> r(k);
        double rmax = 0;
        std::vector<double> ap(k);
        for (std::size_t j = 0; j < k; ++j) {
            double v = 0;
            for (std::size_t i = 0; i < m; ++i) v += rows[j][i] * p[i];
            ap[j] = v;
            r[j] = rhs[j] - v;
            rmax = std::max(rmax, std::fabs(r[j]));
        }
        out.residual = rmax;
        if (rmax <= 1e-13 * scale) {
            out.converged = true;
            break;
        }
        std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) {
                double v = 0;
                for (std::size_t i = 0; i < m; ++i) v += rows[a][i] * rows[b][i] * p[i];
                v -= ap[a] * ap[b];
                cov[a][b] = cov[b][a] = v;
            }
        std::vector<double> step;
        bool ok = solve_dense(cov, r, &step);
        if (!ok) {
            for (std::size_t a = 0; a < k; ++a) cov[a][a] += 1e-12 * (1.0 + cov[a][a]);
            ok = solve_dense(cov, r, &step);
            if (!ok) break;
        }
        double slope = 0;
        for (std::size_t j = 0; j < k; ++j) slope += r[j] * step[j];
        double t = 1.0;
        bool moved = false;
        while (t >= 1e-14) {
            std::vector<double> cand(k);
            for (std::size_t j = 0; j < k; ++j) cand[j] = lam[j] + t * step[j];
            std::vector<double> pc;
            double gc = dual_value(cand, &pc);
            if (gc >= g + 1e-4 * t * slope || gc > g) {
                lam = std::move(cand);
                p = std::move(pc);
                g = gc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    if (k == 0) out.converged = true;
    out.p = std::move(p);
    out.multipliers = std::move(lam);
    return out;
}

// Feasible-start Newton on the KKT system for equality-constrained
// minimization of a divergence with diagonal Hessian. rows must contain the
// normalization row (all ones, rhs 1); p0 must satisfy them and be interior.
EqualitySolve kkt_newton(DivKind kind, const std::vector<double>& q,
                         const std::vector<std::vector<double>>& rows,
                         std::vector<double> p0, int max_iterations) {
    const std::size_t m = q.size();
    const std::size_t k = rows.size();
    EqualitySolve out;
    std::vector<double> p = std::move(p0);
    double f = divergence_value(kind, p, q);
    std::vector<double> grad, hess;
    for (int iter = 0; iter < max_iterations; ++iter) {
        divergence_gradient(kind, p, q, &grad);
        divergence_hessian_diag(kind, p, q, &hess);
        const std::size_t dim = m + k;
        std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
        std::vector<double> b(dim, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            a[i][i] = hess[i];
            b[i] = -grad[i];
        }
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                a[i][m + j] = rows[j][i];
                a[m + j][i] = rows[j][i];
            }
        std::vector<double> sol;
        if (!solve_dense(a, b, &sol)) {
            for (std::size_t i = 0; i < m; ++i) a[i][i] = hess[i] * (1.0 + 1e-12) + 1e-12;
            if (!solve_dense(a, b, &sol)) break;
        }
        std::vector<double> dp(sol.begin(), sol.begin() + static_cast<long>(m));
        out.multipliers.assign(sol.begin() + static_cast<long>(m), sol.end());

        double decrement = 0;
        for (std::size_t i = 0; i < m; ++i) decrement -= grad[i] * dp[i];
        double dpmax = 0;
        for (double v : dp) dpmax = std::max(dpmax, std::fabs(v));
        out.residual = dpmax;
        if (dpmax < 1e-14 || decrement < 1e-28) {
            out.converged = true;
            break;
        }

        double tmax = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            if (dp[i] < 0) tmax = std::min(tmax, -0.99 * p[i] / dp[i]);
        double t = tmax;
        bool moved = false;
        while (t >= 1e-14) {
            std::vector<double> cand(m);
            for (std::size_t i = 0; i < m; ++i) cand[i] = p[i] + t * dp[i];
            double fc = divergence_value(kind, cand, q);
            if (fc < f) {
                p = std::move(cand);
                f = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            out.converged = out.residual < 1e-9;
            break;
        }
    }
    out.p = std::move(p);
    return out;
}

// ---------------------------------------------------------------------------
// Per-piece solve machinery.

struct Candidate {
    std::vector<double> point;  // full space
    double objective = kInf;
    std::vector<double> multipliers;
    int piece_index = -1;
};

struct ReducedPiece {
    std::vector<int> letters;                    // active letters, full-space ids
    std::vector<double> q;                       // source at active letters
    std::vector<std::vector<double>> eq_rows;    // independent equalities
    std::vector<double> eq_rhs;
    std::vector<const LinearConstraint*> ineqs;  // original inequality constraints
    std::vector<std::vector<double>> vertices;   // reduced coordinates
};

std::vector<double> expand(const std::vector<double>& reduced,
                           const std::vector<int>& letters, int m) {
    std::vector<double> full(static_cast<std::size_t>(m), 0.0);
    for (std::size_t i = 0; i < letters.size(); ++i)
        full[static_cast<std::size_t>(letters[i])] = reduced[i];
    return full;
}

// Keeps a maximal exactly-independent subset of the equality rows
// (restricted to the active letters). Rows that are dependent are dropped;
// an inconsistent dependent row cannot happen on a nonempty piece.
void independent_equalities(const std::vector<const LinearConstraint*>& eqs,
                            const std::vector<int>& letters,
                            std::vector<std::vector<double>>* rows,
                            std::vector<double>* rhs) {
    std::vector<std::vector<Rational>> acc;
    // The normalization row is implicit in both solvers; include it in the
    // rank accounting so constraints parallel to it get dropped.
    acc.emplace_back(letters.size() + 1, Rational(1));
    for (const LinearConstraint* c : eqs) {
        std::vector<Rational> row;
        row.reserve(letters.size() + 1);
        for (int l : letters) row.push_back(c->coeffs[static_cast<std::size_t>(l)]);
        row.push_back(c->bound);
        acc.push_back(row);
        if (rational_rank(acc) != static_cast<int>(acc.size())) {
            acc.pop_back();
            continue;
        }
        std::vector<double> drow;
        drow.reserve(letters.size());
        for (int l : letters) drow.push_back(to_double(c->coeffs[static_cast<std::size_t>(l)]));
        rows->push_back(std::move(drow));
        rhs->push_back(to_double(c->bound));
    }
}

// Equality-only minimization over a full-space piece described by equality
// constraints (plus the simplex). Returns nullopt when the divergence is
// identically infinite on the piece. Throws SolverError on nonconvergence.
std::optional<Candidate> solve_equality_piece(DivKind kind, const Pmf& q,
                                              const ConvexPiece& piece, int piece_index,
                                              const SolverOptions& options) {
    if (piece.empty()) return std::nullopt;
    const int m = piece.m();

    std::vector<int> forced = piece.forced_zero_letters();
    std::vector<bool> is_forced(static_cast<std::size_t>(m), false);
    for (int i : forced) is_forced[static_cast<std::size_t>(i)] = true;
    if (kind == DivKind::J) {
        for (int i : forced)
            if (q.value(i) > 0) return std::nullopt;
    }

    // Callers pin q-zero letters with explicit p_i = 0 equalities, so by the
    // time we get here those letters are forced. A piece that still leaves a
    // q-zero letter free cannot be handled by the interior parametrization.
    for (int i = 0; i < m; ++i)
        if (q.value(i) <= 0 && !is_forced[static_cast<std::size_t>(i)]) return std::nullopt;

    std::vector<int> letters;
    for (int i = 0; i < m; ++i)
        if (!is_forced[static_cast<std::size_t>(i)]) letters.push_back(i);
    if (letters.empty()) return std::nullopt;

    Candidate cand;
    cand.piece_index = piece_index;

    if (piece.is_singleton()) {
        const auto& v = piece.vertices().front();
        std::vector<double> p(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) p[i] = to_double(v[i]);
        double f = divergence_value(kind, p, q.values());
        if (!std::isfinite(f)) return std::nullopt;
        cand.point = std::move(p);
        cand.objective = f;
        return cand;
    }

    std::vector<double> qr;
    qr.reserve(letters.size());
    for (int l : letters) qr.push_back(q.value(l));

    std::vector<const LinearConstraint*> eqs;
    for (const LinearConstraint& c : piece.constraints())
        if (c.rel == Relation::Eq) eqs.push_back(&c);

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    independent_equalities(eqs, letters, &rows, &rhs);

    EqualitySolve sol;
    if (kind == DivKind::I) {
        sol = dual_newton_i(qr, rows, rhs, options.max_iterations);
    } else {
        // Feasible interior start: barycenter of the piece's vertices.
        std::vector<Rational> bc = piece.barycenter_exact();
        std::vector<double> p0;
        p0.reserve(letters.size());
        for (int l : letters) p0.push_back(to_double(bc[static_cast<std::size_t>(l)]));
        for (double v : p0)
            if (!(v > 0)) return std::nullopt;
        std::vector<std::vector<double>> rows_n = rows;
        rows_n.insert(rows_n.begin(), std::vector<double>(letters.size(), 1.0));
        sol = kkt_newton(kind, qr, rows_n, std::move(p0), options.max_iterations);
    }
    if (!sol.converged) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "solver did not converge (residual %.3e)",
                      sol.residual);
        throw SolverError(buf);
    }
    cand.point = expand(sol.p, letters, m);
    cand.objective = divergence_value(kind, sol.p, qr);
    cand.multipliers = std::move(sol.multipliers);
    return cand;
}

// Exponentiated-gradient descent over the vertex-weight simplex with a
// backtracking line search; every iterate is a strict convex combination of
// the piece's vertices and therefore feasible.
struct EgResult {
    std::vector<double> p;
    double objective = kInf;
    int iterations = 0;
};

EgResult eg_descent(DivKind kind, const std::vector<double>& q,
                    const std::vector<std::vector<double>>& vertices,
                    const SolverOptions& options) {
    const std::size_t nv = vertices.size();
    const std::size_t m = q.size();

    auto mix = [&](const std::vector<double>& wv, std::vector<double>* p) {
        p->assign(m, 0.0);
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t i = 0; i < m; ++i) (*p)[i] += wv[v] * vertices[v][i];
    };

    EgResult out;
    std::vector<double> grad, vg(nv);
    const int starts = std::max(1, options.multistart);
    for (int start = 0; start < starts; ++start) {
        std::vector<double> w(nv);
        if (start == 0) {
            std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(nv));
        } else {
            // Deterministic jittered starts for the optional multistart.
            double norm = 0;
            for (std::size_t v = 0; v < nv; ++v) {
                std::uint64_t h = mix64(static_cast<std::uint64_t>(start) * 7919u + v);
                w[v] = 0.05 + static_cast<double>(h >> 11) * 0x1.0p-53;
                norm += w[v];
            }
            for (double& x : w) x /= norm;
        }
        std::vector<double> p;
        mix(w, &p);
        double f = divergence_value(kind, p, q);
        double eta = 1.0;
        for (int iter = 0; iter < options.max_iterations; ++iter) {
            out.iterations = iter;
            divergence_gradient(kind, p, q, &grad);
            double gmin = kInf;
            for (std::size_t v = 0; v < nv; ++v) {
                double s = 0;
                for (std::size_t i = 0; i < m; ++i) s += grad[i] * vertices[v][i];
                vg[v] = s;
                gmin = std::min(gmin, s);
            }
            bool accepted = false;
            while (eta >= 1e-12) {
                std::vector<double> wc(nv);
                double norm = 0;
                for (std::size_t v = 0; v < nv; ++v) {
                    wc[v] = w[v] * std::exp(-eta * (vg[v] - gmin));
                    norm += wc[v];
                }
                for (double& x : wc) x /= norm;
                std::vector<double> pc;
                mix(wc, &pc);
                double fc = divergence_value(kind, pc, q);
                if (fc < f - 1e-16 * (1.0 + std::fabs(f))) {
                    w = std::move(wc);
                    p = std::move(pc);
                    f = fc;
                    accepted = true;
                    eta = std::min(eta * 1.5, 64.0);
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) break;
        }
        if (f < out.objective) {
            out.p = p;
            out.objective = f;
        }
    }
    return out;
}

std::optional<Candidate> solve_piece(DivKind kind, const Pmf& q, const ConvexPiece& piece,
                                     int piece_index, const SolverOptions& options) {
    if (piece.empty()) return std::nullopt;
    const int m = piece.m();

    // Letters the source never emits must be pinned to zero up front so the
    // geometry (forced zeros, singleton detection) reflects the real domain.
    std::vector<LinearConstraint> work = piece.constraints();
    bool pinned = false;
    for (int i = 0; i < m; ++i) {
        bool qzero = q.is_exact() ? q.exact_value(i) == 0 : !(q.value(i) > 0);
        if (!qzero) continue;
        std::vector<Rational> row(static_cast<std::size_t>(m), Rational(0));
        row[static_cast<std::size_t>(i)] = 1;
        work.emplace_back(std::move(row), Relation::Eq, Rational(0));
        pinned = true;
    }
    ConvexPiece domain = pinned ? ConvexPiece(m, work) : piece;
    if (domain.empty()) return std::nullopt;

    std::vector<int> forced = domain.forced_zero_letters();
    if (kind == DivKind::J) {
        for (int i : forced)
            if (q.value(i) > 0) return std::nullopt;
    }
    std::vector<bool> is_forced(static_cast<std::size_t>(m), false);
    for (int i : forced) is_forced[static_cast<std::size_t>(i)] = true;
    std::vector<int> letters;
    for (int i = 0; i < m; ++i)
        if (!is_forced[static_cast<std::size_t>(i)]) letters.push_back(i);
    if (letters.empty()) return std::nullopt;

    if (domain.is_singleton()) {
        const auto& v = domain.vertices().front();
        std::vector<double> p(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) p[i] = to_double(v[i]);
        double f = divergence_value(kind, p, q.values());
        if (!std::isfinite(f)) return std::nullopt;
        Candidate cand;
        cand.piece_index = piece_index;
        cand.point = std::move(p);
        cand.objective = f;
        return cand;
    }

    std::vector<const LinearConstraint*> ineqs;
    std::vector<LinearConstraint> eq_only;
    for (const LinearConstraint& c : domain.constraints()) {
        if (c.rel == Relation::Eq) eq_only.push_back(c);
        else ineqs.push_back(&c);
    }

    if (ineqs.empty()) {
        auto cand = solve_equality_piece(kind, q, domain, piece_index, options);
        if (cand) cand->piece_index = piece_index;
        return cand;
    }

    // Fast path: minimize subject to the equalities alone; if the optimum
    // already satisfies the inequalities it is the piece optimum.
    {
        ConvexPiece relaxed(m, eq_only);
        try {
            auto cand = solve_equality_piece(kind, q, relaxed, piece_index, options);
            if (cand && domain.contains_point(cand->point, 1e-12)) {
                cand->piece_index = piece_index;
                return cand;
            }
        } catch (const SolverError&) {
            // fall through to the vertex-weight descent
        }
    }

    // General path: exponentiated gradient over the vertex weights.
    std::vector<double> qr;
    qr.reserve(letters.size());
    for (int l : letters) qr.push_back(q.value(l));
    std::vector<std::vector<double>> verts;
    verts.reserve(domain.vertices().size());
    for (const auto& v : domain.vertices()) {
        std::vector<double> rv;
        rv.reserve(letters.size());
        for (int l : letters) rv.push_back(to_double(v[static_cast<std::size_t>(l)]));
        verts.push_back(std::move(rv));
    }
    EgResult eg = eg_descent(kind, qr, verts, options);

    Candidate best;
    best.piece_index = piece_index;
    best.point = expand(eg.p, letters, m);
    best.objective = eg.objective;

    // Active-set polish: freeze the inequalities that are tight at the EG
    // optimum and re-solve the resulting equality system to full precision.
    std::vector<LinearConstraint> frozen = eq_only;
    for (const LinearConstraint* c : ineqs) {
        double lhs = 0;
        for (int i = 0; i < m; ++i)
            lhs += to_double(c->coeffs[static_cast<std::size_t>(i)]) *
                   best.point[static_cast<std::size_t>(i)];
        double b = to_double(c->bound);
        // Generous tightness window: a wrongly frozen constraint is caught
        // below by the feasibility and objective checks on the polish.
        if (std::fabs(lhs - b) <= 1e-5 * std::max(1.0, std::fabs(b)))
            frozen.emplace_back(c->coeffs, Relation::Eq, c->bound);
    }
    for (int i : forced) {
        std::vector<Rational> row(static_cast<std::size_t>(m), Rational(0));
        row[static_cast<std::size_t>(i)] = 1;
        frozen.emplace_back(std::move(row), Relation::Eq, Rational(0));
    }
    try {
        ConvexPiece sub(m, frozen);
        auto polished = solve_equality_piece(kind, q, sub, piece_index, options);
        if (polished && domain.contains_point(polished->point, 1e-10) &&
            polished->objective <= best.objective + 1e-9 * (1.0 + std::fabs(best.objective))) {
            polished->piece_index = piece_index;
            return polished;
        }
    } catch (const SolverError&) {
        // keep the EG answer
    }
    return best;
}

bool points_close(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
    return d < 1e-9;
}

bool point_is_proper(const std::vector<double>& p, const FeasibleSet& set) {
    for (int i = 0; i < set.piece_count(); ++i) {
        const ConvexPiece& piece = set.piece(i);
        if (!piece.contains_point(p, 1e-9)) continue;
        auto dim = piece.dimension();
        if (dim && *dim >= 1) return true;
    }
    return false;
}

ProjectionSet divergence_projections(DivKind kind, const Pmf& q, const FeasibleSet& set,
                                     const SolverOptions& options) {
    if (q.size() != set.m())
        throw std::invalid_argument("projection: source/set dimension mismatch");
    if (set.empty()) throw FeasibilityError("projection: every piece of the set is empty");

    ProjectionSet out;
    out.kind = kind == DivKind::I ? ProjectionKind::I : ProjectionKind::J;

    // If the source itself is feasible the projection is the source.
    if (set.contains(q)) {
        ProjectionPoint pt;
        pt.point = q.values();
        pt.objective = 0;
        pt.log_objective = 0;
        pt.proper = point_is_proper(pt.point, set);
        for (int i = 0; i < set.piece_count(); ++i)
            if (set.piece(i).contains(q)) {
                pt.piece_index = i;
                break;
            }
        out.points.push_back(std::move(pt));
        return out;
    }

    std::vector<Candidate> candidates;
    for (int i = 0; i < set.piece_count(); ++i) {
        auto cand = solve_piece(kind, q, set.piece(i), i, options);
        if (cand && std::isfinite(cand->objective)) candidates.push_back(std::move(*cand));
    }
    if (candidates.empty())
        throw FeasibilityError("projection: divergence is infinite on every piece");

    double fmin = kInf;
    for (const Candidate& c : candidates) fmin = std::min(fmin, c.objective);
    const double window = options.tie_tol * std::max(1.0, std::fabs(fmin));

    for (const Candidate& c : candidates) {
        double gap = c.objective - fmin;
        if (gap <= window) continue;
        if (gap <= 1000.0 * window) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "near-tie: piece %d objective gap %.6e (window %.1e)",
                          c.piece_index, gap, window);
            out.warnings.push_back(buf);
        }
    }

    for (const Candidate& c : candidates) {
        if (c.objective - fmin > window) continue;
        bool dup = false;
        for (ProjectionPoint& existing : out.points) {
            if (points_close(existing.point, c.point)) {
                if (c.objective < existing.objective) {
                    existing.point = c.point;
                    existing.objective = c.objective;
                    existing.multipliers = c.multipliers;
                    existing.piece_index = c.piece_index;
                }
                dup = true;
                break;
            }
        }
        if (dup) continue;
        ProjectionPoint pt;
        pt.point = c.point;
        pt.objective = c.objective;
        pt.log_objective = c.objective > 0 ? std::log(c.objective) : -kInf;
        pt.multipliers = c.multipliers;
        pt.piece_index = c.piece_index;
        pt.proper = point_is_proper(pt.point, set);
        out.points.push_back(std::move(pt));
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ProjectionPoint& a, const ProjectionPoint& b) {
                  return a.point < b.point;
              });
    return out;
}

}  // namespace

ProjectionSet i_projections(const Pmf& q, const FeasibleSet& set,
                            const SolverOptions& options) {
    return divergence_projections(DivKind::I, q, set, options);
}

ProjectionSet j_projections(const Pmf& q, const FeasibleSet& set,
                            const SolverOptions& options) {
    return divergence_projections(DivKind::J, q, set, options);
}

long jeffreys_base(const Pmf& q) {
    if (!q.is_exact())
        throw std::invalid_argument("jeffreys base: needs an exact rational source");
    BigInt l = lcm_denominators(q.exact_values());
    if (!l.fits_slong_p())
        throw std::invalid_argument("jeffreys base: denominator lcm out of range");
    return l.get_si();
}

namespace {

// Shared exhaustive argmax over Pi_n with exact integer scores.
struct ExactArgmax {
    BigInt best = 0;
    std::vector<TypeVec> ties;
    bool any_type = false;

    void offer(const std::vector<long>& counts, BigInt score) {
        any_type = true;
        if (score == 0) return;
        if (ties.empty() || score > best) {
            best = std::move(score);
            ties.clear();
            ties.emplace_back(counts);
        } else if (score == best) {
            ties.emplace_back(counts);
        }
    }
};

ProjectionSet finish_finite_kind(ProjectionKind kind, long n, const FeasibleSet& set,
                                 ExactArgmax&& acc,
                                 const std::function<double(const TypeVec&)>& log_score) {
    ProjectionSet out;
    out.kind = kind;
    out.n = n;
    if (!acc.any_type) {
        out.warnings.push_back("empty feasible type set at this n");
        return out;
    }
    if (acc.ties.empty()) {
        out.degenerate = true;
        out.warnings.push_back("all feasible types have zero score");
        return out;
    }
    for (TypeVec& t : acc.ties) {
        ProjectionPoint pt;
        pt.point = t.frequencies_double();
        pt.log_objective = log_score(t);
        pt.objective = std::exp(pt.log_objective);
        pt.proper = false;
        const Pmf freqs = t.frequencies();
        for (int i = 0; i < set.piece_count(); ++i) {
            const ConvexPiece& piece = set.piece(i);
            if (!piece.contains(freqs)) continue;
            if (pt.piece_index < 0) pt.piece_index = i;
            auto dim = piece.dimension();
            if (dim && *dim >= 1) pt.proper = true;
        }
        pt.type = std::move(t);
        out.points.push_back(std::move(pt));
    }
    return out;
}

}  // namespace

ProjectionSet mu_projections(const Pmf& q, const FeasibleSet& set, long n) {
    if (q.size() != set.m())
        throw std::invalid_argument("projection: source/set dimension mismatch");
    if (n < 1) throw std::invalid_argument("projection: n must be positive");

    if (q.is_exact()) {
        ScaledSource src(q);
        const double logd = log_bigint(src.denom);
        ExactArgmax acc;
        for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
            acc.offer(c, type_weight_numerator(TypeVec(c), src));
        });
        return finish_finite_kind(ProjectionKind::Mu, n, set, std::move(acc),
                                  [&](const TypeVec& t) {
                                      return log_bigint(type_weight_numerator(t, src)) -
                                             static_cast<double>(n) * logd;
                                  });
    }

    // Float source: log-domain argmax with an absolute tie window on logs.
    ProjectionSet out;
    out.kind = ProjectionKind::Mu;
    out.n = n;
    double best = -kInf;
    bool any_type = false;
    std::vector<TypeVec> ties;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        any_type = true;
        TypeVec t(c);
        double s = log_type_probability(t, q);
        if (s == -kInf) return;
        if (s > best + 1e-12) {
            best = s;
            ties.clear();
            ties.push_back(std::move(t));
        } else if (s >= best - 1e-12) {
            ties.push_back(std::move(t));
            best = std::max(best, s);
        }
    });
    if (!any_type) {
        out.warnings.push_back("empty feasible type set at this n");
        return out;
    }
    if (ties.empty()) {
        out.degenerate = true;
        out.warnings.push_back("all feasible types have zero probability");
        return out;
    }
    for (TypeVec& t : ties) {
        ProjectionPoint pt;
        pt.point = t.frequencies_double();
        pt.log_objective = log_type_probability(t, q);
        pt.objective = std::exp(pt.log_objective);
        pt.proper = false;
        const Pmf freqs = t.frequencies();
        for (int i = 0; i < set.piece_count(); ++i) {
            const ConvexPiece& piece = set.piece(i);
            if (!piece.contains(freqs)) continue;
            if (pt.piece_index < 0) pt.piece_index = i;
            auto dim = piece.dimension();
            if (dim && *dim >= 1) pt.proper = true;
        }
        pt.type = std::move(t);
        out.points.push_back(std::move(pt));
    }
    return out;
}

std::vector<long> scaled_source_counts(const Pmf& q, long n) {
    if (!q.is_exact())
        throw std::invalid_argument("scaled source counts: needs an exact rational source");
    if (n % jeffreys_base(q) != 0)
        throw std::invalid_argument("scaled source counts: n must be a multiple of " +
                                    std::to_string(jeffreys_base(q)));
    std::vector<long> g(static_cast<std::size_t>(q.size()));
    for (int i = 0; i < q.size(); ++i) {
        Rational gi = q.exact_value(i) * n;
        g[static_cast<std::size_t>(i)] = static_cast<long>(gi.get_num().get_si());
    }
    return g;
}

namespace {

void require_gamma_inputs(const Pmf& q, long n, const char* what) {
    if (!q.is_exact())
        throw std::invalid_argument(std::string(what) + ": needs an exact rational source");
    long base = jeffreys_base(q);
    if (n % base != 0)
        throw std::invalid_argument(std::string(what) + ": n must be a multiple of " +
                                    std::to_string(base));
}

}  // namespace

ProjectionSet gamma_projections(const Pmf& q, const FeasibleSet& set, long n) {
    if (q.size() != set.m())
        throw std::invalid_argument("projection: source/set dimension mismatch");
    require_gamma_inputs(q, n, "gamma projection");

    ScaledSource src(q);
    const std::vector<long> g = scaled_source_counts(q, n);
    TypeVec gt(g);
    const double log_gamma_g = log_bigint(multiplicity(gt));
    const double logd = log_bigint(src.denom);
    const double logn = std::log(static_cast<double>(n));

    ExactArgmax acc;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        TypeVec t(c);
        BigInt w = type_weight_numerator(t, src);
        if (w != 0) w *= counts_power(c, g);
        acc.offer(c, std::move(w));
    });
    return finish_finite_kind(
        ProjectionKind::Gamma, n, set, std::move(acc), [&](const TypeVec& t) {
            BigInt w = type_weight_numerator(t, src) * counts_power(t.counts, g);
            return log_bigint(w) + log_gamma_g -
                   static_cast<double>(n) * (logd + logn);
        });
}

ProjectionSet or_projections(const Pmf& q, const FeasibleSet& set, long n) {
    if (q.size() != set.m())
        throw std::invalid_argument("projection: source/set dimension mismatch");
    require_gamma_inputs(q, n, "or projection");

    ScaledSource src(q);
    const std::vector<long> g = scaled_source_counts(q, n);
    TypeVec gt(g);
    const BigInt gamma_g = multiplicity(gt);
    const double logd = log_bigint(src.denom);
    const double logn = std::log(static_cast<double>(n));

    BigInt nn, dn;
    {
        BigInt base(n);
        mpz_pow_ui(nn.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(n));
        mpz_pow_ui(dn.get_mpz_t(), src.denom.get_mpz_t(), static_cast<unsigned long>(n));
    }

    // Explicit return type: gmpxx expression templates must not outlive the
    // temporaries they reference.
    auto score = [&](const std::vector<long>& c) -> BigInt {
        return type_weight_numerator(TypeVec(c), src) * nn +
               gamma_g * counts_power(c, g) * dn;
    };

    ExactArgmax acc;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) { acc.offer(c, score(c)); });
    return finish_finite_kind(ProjectionKind::Or, n, set, std::move(acc),
                              [&](const TypeVec& t) {
                                  return log_bigint(score(t.counts)) -
                                         static_cast<double>(n) * (logd + logn);
                              });
}

}  // namespace typeslab
