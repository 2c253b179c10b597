#include "typeslab/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "typeslab/log_sum.hpp"
#include "typeslab/rng.hpp"
#include "typeslab/types_core.hpp"

namespace typeslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Regions

bool Ball::contains(const std::vector<long>& counts, long n) const {
    if (static_cast<int>(counts.size()) != center.size())
        throw std::invalid_argument("ball: dimension mismatch");
    if (is_exact()) {
        Rational s = 0;
        const Rational& eps = *epsilon_exact;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            Rational d = make_ratio(counts[i], n) - center.exact_value(static_cast<int>(i));
            s += d < 0 ? Rational(-d) : d;
            if (s > eps) return false;
        }
        return s <= eps;
    }
    double s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        s += std::fabs(static_cast<double>(counts[i]) / static_cast<double>(n) -
                       center.value(static_cast<int>(i)));
    return s <= epsilon + 1e-12;
}

Region Region::of_types(std::vector<TypeVec> types) {
    Region r;
    r.kind_ = Kind::Types;
    r.types_ = std::move(types);
    return r;
}

Region Region::of_ball(Ball ball) {
    Region r;
    r.kind_ = Kind::BallKind;
    r.ball_ = std::move(ball);
    return r;
}

Region Region::of_set(FeasibleSet set) {
    Region r;
    r.kind_ = Kind::Set;
    r.set_ = std::move(set);
    return r;
}

bool Region::contains(const std::vector<long>& counts, long n) const {
    switch (kind_) {
        case Kind::Types:
            for (const TypeVec& t : types_)
                if (t.n == n && t.counts == counts) return true;
            return false;
        case Kind::BallKind:
            return ball_->contains(counts, n);
        case Kind::Set:
            return set_->contains_type(counts, n);
    }
    return false;
}

std::string Region::describe() const {
    switch (kind_) {
        case Kind::Types:
            return "list of " + std::to_string(types_.size()) + " types";
        case Kind::BallKind:
            return "ball around " + ball_->center.to_string();
        case Kind::Set:
            return "set " + set_->name();
    }
    return "";
}

// ---------------------------------------------------------------------------
// Weight streams. Every conditional quantity below is a ratio of sums of
// per-type weights over Pi_n; the two arithmetic paths share the loop shape.

namespace {

ConditionalValue make_exact_value(const BigInt& hit, const BigInt& total) {
    ConditionalValue v;
    if (total == 0) return v;
    v.defined = true;
    Rational r(hit, total);
    r.canonicalize();
    v.exact = r;
    v.value = to_double(r);
    v.log_value = r > 0 ? log_rational(r) : -kInf;
    return v;
}

ConditionalValue make_exact_value(const Rational& hit, const Rational& total) {
    ConditionalValue v;
    if (total == 0) return v;
    v.defined = true;
    Rational r = hit / total;
    v.exact = r;
    v.value = to_double(r);
    v.log_value = r > 0 ? log_rational(r) : -kInf;
    return v;
}

ConditionalValue make_log_value(const LogSumAccumulator& hit, const LogSumAccumulator& total) {
    ConditionalValue v;
    if (total.empty()) return v;
    v.defined = true;
    v.log_value = hit.empty() ? -kInf : hit.log_total() - total.log_total();
    v.value = std::exp(v.log_value);
    return v;
}

void require_mode_inputs(const Pmf& q, const FeasibleSet& set, ArithmeticMode mode,
                         const char* what) {
    if (q.size() != set.m())
        throw std::invalid_argument(std::string(what) + ": source/set dimension mismatch");
    if (mode == ArithmeticMode::Exact && !q.is_exact())
        throw std::invalid_argument(std::string(what) +
                                    ": exact mode needs an exact rational source");
}

// Jeffreys double weight, log domain: log pi(nu;q) + log pi(nq;nu).
double log_jeffreys_weight(const TypeVec& t, const Pmf& q, const std::vector<long>& g,
                           double log_gamma_g) {
    double lp = log_type_probability(t, q);
    if (lp == -kInf) return -kInf;
    double lq = log_gamma_g;
    const double n = static_cast<double>(t.n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == 0) continue;
        if (t.counts[i] == 0) return -kInf;
        lq += static_cast<double>(g[i]) *
              std::log(static_cast<double>(t.counts[i]) / n);
    }
    return lp + lq;
}

}  // namespace

ConditionalValue conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                  const Region& region, ArithmeticMode mode) {
    require_mode_inputs(q, set, mode, "conditional_mass");
    if (n < 1) throw std::invalid_argument("conditional_mass: n must be positive");

    if (mode == ArithmeticMode::Exact) {
        ScaledSource src(q);
        BigInt total = 0, hit = 0;
        for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
            BigInt w = type_weight_numerator(TypeVec(c), src);
            if (w == 0) return;
            if (region.contains(c, n)) hit += w;
            total += w;
        });
        return make_exact_value(hit, total);
    }

    LogSumAccumulator total, hit;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        double lp = log_type_probability(TypeVec(c), q);
        if (lp == -kInf) return;
        total.add(lp);
        if (region.contains(c, n)) hit.add(lp);
    });
    return make_log_value(hit, total);
}

ConditionalValue jeffreys_conditional_mass(const Pmf& q, const FeasibleSet& set, long n,
                                           const Region& region, ArithmeticMode mode) {
    if (q.size() != set.m())
        throw std::invalid_argument("jeffreys mass: source/set dimension mismatch");
    if (!q.is_exact())
        throw std::invalid_argument("jeffreys mass: needs an exact rational source");
    if (n < 1) throw std::invalid_argument("jeffreys mass: n must be positive");
    const std::vector<long> g = scaled_source_counts(q, n);

    if (mode == ArithmeticMode::Exact) {
        ScaledSource src(q);
        BigInt total = 0, hit = 0;
        for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
            BigInt w = type_weight_numerator(TypeVec(c), src);
            if (w == 0) return;
            w *= counts_power(c, g);
            if (w == 0) return;
            if (region.contains(c, n)) hit += w;
            total += w;
        });
        return make_exact_value(hit, total);
    }

    const double log_gamma_g = log_bigint(multiplicity(TypeVec(g)));
    LogSumAccumulator total, hit;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        double lw = log_jeffreys_weight(TypeVec(c), q, g, log_gamma_g);
        if (lw == -kInf) return;
        total.add(lw);
        if (region.contains(c, n)) hit.add(lw);
    });
    return make_log_value(hit, total);
}

// ---------------------------------------------------------------------------
// Ball reports

namespace {

BallReport ball_report_impl(const Pmf& q, const FeasibleSet& set, long n,
                            const std::vector<Pmf>& centers,
                            std::optional<Rational> epsilon, ArithmeticMode mode,
                            bool jeffreys) {
    const char* what = jeffreys ? "jeffreys ball report" : "ball report";
    require_mode_inputs(q, set, mode, what);
    if (jeffreys && !q.is_exact())
        throw std::invalid_argument(std::string(what) + ": needs an exact rational source");
    if (centers.empty()) throw std::invalid_argument(std::string(what) + ": no centers");
    for (const Pmf& c : centers)
        if (c.size() != set.m())
            throw std::invalid_argument(std::string(what) + ": center dimension mismatch");
    if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be positive");

    BallReport report;
    report.n = n;
    const std::size_t k = centers.size();

    bool exact_centers = true;
    for (const Pmf& c : centers) exact_centers = exact_centers && c.is_exact();

    // Default radius: min(1/10, half the minimum pairwise TV distance).
    if (!epsilon) {
        if (exact_centers) {
            Rational eps(1, 10);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j) {
                    Rational d = total_variation_exact(centers[i], centers[j]) / 2;
                    if (d < eps) eps = d;
                }
            if (eps <= 0)
                throw std::runtime_error("overlapping balls: coincident centers");
            epsilon = eps;
        } else {
            double eps = 0.1;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    eps = std::min(eps, total_variation(centers[i], centers[j]) / 2);
            if (!(eps > 0))
                throw std::runtime_error("overlapping balls: coincident centers");
            epsilon = best_rational(eps, 1e-15, 1000000000UL);
        }
    }
    report.epsilon = to_double(*epsilon);
    if (exact_centers) report.epsilon_exact = *epsilon;

    std::vector<Ball> balls;
    balls.reserve(k);
    for (const Pmf& c : centers) {
        if (c.is_exact())
            balls.emplace_back(c, *epsilon);
        else
            balls.emplace_back(c, to_double(*epsilon));
    }

    // Disjointness pre-check; failure is not fatal because the per-type
    // policing below decides overlap authoritatively.
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            bool separated;
            if (exact_centers)
                separated = total_variation_exact(centers[i], centers[j]) >
                            Rational(2) * *epsilon;
            else
                separated = total_variation(centers[i], centers[j]) >
                            2.0 * to_double(*epsilon) + 1e-12;
            if (!separated) {
                report.warnings.push_back(
                    "balls " + std::to_string(i) + " and " + std::to_string(j) +
                    " touch or may overlap; relying on the per-type check");
            }
        }

    auto police = [&](const std::vector<long>& c, std::vector<char>* memb) {
        int inside = -1;
        for (std::size_t b = 0; b < k; ++b) {
            (*memb)[b] = balls[b].contains(c, n) ? 1 : 0;
            if (!(*memb)[b]) continue;
            if (inside >= 0)
                throw std::runtime_error("overlapping balls: type " + TypeVec(c).to_string() +
                                         " lies in balls " + std::to_string(inside) +
                                         " and " + std::to_string(b));
            inside = static_cast<int>(b);
        }
    };

    std::vector<long> g;
    if (jeffreys) g = scaled_source_counts(q, n);

    if (mode == ArithmeticMode::Exact) {
        ScaledSource src(q);
        BigInt total = 0;
        std::vector<BigInt> hits(k, BigInt(0));
        std::vector<char> memb(k, 0);
        for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
            BigInt w = type_weight_numerator(TypeVec(c), src);
            if (jeffreys && w != 0) w *= counts_power(c, g);
            if (w == 0) return;
            police(c, &memb);
            total += w;
            for (std::size_t b = 0; b < k; ++b)
                if (memb[b]) hits[b] += w;
        });
        if (total == 0) return report;
        report.defined = true;
        Rational covered = 0;
        for (std::size_t b = 0; b < k; ++b) {
            report.masses.push_back(make_exact_value(hits[b], total));
            covered += *report.masses.back().exact;
        }
        Rational comp = 1 - covered;
        ConditionalValue cv;
        cv.defined = true;
        cv.exact = comp;
        cv.value = to_double(comp);
        cv.log_value = comp > 0 ? log_rational(comp) : -kInf;
        report.complement = cv;
        return report;
    }

    const double log_gamma_g =
        jeffreys ? log_bigint(multiplicity(TypeVec(g))) : 0.0;
    LogSumAccumulator total;
    std::vector<LogSumAccumulator> hits(k);
    std::vector<char> memb(k, 0);
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        TypeVec t(c);
        double lw = jeffreys ? log_jeffreys_weight(t, q, g, log_gamma_g)
                             : log_type_probability(t, q);
        if (lw == -kInf) return;
        police(c, &memb);
        total.add(lw);
        for (std::size_t b = 0; b < k; ++b)
            if (memb[b]) hits[b].add(lw);
    });
    if (total.empty()) return report;
    report.defined = true;
    double covered = 0;
    for (std::size_t b = 0; b < k; ++b) {
        report.masses.push_back(make_log_value(hits[b], total));
        covered += report.masses.back().value;
    }
    ConditionalValue cv;
    cv.defined = true;
    cv.value = std::max(0.0, 1.0 - covered);
    cv.log_value = cv.value > 0 ? std::log(cv.value) : -kInf;
    report.complement = cv;
    return report;
}

}  // namespace

BallReport ball_concentrations(const Pmf& q, const FeasibleSet& set, long n,
                               const std::vector<Pmf>& centers,
                               std::optional<Rational> epsilon, ArithmeticMode mode) {
    return ball_report_impl(q, set, n, centers, std::move(epsilon), mode, false);
}

BallReport jeffreys_ball_concentrations(const Pmf& q, const FeasibleSet& set, long n,
                                        const std::vector<Pmf>& centers,
                                        std::optional<Rational> epsilon,
                                        ArithmeticMode mode) {
    return ball_report_impl(q, set, n, centers, std::move(epsilon), mode, true);
}

// ---------------------------------------------------------------------------
// Prefix laws

Rational prefix_given_type(const std::vector<int>& prefix, const TypeVec& type) {
    if (static_cast<long>(prefix.size()) > type.n)
        throw std::invalid_argument("prefix longer than the word");
    std::vector<long> rem = type.counts;
    long denom = type.n;
    Rational p = 1;
    for (int x : prefix) {
        if (x < 0 || x >= type.m())
            throw std::out_of_range("prefix letter outside the alphabet");
        if (rem[static_cast<std::size_t>(x)] == 0) return Rational(0);
        p *= make_ratio(rem[static_cast<std::size_t>(x)], denom);
        rem[static_cast<std::size_t>(x)] -= 1;
        denom -= 1;
    }
    return p;
}

ConditionalValue prefix_law_exact(const Pmf& q, const FeasibleSet& set, long n,
                                  const std::vector<int>& prefix, ArithmeticMode mode) {
    require_mode_inputs(q, set, mode, "prefix law");
    if (n < 1) throw std::invalid_argument("prefix law: n must be positive");
    if (static_cast<long>(prefix.size()) > n)
        throw std::invalid_argument("prefix law: prefix longer than the word");

    if (mode == ArithmeticMode::Exact) {
        ScaledSource src(q);
        BigInt total = 0;
        Rational num = 0;
        for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
            TypeVec t(c);
            BigInt w = type_weight_numerator(t, src);
            if (w == 0) return;
            total += w;
            Rational pg = prefix_given_type(prefix, t);
            if (pg != 0) num += Rational(w) * pg;
        });
        return make_exact_value(num, Rational(total));
    }

    LogSumAccumulator total, num;
    for_each_feasible_type(set, n, [&](const std::vector<long>& c) {
        TypeVec t(c);
        double lp = log_type_probability(t, q);
        if (lp == -kInf) return;
        total.add(lp);
        Rational pg = prefix_given_type(prefix, t);
        if (pg > 0) num.add(lp + log_rational(pg));
    });
    return make_log_value(num, total);
}

double mixture_prediction(const ProjectionSet& centers, const std::vector<int>& prefix) {
    if (centers.k() < 1)
        throw std::invalid_argument("mixture: needs at least one projection point");
    double mix = 0;
    for (const ProjectionPoint& pt : centers.points) {
        double prod = 1;
        for (int x : prefix) {
            if (x < 0 || x >= static_cast<int>(pt.point.size()))
                throw std::out_of_range("mixture: prefix letter outside the alphabet");
            prod *= pt.point[static_cast<std::size_t>(x)];
        }
        mix += prod;
    }
    return mix / static_cast<double>(centers.k());
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

struct McTally {
    long long accepted = 0;
    long long hits = 0;
};

// hit(counts, first_letters) decides whether an accepted sample scores.
template <typename HitFn>
McTally mc_range(const Pmf& q, const FeasibleSet& set, long n, const CounterRng& rng,
                 long long s0, long long s1, int prefix_len, HitFn&& hit) {
    const int m = q.size();
    std::vector<double> cdf(static_cast<std::size_t>(m));
    double acc = 0;
    for (int i = 0; i < m; ++i) {
        acc += q.value(i);
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    McTally tally;
    std::vector<long> counts(static_cast<std::size_t>(m));
    std::vector<int> head(static_cast<std::size_t>(std::max(prefix_len, 0)));
    for (long long s = s0; s < s1; ++s) {
        std::fill(counts.begin(), counts.end(), 0L);
        const std::uint64_t base = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(n);
        for (long l = 0; l < n; ++l) {
            double u = rng.uniform(base + static_cast<std::uint64_t>(l));
            int letter = m - 1;
            for (int i = 0; i < m - 1; ++i)
                if (u < cdf[static_cast<std::size_t>(i)]) {
                    letter = i;
                    break;
                }
            counts[static_cast<std::size_t>(letter)] += 1;
            if (l < prefix_len) head[static_cast<std::size_t>(l)] = letter;
        }
        if (!set.contains_type(counts, n)) continue;
        tally.accepted += 1;
        if (hit(counts, head)) tally.hits += 1;
    }
    return tally;
}

template <typename HitFn>
McEstimate mc_run(const Pmf& q, const FeasibleSet& set, long n, long long samples,
                  std::uint64_t seed, int workers, int prefix_len, HitFn&& hit) {
    if (q.size() != set.m())
        throw std::invalid_argument("mc: source/set dimension mismatch");
    if (n < 1 || samples < 1) throw std::invalid_argument("mc: need n >= 1 and samples >= 1");

    CounterRng rng(seed);
    McEstimate out;
    out.samples = samples;

    workers = std::clamp(workers, 1, 64);
    McTally tally;
    if (workers == 1) {
        tally = mc_range(q, set, n, rng, 0, samples, prefix_len, hit);
    } else {
        std::vector<McTally> parts(static_cast<std::size_t>(workers));
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            long long s0 = samples * w / workers;
            long long s1 = samples * (w + 1) / workers;
            threads.emplace_back([&, w, s0, s1] {
                parts[static_cast<std::size_t>(w)] =
                    mc_range(q, set, n, rng, s0, s1, prefix_len, hit);
            });
        }
        for (std::thread& t : threads) t.join();
        for (const McTally& p : parts) {
            tally.accepted += p.accepted;
            tally.hits += p.hits;
        }
    }

    out.accepted = tally.accepted;
    out.acceptance_rate = static_cast<double>(tally.accepted) / static_cast<double>(samples);
    if (tally.accepted == 0) return out;  // no estimate: conditioning event unseen
    out.defined = true;
    double p = static_cast<double>(tally.hits) / static_cast<double>(tally.accepted);
    out.estimate = p;
    out.std_error = std::sqrt(std::max(0.0, p * (1.0 - p)) /
                              static_cast<double>(tally.accepted));
    return out;
}

}  // namespace

McEstimate mc_conditional(const Pmf& q, const FeasibleSet& set, long n,
                          const Region& region, long long samples, std::uint64_t seed,
                          int workers) {
    return mc_run(q, set, n, samples, seed, workers, 0,
                  [&](const std::vector<long>& counts, const std::vector<int>&) {
                      return region.contains(counts, n);
                  });
}

McEstimate mc_prefix(const Pmf& q, const FeasibleSet& set, long n,
                     const std::vector<int>& prefix, long long samples,
                     std::uint64_t seed, int workers) {
    for (int x : prefix)
        if (x < 0 || x >= q.size())
            throw std::out_of_range("mc: prefix letter outside the alphabet");
    if (static_cast<long>(prefix.size()) > n)
        throw std::invalid_argument("mc: prefix longer than the word");
    return mc_run(q, set, n, samples, seed, workers, static_cast<int>(prefix.size()),
                  [&](const std::vector<long>&, const std::vector<int>& head) {
                      for (std::size_t i = 0; i < prefix.size(); ++i)
                          if (head[i] != prefix[i]) return false;
                      return true;
                  });
}

// ---------------------------------------------------------------------------
// The multiplicity-free bound

std::pair<Rational, Rational> lemma_bound(const TypeVec& t1, const TypeVec& t2,
                                          const Pmf& q) {
    if (t1.m() != t2.m() || t1.m() != q.size())
        throw std::invalid_argument("lemma bound: dimension mismatch");
    if (t1.n != t2.n || t1.n < 1)
        throw std::invalid_argument("lemma bound: types must share a positive length");
    if (!q.is_exact() || !q.strictly_positive())
        throw std::invalid_argument("lemma bound: needs a strictly positive exact source");

    const long n = t1.n;
    const int m = t1.m();

    Rational ratio = type_probability(t1, q) / type_probability(t2, q);

    Rational bound = rational_pow(make_ratio(n, m), static_cast<unsigned long>(m));
    for (int i = 0; i < m; ++i) {
        long c = t1.count(i);
        if (c == 0) continue;
        bound *= rational_pow(q.exact_value(i) * make_ratio(n, c),
                              static_cast<unsigned long>(c));
    }
    for (int i = 0; i < m; ++i) {
        long c = t2.count(i);
        if (c == 0) continue;
        bound /= rational_pow(q.exact_value(i) * make_ratio(n, c),
                              static_cast<unsigned long>(c));
    }
    return {ratio, bound};
}

long lemma_valid_floor(int m) {
    // Frozen from an exhaustive exact scan over all type pairs per length
    // (the scan is reproduced in the test suite). Below these lengths the
    // bound genuinely fails for concentrated-vs-balanced pairs.
    switch (m) {
        case 2: return 4;
        case 3: return 7;
        case 4: return 10;
        case 5: return 14;
        default:
            throw std::out_of_range("lemma floor: table covers alphabet sizes 2..5");
    }
}

}  // namespace typeslab
