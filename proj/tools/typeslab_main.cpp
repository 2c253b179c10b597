// Scenario-driven front end: projections, concentration sweeps, prefix-law
// sweeps, Jeffreys-weighted runs and self-verification, emitted as CSV or
// JSON rows.
//
// Exit codes:
//   0  success (verify always exits 0 once the scenario loads; failed checks
//      are rows, not crashes)
//   2  usage error (bad flags, scenario missing a needed block)
//   3  scenario parse error
//   4  configuration error (e.g. gamma/Jeffreys weighting with a float source,
//      overlapping balls)
//   5  feasibility error (empty set, empty type set where points are required)
//   6  solver failure
//   7  i/o error
//   1  internal error

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "typeslab/conditioning.hpp"
#include "typeslab/projections.hpp"
#include "typeslab/report.hpp"
#include "typeslab/rng.hpp"
#include "typeslab/scenario.hpp"
#include "typeslab/sequence_oracle.hpp"

namespace {

using namespace typeslab;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int env_workers() {
    const char* v = std::getenv("TYPESLAB_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    long w = std::strtol(v, &end, 10);
    if (end == v || *end != '\0')
        throw UsageError("TYPESLAB_THREADS must be an integer");
    return static_cast<int>(std::clamp(w, 1L, 64L));
}

// Effective configuration after merging scenario defaults with flags.
struct Run {
    Scenario scn;
    ArithmeticMode mode = ArithmeticMode::Exact;
    OutputFormat format = OutputFormat::Csv;
    std::optional<Rational> epsilon;
    long long samples = 1000000;
    std::uint64_t seed = 0;
    bool timing = false;
    int workers = 1;

    std::vector<RunRecord> rows;
    std::vector<ProjectionSet> sets;
};

RunRecord base_row(const Run& run, const char* command, long n, std::string kind,
                   int j, std::string quantity) {
    RunRecord r;
    r.scenario = run.scn.name;
    r.command = command;
    r.n = n;
    r.kind = std::move(kind);
    r.index_j = j;
    r.quantity = std::move(quantity);
    r.mode = mode_name(run.mode);
    return r;
}

void stamp(std::vector<RunRecord>& rows, std::size_t from, bool timing, double t0) {
    if (!timing) return;
    double dt = now_seconds() - t0;
    for (std::size_t i = from; i < rows.size(); ++i) rows[i].seconds = dt;
}

std::vector<int> prefix_indices(const Scenario& scn) {
    std::vector<int> idx;
    idx.reserve(scn.sweep.prefix.size());
    for (const std::string& label : scn.sweep.prefix) {
        auto i = scn.alphabet.index_of(label);
        if (!i) throw UsageError("prefix letter '" + label + "' not in the alphabet");
        idx.push_back(*i);
    }
    return idx;
}

Pmf pmf_from_point(const std::vector<double>& point) {
    double s = 0;
    for (double v : point) s += v;
    std::vector<double> norm = point;
    for (double& v : norm) v /= s;
    return Pmf::from_doubles(norm);
}

// Projection points as ball centers. Solver output is float; snap to nearby
// small rationals when possible so ball membership stays exact.
std::vector<Pmf> centers_from(const ProjectionSet& ps) {
    std::vector<Pmf> out;
    out.reserve(ps.points.size());
    for (const ProjectionPoint& pt : ps.points) {
        if (pt.type) {
            out.push_back(pt.type->frequencies());
            continue;
        }
        Pmf approx = pmf_from_point(pt.point);
        Pmf exact = approx;
        if (approx.rationalize(1e-6, &exact))
            out.push_back(exact);
        else
            out.push_back(approx);
    }
    return out;
}

void warm_geometry(const FeasibleSet& set) {
    // The lazy piece geometry cache is not built concurrently; touch it once
    // before fanning a sweep out across threads.
    for (int i = 0; i < set.piece_count(); ++i) {
        set.piece(i).vertices();
        set.piece(i).dimension();
    }
}

// Runs body(i) over the sweep indices, possibly in parallel, then replays
// results in ascending order. On error every completed earlier unit is kept
// so partial sweeps still flush.
struct SweepUnit {
    std::vector<RunRecord> rows;
    std::vector<ProjectionSet> sets;
    std::vector<std::string> notes;
    std::exception_ptr error;
};

void run_sweep(Run& run, std::size_t count,
               const std::function<void(std::size_t, SweepUnit&)>& body) {
    std::vector<SweepUnit> units(count);
    int workers = std::min<std::size_t>(run.workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i, units[i]);
            } catch (...) {
                units[i].error = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        body(i, units[i]);
                    } catch (...) {
                        units[i].error = std::current_exception();
                    }
                }
            });
        for (std::thread& t : pool) t.join();
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (units[i].error) std::rethrow_exception(units[i].error);
        for (RunRecord& r : units[i].rows) run.rows.push_back(std::move(r));
        for (ProjectionSet& s : units[i].sets) run.sets.push_back(std::move(s));
        for (const std::string& w : units[i].notes) std::cerr << w << '\n';
    }
}

void emit(const Run& run) {
    if (run.format == OutputFormat::Csv)
        write_csv(std::cout, run.rows);
    else
        write_json(std::cout, run.rows, run.sets);
    if (!std::cout) throw IoError("failed writing output");
}

// Emits whatever rows accumulated, then rethrows. Keeps partial sweeps.
template <typename Fn>
int guarded(Run& run, Fn&& fn) {
    try {
        fn();
    } catch (...) {
        emit(run);
        throw;
    }
    emit(run);
    return 0;
}

void append_point_rows(Run& run, const char* command, const ProjectionSet& ps,
                       std::vector<RunRecord>& rows) {
    const std::string kind = kind_name(ps.kind);
    for (int j = 0; j < ps.k(); ++j) {
        const ProjectionPoint& pt = ps.points[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < pt.point.size(); ++i) {
            RunRecord r = base_row(run, command, ps.n, kind, j,
                                   "p[" + std::to_string(i + 1) + "]");
            r.value = pt.point[i];
            rows.push_back(std::move(r));
        }
        RunRecord obj = base_row(run, command, ps.n, kind, j, "objective");
        obj.value = pt.objective;
        rows.push_back(std::move(obj));
        if (ps.kind != ProjectionKind::I && ps.kind != ProjectionKind::J) {
            RunRecord lg = base_row(run, command, ps.n, kind, j, "log_objective");
            if (std::isfinite(pt.log_objective))
                lg.value = pt.log_objective;
            else
                lg.value_text = "-inf";
            rows.push_back(std::move(lg));
        }
        RunRecord pr = base_row(run, command, ps.n, kind, j, "proper");
        pr.value = pt.proper ? 1 : 0;
        rows.push_back(std::move(pr));
    }
    RunRecord k = base_row(run, command, ps.n, kind, 0, "k");
    k.value = ps.k();
    rows.push_back(std::move(k));
}

ProjectionSet finite_projections(ProjectionKind kind, const Pmf& q,
                                 const FeasibleSet& set, long n) {
    switch (kind) {
        case ProjectionKind::Mu: return mu_projections(q, set, n);
        case ProjectionKind::Gamma: return gamma_projections(q, set, n);
        case ProjectionKind::Or: return or_projections(q, set, n);
        default: throw std::logic_error("not a finite-n kind");
    }
}

// ---------------------------------------------------------------------------
// project

int run_project(Run& run, const std::string& kind_str) {
    if (kind_str == "I" || kind_str == "J") {
        return guarded(run, [&] {
            double t0 = now_seconds();
            ProjectionSet ps = kind_str == "I" ? i_projections(run.scn.source, run.scn.set)
                                               : j_projections(run.scn.source, run.scn.set);
            for (const std::string& w : ps.warnings) std::cerr << w << '\n';
            std::size_t from = run.rows.size();
            append_point_rows(run, "project", ps, run.rows);
            stamp(run.rows, from, run.timing, t0);
            run.sets.push_back(std::move(ps));
        });
    }

    ProjectionKind kind;
    if (kind_str == "mu")
        kind = ProjectionKind::Mu;
    else if (kind_str == "gamma")
        kind = ProjectionKind::Gamma;
    else
        kind = ProjectionKind::Or;
    if (run.scn.sweep.n_values.empty())
        throw UsageError("scenario has no sweep n values; kind " + kind_str +
                         " is a finite-n notion");
    // Surface a bad source/length combination before any sweep work.
    if (kind != ProjectionKind::Mu) jeffreys_base(run.scn.source);

    warm_geometry(run.scn.set);
    return guarded(run, [&] {
        run_sweep(run, run.scn.sweep.n_values.size(), [&](std::size_t i, SweepUnit& unit) {
            double t0 = now_seconds();
            long n = run.scn.sweep.n_values[i];
            ProjectionSet ps = finite_projections(kind, run.scn.source, run.scn.set, n);
            for (const std::string& w : ps.warnings)
                unit.notes.push_back("n=" + std::to_string(n) + ": " + w);
            if (ps.points.empty())
                throw FeasibilityError("no feasible type of length " + std::to_string(n));
            append_point_rows(run, "project", ps, unit.rows);
            stamp(unit.rows, 0, run.timing, t0);
            unit.sets.push_back(std::move(ps));
        });
    });
}

// ---------------------------------------------------------------------------
// concentrate / jeffreys

int run_concentrate(Run& run, const std::string& centers_str, bool jeffreys,
                    const char* command) {
    if (run.scn.sweep.n_values.empty())
        throw UsageError("scenario has no sweep n values; nothing to concentrate over");
    if (jeffreys) jeffreys_base(run.scn.source);  // reject float sources up front

    ProjectionKind center_kind;
    if (centers_str == "I")
        center_kind = ProjectionKind::I;
    else if (centers_str == "J")
        center_kind = ProjectionKind::J;
    else
        center_kind = ProjectionKind::Mu;

    warm_geometry(run.scn.set);
    std::vector<Pmf> fixed_centers;
    if (center_kind != ProjectionKind::Mu) {
        ProjectionSet ps = center_kind == ProjectionKind::I
                               ? i_projections(run.scn.source, run.scn.set)
                               : j_projections(run.scn.source, run.scn.set);
        for (const std::string& w : ps.warnings) std::cerr << w << '\n';
        fixed_centers = centers_from(ps);
        run.sets.push_back(std::move(ps));
    }

    return guarded(run, [&] {
        run_sweep(run, run.scn.sweep.n_values.size(), [&](std::size_t i, SweepUnit& unit) {
            double t0 = now_seconds();
            long n = run.scn.sweep.n_values[i];
            const std::string kind = centers_str;

            std::vector<Pmf> centers = fixed_centers;
            if (center_kind == ProjectionKind::Mu) {
                ProjectionSet ps = mu_projections(run.scn.source, run.scn.set, n);
                centers = centers_from(ps);
                unit.sets.push_back(std::move(ps));
            }

            bool valid_n = true;
            if (jeffreys) {
                long base = jeffreys_base(run.scn.source);
                valid_n = n % base == 0;
                if (!valid_n)
                    unit.notes.push_back("n=" + std::to_string(n) +
                                         ": not a multiple of the source denominator, "
                                         "Jeffreys weighting undefined");
            }

            BallReport report;
            if (valid_n && !centers.empty()) {
                report = jeffreys
                             ? jeffreys_ball_concentrations(run.scn.source, run.scn.set, n,
                                                            centers, run.epsilon, run.mode)
                             : ball_concentrations(run.scn.source, run.scn.set, n, centers,
                                                   run.epsilon, run.mode);
                for (const std::string& w : report.warnings)
                    unit.notes.push_back("n=" + std::to_string(n) + ": " + w);
            }

            if (!valid_n || centers.empty() || !report.defined) {
                RunRecord r = base_row(run, command, n, kind, 0, "mass");
                r.value_text = "undefined";
                unit.rows.push_back(std::move(r));
                stamp(unit.rows, 0, run.timing, t0);
                return;
            }

            RunRecord eps = base_row(run, command, n, kind, 0, "epsilon");
            eps.value = report.epsilon;
            unit.rows.push_back(std::move(eps));
            for (std::size_t b = 0; b < report.masses.size(); ++b) {
                RunRecord r = base_row(run, command, n, kind, static_cast<int>(b), "mass");
                r.value = report.masses[b].value;
                unit.rows.push_back(std::move(r));
            }
            RunRecord comp = base_row(run, command, n, kind,
                                      static_cast<int>(report.masses.size()), "complement");
            comp.value = report.complement.value;
            unit.rows.push_back(std::move(comp));
            stamp(unit.rows, 0, run.timing, t0);
        });
    });
}

// ---------------------------------------------------------------------------
// gibbs

int run_gibbs(Run& run) {
    if (run.scn.sweep.n_values.empty())
        throw UsageError("scenario has no sweep n values");
    std::vector<int> prefix = prefix_indices(run.scn);
    if (prefix.empty())
        throw UsageError("scenario has no prefix; the gibbs command needs one");
    for (long n : run.scn.sweep.n_values)
        if (static_cast<long>(prefix.size()) > n)
            throw UsageError("prefix is longer than the smallest sweep n");

    warm_geometry(run.scn.set);
    ProjectionSet icenters = i_projections(run.scn.source, run.scn.set);
    for (const std::string& w : icenters.warnings) std::cerr << w << '\n';
    const double mix_i = mixture_prediction(icenters, prefix);
    run.sets.push_back(icenters);

    return guarded(run, [&] {
        run_sweep(run, run.scn.sweep.n_values.size(), [&](std::size_t i, SweepUnit& unit) {
            double t0 = now_seconds();
            long n = run.scn.sweep.n_values[i];
            ConditionalValue law =
                prefix_law_exact(run.scn.source, run.scn.set, n, prefix, run.mode);

            if (!law.defined) {
                RunRecord r = base_row(run, "gibbs", n, "", 0, "prefix_law");
                r.value_text = "undefined";
                unit.rows.push_back(std::move(r));
                stamp(unit.rows, 0, run.timing, t0);
                return;
            }

            RunRecord lr = base_row(run, "gibbs", n, "", 0, "prefix_law");
            lr.value = law.value;
            unit.rows.push_back(std::move(lr));

            RunRecord mi = base_row(run, "gibbs", n, "I", 0, "mixture");
            mi.value = mix_i;
            unit.rows.push_back(std::move(mi));
            RunRecord gi = base_row(run, "gibbs", n, "I", 0, "gap");
            gi.value = std::fabs(law.value - mix_i);
            unit.rows.push_back(std::move(gi));

            ProjectionSet mu = mu_projections(run.scn.source, run.scn.set, n);
            if (!mu.points.empty()) {
                double mix_mu = mixture_prediction(mu, prefix);
                RunRecord mm = base_row(run, "gibbs", n, "mu", 0, "mixture");
                mm.value = mix_mu;
                unit.rows.push_back(std::move(mm));
                RunRecord gm = base_row(run, "gibbs", n, "mu", 0, "gap");
                gm.value = std::fabs(law.value - mix_mu);
                unit.rows.push_back(std::move(gm));
                unit.sets.push_back(std::move(mu));
            }
            stamp(unit.rows, 0, run.timing, t0);
        });
    });
}

// ---------------------------------------------------------------------------
// verify

void push_check(Run& run, long n, const std::string& name, bool ok, double dev) {
    RunRecord p = base_row(run, "verify", n, "", 0, name);
    p.value_text = ok ? "pass" : "fail";
    run.rows.push_back(std::move(p));
    RunRecord d = base_row(run, "verify", n, "", 0, name + "_dev");
    d.value = dev;
    run.rows.push_back(std::move(d));
}

int run_verify(Run& run) {
    const Pmf& q = run.scn.source;
    const FeasibleSet& set = run.scn.set;
    const bool exact_q = q.is_exact();
    warm_geometry(set);

    std::vector<int> prefix = run.scn.sweep.prefix.empty()
                                  ? std::vector<int>{0}
                                  : prefix_indices(run.scn);

    // Conditioning region shared by the oracle and MC checks: a ball around
    // the first I-projection.
    ProjectionSet icenters = i_projections(q, set);
    std::vector<Pmf> cvec = centers_from(icenters);
    const Pmf& center = cvec.front();
    Rational eps = run.epsilon.value_or(Rational(1, 10));
    Region region = center.is_exact() ? Region::of_ball(Ball(center, eps))
                                      : Region::of_ball(Ball(center, to_double(eps)));

    std::vector<long> oracle_ns;
    for (long n : run.scn.sweep.n_values)
        if (n <= 12) oracle_ns.push_back(n);
    if (oracle_ns.empty()) oracle_ns = {4, 8, 12};
    const bool oracle_feasible = exact_q && run.scn.m() <= 3;

    double t0 = now_seconds();
    std::size_t from = run.rows.size();

    // 1. Sequence-space oracle: exact equality of rationals.
    for (long n : oracle_ns) {
        if (!oracle_feasible) {
            RunRecord r = base_row(run, "verify", n, "", 0, "oracle");
            r.value_text = "skipped";
            run.rows.push_back(std::move(r));
            break;
        }
        ConditionalValue mass = conditional_mass(q, set, n, region, ArithmeticMode::Exact);
        OracleMass omass = oracle_conditional_mass(q, set, n, region);
        bool ok = mass.defined == omass.defined &&
                  (!mass.defined || *mass.exact == omass.value);
        double dev = mass.defined && omass.defined
                         ? std::fabs(to_double(*mass.exact - omass.value))
                         : (ok ? 0 : std::numeric_limits<double>::infinity());
        push_check(run, n, "oracle_mass", ok, dev);

        if (static_cast<long>(prefix.size()) <= n) {
            ConditionalValue law =
                prefix_law_exact(q, set, n, prefix, ArithmeticMode::Exact);
            OracleMass olaw = oracle_prefix_law(q, set, n, prefix);
            bool lok = law.defined == olaw.defined &&
                       (!law.defined || *law.exact == olaw.value);
            double ldev = law.defined && olaw.defined
                              ? std::fabs(to_double(*law.exact - olaw.value))
                              : (lok ? 0 : std::numeric_limits<double>::infinity());
            push_check(run, n, "oracle_prefix", lok, ldev);
        }
    }
    stamp(run.rows, from, run.timing, t0);

    // 2. Exact vs log-domain agreement.
    if (exact_q) {
        t0 = now_seconds();
        from = run.rows.size();
        std::vector<long> mode_ns;
        for (long n : run.scn.sweep.n_values)
            if (n <= 60) mode_ns.push_back(n);
        if (mode_ns.empty()) mode_ns = {20, 40, 60};
        for (long n : mode_ns) {
            ConditionalValue a = conditional_mass(q, set, n, region, ArithmeticMode::Exact);
            ConditionalValue b = conditional_mass(q, set, n, region, ArithmeticMode::Log);
            bool ok;
            double dev = 0;
            if (a.defined != b.defined) {
                ok = false;
                dev = std::numeric_limits<double>::infinity();
            } else if (!a.defined) {
                ok = true;
            } else {
                dev = std::fabs(a.value - b.value) / std::max(a.value, 1e-300);
                ok = dev <= 1e-10;
            }
            push_check(run, n, "mode_agreement", ok, dev);
        }
        stamp(run.rows, from, run.timing, t0);
    }

    // 3. Bound fuzz: random source, random same-length type pairs, alphabet
    // sizes 2..5, lengths from the per-size validity floor up to 100.
    {
        t0 = now_seconds();
        from = run.rows.size();
        const long long cases = 10000;
        CounterRng rng(run.seed ^ 0x1c69b3f74ac4cb1eULL);
        std::uint64_t ctr = 0;
        long long violations = 0;
        for (long long c = 0; c < cases; ++c) {
            int m = 2 + static_cast<int>(rng.bits(ctr++) % 4);
            long floor = lemma_valid_floor(m);
            long n = floor + static_cast<long>(rng.bits(ctr++) %
                                               static_cast<std::uint64_t>(101 - floor));
            std::vector<Rational> weights(static_cast<std::size_t>(m));
            Rational total = 0;
            for (auto& w : weights) {
                w = Rational(1 + static_cast<long>(rng.bits(ctr++) % 20));
                total += w;
            }
            for (auto& w : weights) w /= total;
            Pmf src = Pmf::exact(weights);
            auto draw_type = [&] {
                std::vector<long> counts(static_cast<std::size_t>(m), 0);
                for (long l = 0; l < n; ++l)
                    counts[static_cast<std::size_t>(rng.bits(ctr++) %
                                                    static_cast<std::uint64_t>(m))] += 1;
                return TypeVec(counts);
            };
            auto [ratio, bound] = lemma_bound(draw_type(), draw_type(), src);
            if (!(ratio < bound)) violations += 1;
        }
        RunRecord total_row = base_row(run, "verify", 0, "", 0, "lemma_cases");
        total_row.value = static_cast<double>(cases);
        run.rows.push_back(std::move(total_row));
        RunRecord viol = base_row(run, "verify", 0, "", 0, "lemma_violations");
        viol.value = static_cast<double>(violations);
        run.rows.push_back(std::move(viol));
        push_check(run, 0, "lemma", violations == 0, static_cast<double>(violations));
        stamp(run.rows, from, run.timing, t0);
    }

    // 4. Monte Carlo against the exact engine, 4 sigma band.
    {
        t0 = now_seconds();
        from = run.rows.size();
        long n = oracle_ns.back();
        ArithmeticMode mode = exact_q ? ArithmeticMode::Exact : ArithmeticMode::Log;
        ConditionalValue mass = conditional_mass(q, set, n, region, mode);
        McEstimate est =
            mc_conditional(q, set, n, region, run.samples, run.seed, run.workers);

        RunRecord acc = base_row(run, "verify", n, "", 0, "mc_acceptance");
        acc.value = est.acceptance_rate;
        run.rows.push_back(std::move(acc));

        auto sigma_dev = [](bool exact_defined, double exact_value, const McEstimate& e) {
            if (!e.defined || !exact_defined) return exact_defined == e.defined ? 0.0 : 1e9;
            double diff = std::fabs(e.estimate - exact_value);
            if (e.std_error > 0) return diff / e.std_error;
            return diff == 0 ? 0.0 : 1e9;
        };
        double dev = sigma_dev(mass.defined, mass.value, est);
        push_check(run, n, "mc_mass", dev <= 4, dev);

        if (static_cast<long>(prefix.size()) <= n) {
            ConditionalValue law = prefix_law_exact(q, set, n, prefix, mode);
            McEstimate pest =
                mc_prefix(q, set, n, prefix, run.samples, run.seed, run.workers);
            double pdev = sigma_dev(law.defined, law.value, pest);
            push_check(run, n, "mc_prefix", pdev <= 4, pdev);
        }
        stamp(run.rows, from, run.timing, t0);
    }

    emit(run);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "typeslab: finite-sample conditioning experiments over finite alphabets.\n"
        "Exit codes: 0 ok, 2 usage, 3 scenario parse, 4 configuration,\n"
        "5 feasibility, 6 solver, 7 i/o, 1 internal."};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string kind_str = "I";
    std::string centers_str;
    std::string mode_str, out_str, epsilon_str;
    std::optional<std::uint64_t> seed_flag;
    std::optional<long long> samples_flag;
    bool timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario file")->required();
        cmd->add_option("--mode", mode_str, "arithmetic mode")
            ->check(CLI::IsMember({"exact", "log"}));
        cmd->add_option("--out", out_str, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--epsilon", epsilon_str, "ball radius (rational or decimal)");
        cmd->add_option("--seed", seed_flag, "RNG seed");
        cmd->add_option("--samples", samples_flag, "Monte Carlo sample count");
        cmd->add_flag("--timing", timing,
                      "fill the seconds column (off by default so reruns are "
                      "byte-identical)");
    };

    CLI::App* project = app.add_subcommand("project", "compute projections");
    add_common(project);
    project->add_option("--kind", kind_str, "projection kind")
        ->check(CLI::IsMember({"I", "J", "mu", "gamma", "or"}));

    CLI::App* concentrate =
        app.add_subcommand("concentrate", "ball-mass sweep around projections");
    add_common(concentrate);
    concentrate->add_option("--centers", centers_str, "ball centers")
        ->check(CLI::IsMember({"I", "J", "mu"}));
    bool jeffreys_flag = false;
    concentrate->add_flag("--jeffreys", jeffreys_flag, "double weighting");

    CLI::App* jeffreys =
        app.add_subcommand("jeffreys", "concentrate with the double weighting");
    add_common(jeffreys);
    jeffreys->add_option("--centers", centers_str, "ball centers")
        ->check(CLI::IsMember({"I", "J", "mu"}));

    CLI::App* gibbs = app.add_subcommand("gibbs", "prefix law vs mixture sweep");
    add_common(gibbs);

    CLI::App* verify = app.add_subcommand("verify", "self-checks against oracles");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        std::ifstream in(scenario_path);
        if (!in) throw IoError("cannot open scenario file: " + scenario_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) throw IoError("failed reading scenario file: " + scenario_path);

        Run run;
        run.scn = parse_scenario(buf.str());
        run.mode = run.scn.output.mode;
        run.format = run.scn.output.format;
        run.epsilon = run.scn.sweep.epsilon;
        if (run.scn.sweep.samples > 0) run.samples = run.scn.sweep.samples;
        run.seed = run.scn.sweep.seed;
        run.timing = timing;
        run.workers = env_workers();

        if (!mode_str.empty())
            run.mode = mode_str == "exact" ? ArithmeticMode::Exact : ArithmeticMode::Log;
        if (!out_str.empty())
            run.format = out_str == "csv" ? OutputFormat::Csv : OutputFormat::Json;
        if (!epsilon_str.empty()) {
            Rational eps = parse_number(epsilon_str);
            if (eps <= 0) throw UsageError("--epsilon must be positive");
            run.epsilon = eps;
        }
        if (seed_flag) run.seed = *seed_flag;
        if (samples_flag) {
            if (*samples_flag < 1) throw UsageError("--samples must be positive");
            run.samples = *samples_flag;
        }
        if (run.mode == ArithmeticMode::Exact && !run.scn.source.is_exact())
            throw std::invalid_argument(
                "exact mode needs a rational source; pass --mode log");

        if (project->parsed()) return run_project(run, kind_str);
        if (concentrate->parsed())
            return run_concentrate(run, centers_str.empty() ? "I" : centers_str,
                                   jeffreys_flag, "concentrate");
        if (jeffreys->parsed())
            return run_concentrate(run, centers_str.empty() ? "J" : centers_str, true,
                                   "jeffreys");
        if (gibbs->parsed()) return run_gibbs(run);
        return run_verify(run);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << scenario_path << ": " << e.what() << '\n';
        return 3;
    } catch (const FeasibilityError& e) {
        std::cerr << "feasibility error: " << e.what() << '\n';
        return 5;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 6;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 7;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 4;
    } catch (const std::out_of_range& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 4;
    } catch (const std::runtime_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
