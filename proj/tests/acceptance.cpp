// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wfix/bounds.hpp"
#include "wfix/experiments.hpp"
#include "wfix/format.hpp"
#include "wfix/mappings.hpp"
#include "wfix/schemes.hpp"

using namespace wfix;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<Scheme> kSchemes{Scheme::implicit_s, Scheme::implicit_ishikawa, Scheme::implicit_mann};

struct CorpusEntry {
    std::string space;
    std::string mapping;
    std::string x0;
};

const std::vector<CorpusEntry> kCorpus{
    {"euclidean:1", "halving", "1"},
    {"euclidean:3", "halving", "1;0.5;0.25"},
    {"euclidean:1", "affine:0.9+0.05", "-2"},
    {"euclidean:2", "affine:0.5,0.1;0,0.4+1,0", "0;0"},
    {"euclidean:2", "affine:0.3,-0.6;0.6,0.3+0.5,-0.5", "3;3"},
    {"euclidean:2", "constant:0.25", "1"},
    {"tripod", "tripod-radial:0.5", "A:1"},
    {"tripod", "tripod-radial:0.8", "C:2.5"},
    {"halfplane", "halfplane-contract:0.5", "1,2"},
    {"halfplane", "halfplane-contract:0.7", "-2,0.2"},
};

const std::vector<std::string> kDivergentSchedules{"harmonic", "constant:0.5,0.5", "constant:0.9,0.2",
                                                   "power:0.5,1", "power:1,0.5"};

Outcome criterion1() {
    const auto t0 = Clock::now();
    const auto table = reproduce_table(TableSetup::reference_defaults());
    const auto mismatches = verify_against_reference(table);
    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = mismatches.empty() && elapsed < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu/42 cells match at 15 decimals, %.3f s (limit 1 s)", 42 - mismatches.size(),
                  elapsed);
    o.detail = buf;
    return o;
}

Outcome criterion2() {
    const auto d = TableSetup::reference_defaults();
    real worst = 0;
    for (Scheme s : kSchemes) {
        RationalOracle oracle(s);
        const auto trace = run(*d.space, d.mapping, s, d.schedule, d.x0, 50, d.inner);
        for (const auto& rec : trace.records) {
            worst = std::max(worst, std::abs(std::get<Vector>(rec.x)(0) - oracle.value(rec.n)));
        }
    }
    return {worst <= real{5e-14}, "max |float - exact| over n <= 50, 3 schemes = " + format_sci(worst, 3) +
                                      " (limit 5e-14)"};
}

Outcome criterion3() {
    real worst_step = std::numeric_limits<real>::infinity();
    real worst_product = std::numeric_limits<real>::infinity();
    real worst_final = 0;
    std::size_t triples = 0;
    for (const auto& c : kCorpus) {
        auto space = make_space(c.space);
        const auto t = make_mapping(c.mapping, space);
        const Point x0 = space->parse(c.x0);
        for (const auto& sname : kDivergentSchedules) {
            const Schedule s = make_schedule(sname);
            if (s.divergence != Divergence::proven) return {false, sname + " is not a divergent schedule"};
            const auto trace = run(*space, t, Scheme::implicit_s, s, x0, 500, {}, t.fixed_point);
            const auto d = trace.distances();
            real product = d[0];
            for (std::size_t k = 1; k < d.size(); ++k) {
                const std::size_t n = k + 1;
                const real f = step_factor(EnvelopeKind::implicit_s, s.alpha(n), s.beta(n), t.delta);
                worst_step = std::min(worst_step, f * d[k - 1] - d[k]);
                product *= 1 - (1 - s.alpha(n)) * (1 - t.delta);
                worst_product = std::min(worst_product, product - d[k]);
            }
            worst_final = std::max(worst_final, d.back());
            ++triples;
        }
    }
    Outcome o;
    o.pass = worst_step >= real{-1e-10} && worst_product >= real{-1e-10} && worst_final < real{1e-8};
    o.detail = std::to_string(triples) + " triples; min per-step slack " + format_sci(worst_step, 3) +
               ", min product slack " + format_sci(worst_product, 3) + " (limit -1e-10); max d(x_500,p) " +
               format_sci(worst_final, 3) + " (limit 1e-8)";
    return o;
}

Outcome criterion4() {
    std::size_t cells = 0;
    std::size_t ordering_failures = 0;
    std::size_t verdict_failures = 0;
    real worst_ratio = 0;
    for (real delta : {0.1L, 0.5L, 0.9L}) {
        for (const char* sname : {"harmonic", "constant:0.5,0.5", "power:0.5,0.5"}) {
            const auto b = bound_sequences(make_schedule(sname), delta, 1, 200);
            for (std::size_t k = 1; k < 200; ++k) {
                if (!(b.a[k] <= delta * b.c[k] && delta * b.c[k] <= b.c[k] && b.c[k] <= b.b[k])) ++ordering_failures;
            }
            for (const auto* rhs : {&b.b, &b.c}) {
                const auto v = berinde_compare(b.a, *rhs, 200, real{1e-6});
                if (v.verdict != Verdict::faster) ++verdict_failures;
                worst_ratio = std::max(worst_ratio, v.final_ratio);
            }
            ++cells;
        }
    }
    Outcome o;
    o.pass = ordering_failures == 0 && verdict_failures == 0;
    o.detail = std::to_string(cells) + " (delta, schedule) cells; ordering failures " +
               std::to_string(ordering_failures) + ", non-faster verdicts " + std::to_string(verdict_failures) +
               "; max ratio at n=200 " + format_sci(worst_ratio, 3) + " (limit 1e-6)";
    return o;
}

Outcome criterion5() {
    struct Base {
        std::string space, mapping, schedule, x0;
    };
    const std::vector<Base> bases{
        {"euclidean:1", "halving", "harmonic", "1"},
        {"euclidean:2", "affine:0.5,0.1;0,0.4+1,0", "constant:0.5,0.5", "0;0"},
        {"tripod", "tripod-radial:0.5", "constant:0.5,0.5", "B:1"},
        {"halfplane", "halfplane-contract:0.5", "constant:0.5,0.5", "1,2"},
    };
    std::size_t pairs = 0, held = 0;
    real min_margin = std::numeric_limits<real>::infinity();
    real max_recursion_excess = -std::numeric_limits<real>::infinity();
    bool recursion_ok = true;
    for (const auto& b : bases) {
        auto space = make_space(b.space);
        const auto t = make_mapping(b.mapping, space);
        const Point x0 = space->parse(b.x0);
        for (const char* eps : {"0.001", "0.005", "0.01", "0.05", "0.1"}) {
            const auto s = perturb(*space, t, eps);
            const auto r = run_datadep(*space, t, s, make_schedule(b.schedule), x0, x0, {});
            ++pairs;
            if (r.status == DataDepStatus::holds && r.margin > 0) ++held;
            min_margin = std::min(min_margin, r.margin);
            max_recursion_excess = std::max(max_recursion_excess, r.recursion.max_violation);
            recursion_ok = recursion_ok && r.recursion.hypothesis_holds();
        }
    }
    Outcome o;
    o.pass = held == pairs && recursion_ok;
    o.detail = std::to_string(held) + "/" + std::to_string(pairs) + " pairs with d(p,q) <= 2eps/(1-delta)^2; min margin " +
               format_sci(min_margin, 3) + "; recursive inequality " + (recursion_ok ? "holds" : "violated") +
               " at every step, max excess " + format_sci(max_recursion_excess, 3) + " (tol 1e-10)";
    return o;
}

Outcome criterion6() {
    std::string detail;
    bool pass = true;
    real worst = 0;
    for (const char* name : {"euclidean:1", "euclidean:2", "euclidean:3", "tripod", "halfplane"}) {
        auto space = make_space(name);
        const auto r = check_axioms(*space, space->default_sampler(), 10000, real{1e-9}, 2024);
        pass = pass && r.passed();
        for (const auto& row : r.rows) worst = std::max(worst, row.max_violation);
        if (!r.passed()) detail += std::string(name) + " failed; ";
    }
    BrokenDemoSpace broken;
    const auto b = check_axioms(broken, broken.default_sampler(), 10000, real{1e-9}, 2024);
    const bool flagged = !b.passed() && !b.row("ii").pass;
    pass = pass && flagged;
    detail += "5 spaces x 1e4 tuples, max violation " + format_sci(worst, 3) + " (limit 1e-9); broken-demo " +
              (flagged ? "flagged on axiom ii" : "NOT flagged");
    return {pass, detail};
}

Outcome criterion7() {
    real worst_residual = 0;
    std::size_t steps = 0;
    for (const auto& c : kCorpus) {
        auto space = make_space(c.space);
        const auto t = make_mapping(c.mapping, space);
        const Point x0 = space->parse(c.x0);
        for (const auto& sname : kDivergentSchedules) {
            for (Scheme s : kSchemes) {
                const auto trace = run(*space, t, s, make_schedule(sname), x0, 200, {});
                for (std::size_t k = 1; k < trace.records.size(); ++k) {
                    worst_residual = std::max(worst_residual, trace.records[k].residual);
                    ++steps;
                }
            }
        }
    }
    real worst_gap = 0;
    std::size_t affine_runs = 0;
    InnerSolverConfig exact;
    exact.mode = InnerMode::exact_affine;
    for (const auto& c : kCorpus) {
        auto space = make_space(c.space);
        const auto t = make_mapping(c.mapping, space);
        if (!t.affine) continue;
        const Point x0 = space->parse(c.x0);
        for (const auto& sname : kDivergentSchedules) {
            for (Scheme s : kSchemes) {
                const auto a = run(*space, t, s, make_schedule(sname), x0, 200, {});
                const auto e = run(*space, t, s, make_schedule(sname), x0, 200, exact);
                for (std::size_t k = 0; k < a.records.size(); ++k) {
                    worst_gap = std::max(worst_gap, space->distance(a.records[k].x, e.records[k].x));
                    if (k > 0) worst_residual = std::max(worst_residual, e.records[k].residual);
                }
                ++affine_runs;
            }
        }
    }
    Outcome o;
    o.pass = worst_residual <= real{1e-14} && worst_gap <= real{1e-12};
    o.detail = std::to_string(steps) + " Picard steps; max residual " + format_sci(worst_residual, 3) +
               " (limit 1e-14); Picard vs exact-affine on " + std::to_string(affine_runs) + " runs, max gap " +
               format_sci(worst_gap, 3) + " (limit 1e-12)";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"table reproduction", criterion1},   {"oracle equivalence", criterion2},
        {"convergence envelope", criterion3}, {"rate comparison", criterion4},
        {"data dependence", criterion5},      {"axiom suite", criterion6},
        {"inner solver", criterion7},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %zu %s  %s: %s [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
