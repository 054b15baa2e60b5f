#include "wfix/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "wfix/format.hpp"

namespace wfix {

// ---------------------------------------------------------------------------
// Exact oracle

RationalOracle::RationalOracle(Scheme scheme) : scheme_(scheme), values_{Rational(1)} {}

Rational RationalOracle::step_coefficient(Scheme scheme, std::size_t n) {
    if (n < 2) throw Error("oracle coefficients start at n = 2");
    using boost::multiprecision::cpp_int;
    const cpp_int m = n;
    switch (scheme) {
        case Scheme::implicit_mann:
            return Rational(2 * (m - 1), 2 * m - 1);
        case Scheme::implicit_ishikawa:
            return Rational(4 * m * (m - 1), 4 * m * m - 2 * m + 1);
        case Scheme::implicit_s:
            return Rational(2 * m * (m - 1), 4 * m * m - 2 * m + 1);
    }
    throw Error("unreachable scheme");
}

const Rational& RationalOracle::exact(std::size_t n) {
    if (n < 1) throw Error("oracle index starts at n = 1");
    while (values_.size() < n) {
        const std::size_t next = values_.size() + 1;
        values_.push_back(values_.back() * step_coefficient(scheme_, next));
    }
    return values_[n - 1];
}

real RationalOracle::value(std::size_t n) { return parse_real(round_half_even(exact(n), 40)); }

std::string round_half_even(const Rational& v, int digits) {
    using boost::multiprecision::cpp_int;
    if (digits < 0) throw Error("round_half_even: digits must be >= 0");
    const bool negative = v < 0;
    const Rational mag = negative ? Rational(-v) : v;
    cpp_int scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const Rational scaled = mag * scale;
    const cpp_int num = boost::multiprecision::numerator(scaled);
    const cpp_int den = boost::multiprecision::denominator(scaled);
    cpp_int q = num / den;
    const cpp_int rem2 = 2 * (num % den);
    if (rem2 > den || (rem2 == den && (q & 1) != 0)) ++q;

    std::string s = q.str();
    if (digits > 0) {
        if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        s.insert(s.size() - static_cast<std::size_t>(digits), 1, '.');
    }
    if (negative && q != 0) s.insert(0, 1, '-');
    return s;
}

// ---------------------------------------------------------------------------
// Table

const std::array<ReferenceCell, 14>& reference_cells() {
    static const std::array<ReferenceCell, 14> cells{{
        {2, "0.666666666666667", "0.615384615384615", "0.307692307692308"},
        {5, "0.406349206349206", "0.352704628530670", "0.022044039283167"},
        {7, "0.340992340992341", "0.292145335107371", "0.004564770861053"},
        {10, "0.283773192751521", "0.240691952056443", "0.000470101468860"},
        {13, "0.248169351176485", "0.209336831746067", "0.000051107624938"},
        {16, "0.223294138742407", "0.187699995568689", "0.000005728149279"},
        {20, "0.199408653447441", "0.167113839554526", "0.000000318744353"},
        {25, "0.178133771931084", "0.148920204678483", "0.000000008876336"},
        {30, "0.162477710197415", "0.135609685643003", "0.000000000252593"},
        {35, "0.150335628473559", "0.125328510781087", "0.000000000007295"},
        {40, "0.140563343828096", "0.117078595772533", "0.000000000000213"},
        {43, "0.135541774913220", "0.112847389889567", "0.000000000000026"},
        {46, "0.131022580805197", "0.109043978938918", "0.000000000000003"},
        {50, "0.125645129018549", "0.104523598655989", "0.000000000000000"},
    }};
    return cells;
}

TableSetup TableSetup::reference_defaults() {
    auto space = make_space("euclidean:1");
    return TableSetup{space, make_mapping("halving", space), Schedule::harmonic(), scalar_point(1), 50, {}, false};
}

namespace {

real table_cell(const Space& space, const TraceRecord& rec, const std::optional<Point>& p) {
    const auto* e = dynamic_cast<const EuclideanSpace*>(&space);
    if (e && e->dim() == 1) return std::get<Vector>(rec.x)(0);
    if (!p) throw ConfigError("table on " + space.name() + " needs a mapping with a known fixed point");
    return space.distance(rec.x, *p);
}

}  // namespace

ComparisonTable reproduce_table(const TableSetup& setup) {
    const Space& space = *setup.space;
    const auto& p = setup.mapping.fixed_point;
    const auto imi = run(space, setup.mapping, Scheme::implicit_mann, setup.schedule, setup.x0, setup.n_max, setup.inner, p);
    const auto iii =
        run(space, setup.mapping, Scheme::implicit_ishikawa, setup.schedule, setup.x0, setup.n_max, setup.inner, p);
    const auto isi = run(space, setup.mapping, Scheme::implicit_s, setup.schedule, setup.x0, setup.n_max, setup.inner, p);

    auto row_at = [&](std::size_t n) {
        return TableRow{n, table_cell(space, imi.records[n - 1], p), table_cell(space, iii.records[n - 1], p),
                        table_cell(space, isi.records[n - 1], p)};
    };
    ComparisonTable table;
    if (setup.all_rows) {
        for (std::size_t n = 1; n <= setup.n_max; ++n) table.rows.push_back(row_at(n));
    } else if (setup.n_max < 2) {
        table.rows.push_back(row_at(1));
    } else {
        for (std::size_t n : kReferenceRows) {
            if (n <= setup.n_max) table.rows.push_back(row_at(n));
        }
    }
    return table;
}

std::string table_text(const ComparisonTable& table, int digits) {
    const int width = std::max(digits + 4, 5);
    std::ostringstream out;
    out << std::setw(4) << "n" << "  " << std::left << std::setw(width) << "IMI" << "  " << std::setw(width) << "III"
        << "  " << "ISI" << std::right << '\n';
    for (const auto& r : table.rows) {
        out << std::setw(4) << r.n << "  " << std::left << std::setw(width) << format_fixed(r.imi, digits) << "  "
            << std::setw(width) << format_fixed(r.iii, digits) << "  " << format_fixed(r.isi, digits) << std::right
            << '\n';
    }
    return out.str();
}

std::string table_csv(const ComparisonTable& table, int digits) {
    std::ostringstream out;
    out << "n,imi,iii,isi\n";
    for (const auto& r : table.rows) {
        out << r.n << ',' << format_fixed(r.imi, digits) << ',' << format_fixed(r.iii, digits) << ','
            << format_fixed(r.isi, digits) << '\n';
    }
    return out.str();
}

std::vector<CellMismatch> verify_against_reference(const ComparisonTable& table) {
    std::vector<CellMismatch> bad;
    for (const auto& cell : reference_cells()) {
        auto it = std::find_if(table.rows.begin(), table.rows.end(), [&](const TableRow& r) { return r.n == cell.n; });
        if (it == table.rows.end()) {
            bad.push_back({cell.n, "imi", cell.imi, "missing"});
            bad.push_back({cell.n, "iii", cell.iii, "missing"});
            bad.push_back({cell.n, "isi", cell.isi, "missing"});
            continue;
        }
        const std::array<std::pair<const char*, std::pair<const char*, real>>, 3> cols{{
            {"imi", {cell.imi, it->imi}}, {"iii", {cell.iii, it->iii}}, {"isi", {cell.isi, it->isi}}}};
        for (const auto& [name, pair] : cols) {
            const std::string actual = format_fixed(pair.second, 15);
            if (actual != pair.first) bad.push_back({cell.n, name, pair.first, actual});
        }
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Data dependence

std::string_view datadep_status_id(DataDepStatus s) noexcept {
    switch (s) {
        case DataDepStatus::holds:
            return "holds";
        case DataDepStatus::violated:
            return "violated";
        case DataDepStatus::inconclusive:
            return "inconclusive";
    }
    return "?";
}

DataDepReport run_datadep(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                          const Schedule& schedule, const Point& x0, const Point& u0, const DataDepConfig& cfg) {
    if (cfg.n_max < 2) throw ConfigError("data dependence run needs n_max >= 2");
    if (cfg.tail_window < 1) throw ConfigError("tail window must be >= 1");
    space.validate(x0);
    space.validate(u0);

    DataDepReport r;
    r.epsilon = s.epsilon;
    r.delta = t.delta;
    r.sampled_epsilon = verify_approximate(space, t, s, 4096).max_distance;
    r.bound = datadep_bound(r.epsilon, r.delta);
    const real delta = t.delta;
    const real denom = (1 - delta) * (1 - delta);

    Point x = x0;
    Point u = u0;
    std::vector<real> a{space.distance(x, u)};
    std::vector<real> mu;
    std::vector<real> eta;
    std::size_t calm_steps = 0;
    std::size_t n = 1;
    const bool use_s_on_v = cfg.variant == DataDepVariant::proof;

    for (n = 2; n <= cfg.n_max; ++n) {
        const real alpha = schedule.alpha(n);
        const real beta = schedule.beta(n);
        if (!(alpha < 1)) throw CertificateError("data dependence needs alpha_n < 1");

        StepResult xs = implicit_s_step(space, t, x, alpha, beta, cfg.inner);
        const Point su_prev = s(u);
        auto phi = [&](const Point& cand) {
            const Point v = space.geodesic(cand, s(cand), 1 - beta);
            return space.geodesic(su_prev, use_s_on_v ? s(v) : t(v), 1 - alpha);
        };
        StepResult us = solve_implicit(space, phi, u, cfg.inner);

        const Point& y = *xs.y;
        const real phi_sum = alpha / (1 - alpha) * t.phi(space.distance(x, t(x))) + t.phi(space.distance(y, t(y))) +
                             delta * (1 - beta) * t.phi(space.distance(xs.x, t(xs.x)));
        mu.push_back((1 - alpha) * (1 - delta));
        eta.push_back((phi_sum + 2 * r.epsilon) / denom);
        a.push_back(space.distance(xs.x, us.x));

        const real moved = space.distance(us.x, u);
        calm_steps = moved < cfg.tail_tolerance ? calm_steps + 1 : 0;
        x = std::move(xs.x);
        u = std::move(us.x);
        if (calm_steps >= cfg.tail_window) break;
    }
    r.steps = std::min(n, cfg.n_max);
    r.tail_converged = calm_steps >= cfg.tail_window;
    r.p = t.fixed_point ? *t.fixed_point : x;
    r.q = u;
    r.observed = space.distance(r.p, r.q);
    r.margin = r.bound - r.observed;
    if (s.fixed_point) {
        r.q_closed_form = s.fixed_point;
        r.observed_closed_form = space.distance(r.p, *s.fixed_point);
    }
    r.recursion = check_recursive_bound(a, mu, eta, a.size(), cfg.recursion_tolerance);
    if (!r.tail_converged) {
        r.status = DataDepStatus::inconclusive;
    } else if (r.observed <= r.bound + cfg.tail_tolerance && r.recursion.hypothesis_holds()) {
        r.status = DataDepStatus::holds;
    } else {
        r.status = DataDepStatus::violated;
    }
    return r;
}

std::string datadep_text(const Space& space, const DataDepReport& r, int digits) {
    std::ostringstream out;
    out << "epsilon=" << format_fixed(r.epsilon, digits) << '\n'
        << "sampled_epsilon=" << format_fixed(r.sampled_epsilon, digits) << '\n'
        << "delta=" << format_fixed(r.delta, digits) << '\n'
        << "p=" << space.format(r.p, digits) << '\n'
        << "q=" << space.format(r.q, digits) << '\n';
    if (r.q_closed_form) out << "q_closed_form=" << space.format(*r.q_closed_form, digits) << '\n';
    out << "observed=" << format_fixed(r.observed, digits) << '\n';
    if (r.observed_closed_form) out << "observed_closed_form=" << format_fixed(*r.observed_closed_form, digits) << '\n';
    out << "bound=" << format_fixed(r.bound, digits) << '\n'
        << "margin=" << format_fixed(r.margin, digits) << '\n'
        << "steps=" << r.steps << '\n'
        << "tail_converged=" << (r.tail_converged ? "true" : "false") << '\n'
        << "recursion_hypothesis=" << (r.recursion.hypothesis_holds() ? "holds" : "violated") << '\n';
    if (r.recursion.first_violation) out << "recursion_first_violation=" << *r.recursion.first_violation << '\n';
    out << "recursion_max_excess=" << format_fixed(r.recursion.max_violation, digits) << '\n'
        << "status=" << datadep_status_id(r.status) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Rate race

bool RaceReport::all_faster() const noexcept {
    if (comparisons.empty()) return false;
    return std::all_of(comparisons.begin(), comparisons.end(), [](const SchemeComparison& c) {
        return c.actual.verdict == Verdict::faster && c.envelope.verdict == Verdict::faster;
    });
}

RateVerdict compare_sequences(std::span<const real> lhs, std::span<const real> rhs, std::size_t horizon,
                              real threshold, std::optional<std::size_t>* lhs_zero_at,
                              std::optional<std::size_t>* rhs_zero_at) {
    const std::size_t h = std::min({horizon, lhs.size(), rhs.size()});
    if (h < 1) throw ConfigError("nothing to compare");
    std::optional<std::size_t> lz;
    std::optional<std::size_t> rz;
    for (std::size_t i = 0; i < h; ++i) {
        if (!lz && lhs[i] == 0) lz = i + 1;
        if (!rz && rhs[i] == 0) rz = i + 1;
    }
    if (lhs_zero_at) *lhs_zero_at = lz;
    if (rhs_zero_at) *rhs_zero_at = rz;
    if (lz && (!rz || *lz < *rz)) {
        // Converged exactly: judge the prefix before the zero.
        const std::size_t prefix = *lz - 1;
        if (prefix < 1) {
            RateVerdict v;
            v.horizon = 0;
            v.threshold = threshold;
            v.verdict = Verdict::not_established;
            return v;
        }
        return berinde_compare(lhs, rhs, prefix, threshold);
    }
    return berinde_compare(lhs, rhs, h, threshold);
}

namespace {

const std::vector<real>& envelope_for(const BoundSequences& b, Scheme s) {
    switch (s) {
        case Scheme::implicit_s:
            return b.a;
        case Scheme::implicit_mann:
            return b.b;
        case Scheme::implicit_ishikawa:
            return b.c;
    }
    return b.a;
}

RaceReport race(const RaceSetup& setup, const std::vector<std::pair<Scheme, Scheme>>& pairs) {
    const auto& p = setup.mapping.fixed_point;
    if (!p) throw ConfigError("rate comparison needs a mapping with a known fixed point");
    const Space& space = *setup.space;
    RaceReport report;
    for (Scheme s : {Scheme::implicit_s, Scheme::implicit_ishikawa, Scheme::implicit_mann}) {
        report.traces.push_back(run(space, setup.mapping, s, setup.schedule, setup.x0, setup.horizon, setup.inner, p));
    }
    const real d0 = space.distance(setup.x0, *p);
    report.envelopes = bound_sequences(setup.schedule, setup.mapping.delta, d0, setup.horizon, setup.form);
    auto trace_of = [&](Scheme s) -> const IterationTrace& {
        return report.traces[static_cast<std::size_t>(s == Scheme::implicit_s ? 0 : s == Scheme::implicit_ishikawa ? 1 : 2)];
    };
    for (const auto& [lhs, rhs] : pairs) {
        SchemeComparison c;
        c.lhs = lhs;
        c.rhs = rhs;
        const auto dl = trace_of(lhs).distances();
        const auto dr = trace_of(rhs).distances();
        c.actual = compare_sequences(dl, dr, setup.horizon, setup.threshold, &c.lhs_exact_at, &c.rhs_exact_at);
        c.envelope = compare_sequences(envelope_for(report.envelopes, lhs), envelope_for(report.envelopes, rhs),
                                       setup.horizon, setup.threshold);
        report.comparisons.push_back(std::move(c));
    }
    return report;
}

}  // namespace

RaceReport rate_race(const RaceSetup& setup) {
    return race(setup, {{Scheme::implicit_s, Scheme::implicit_ishikawa}, {Scheme::implicit_s, Scheme::implicit_mann}});
}

RaceReport compare_pair(const RaceSetup& setup, Scheme lhs, Scheme rhs) { return race(setup, {{lhs, rhs}}); }

std::string race_text(const RaceReport& r, int digits) {
    const int sig = std::min(digits, 6);
    std::ostringstream out;
    for (const auto& c : r.comparisons) {
        out << scheme_id(c.lhs) << " vs " << scheme_id(c.rhs) << ": actual=" << verdict_id(c.actual.verdict)
            << " (ratio " << format_sci(c.actual.final_ratio, sig) << " at n=" << c.actual.horizon << ")"
            << " envelope=" << verdict_id(c.envelope.verdict) << " (ratio " << format_sci(c.envelope.final_ratio, sig)
            << " at n=" << c.envelope.horizon << ")";
        if (c.lhs_exact_at) out << " converged-exactly[" << scheme_id(c.lhs) << "]@n=" << *c.lhs_exact_at;
        if (c.rhs_exact_at) out << " converged-exactly[" << scheme_id(c.rhs) << "]@n=" << *c.rhs_exact_at;
        out << '\n';
    }
    return out.str();
}

}  // namespace wfix
