#include "wfix/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "wfix/format.hpp"

namespace wfix {

namespace {

void check_delta(real delta) {
    if (!(delta >= 0 && delta < 1)) {
        throw CertificateError("delta = " + format_fixed(delta, 6) + " is outside [0,1)");
    }
}

}  // namespace

real step_factor(EnvelopeKind kind, real alpha, real beta, real delta) {
    check_delta(delta);
    const real bracket = beta + (1 - beta) * delta;
    switch (kind) {
        case EnvelopeKind::implicit_s:
            return alpha * delta / (1 - (1 - alpha) * delta * bracket);
        case EnvelopeKind::implicit_mann:
            return alpha / (1 - (1 - alpha) * delta);
        case EnvelopeKind::implicit_ishikawa:
            return alpha / (1 - (1 - alpha) * delta * bracket);
    }
    return 0;
}

std::vector<real> envelope_sequence(EnvelopeKind kind, const Schedule& schedule, real delta, real d0,
                                    std::size_t n_max, EnvelopeForm form) {
    check_delta(delta);
    if (n_max < 1) throw ConfigError("envelope horizon must be >= 1");
    std::vector<real> out;
    out.reserve(n_max);
    out.push_back(d0);
    real product = d0;
    for (std::size_t n = 2; n <= n_max; ++n) {
        const real f = step_factor(kind, schedule.alpha(n), schedule.beta(n), delta);
        if (form == EnvelopeForm::product) {
            product *= f;
            out.push_back(product);
        } else {
            out.push_back(std::pow(f, static_cast<real>(n - 1)) * d0);
        }
    }
    return out;
}

real envelope_s(const Schedule& schedule, real delta, real d0, std::size_t n, EnvelopeForm form) {
    return envelope_sequence(EnvelopeKind::implicit_s, schedule, delta, d0, n, form).back();
}

real envelope_mann(const Schedule& schedule, real delta, real d0, std::size_t n, EnvelopeForm form) {
    return envelope_sequence(EnvelopeKind::implicit_mann, schedule, delta, d0, n, form).back();
}

real envelope_ishikawa(const Schedule& schedule, real delta, real d0, std::size_t n, EnvelopeForm form) {
    return envelope_sequence(EnvelopeKind::implicit_ishikawa, schedule, delta, d0, n, form).back();
}

real exp_envelope(const Schedule& schedule, real delta, real d0, std::size_t n) {
    check_delta(delta);
    real sum = 0;
    for (std::size_t i = 2; i <= n; ++i) sum += (1 - schedule.alpha(i)) * (1 - delta);
    return std::exp(-sum) * d0;
}

real contraction_product(const Schedule& schedule, real delta, real d0, std::size_t n) {
    check_delta(delta);
    real product = d0;
    for (std::size_t i = 2; i <= n; ++i) product *= 1 - (1 - schedule.alpha(i)) * (1 - delta);
    return product;
}

BoundSequences bound_sequences(const Schedule& schedule, real delta, real d0, std::size_t n_max, EnvelopeForm form) {
    BoundSequences s;
    s.d0 = d0;
    s.a = envelope_sequence(EnvelopeKind::implicit_s, schedule, delta, d0, n_max, form);
    s.b = envelope_sequence(EnvelopeKind::implicit_mann, schedule, delta, d0, n_max, form);
    s.c = envelope_sequence(EnvelopeKind::implicit_ishikawa, schedule, delta, d0, n_max, form);
    s.exp_bound.reserve(n_max);
    real sum = 0;
    s.exp_bound.push_back(d0);
    for (std::size_t n = 2; n <= n_max; ++n) {
        sum += (1 - schedule.alpha(n)) * (1 - delta);
        s.exp_bound.push_back(std::exp(-sum) * d0);
    }
    return s;
}

std::string_view verdict_id(Verdict v) noexcept {
    switch (v) {
        case Verdict::faster:
            return "faster";
        case Verdict::not_established:
            return "not-established";
        case Verdict::degenerate:
            return "degenerate";
    }
    return "?";
}

RateVerdict berinde_compare(std::span<const real> a, std::span<const real> b, std::size_t horizon, real threshold) {
    if (horizon < 1) throw ConfigError("berinde_compare: horizon must be >= 1");
    if (a.size() < horizon || b.size() < horizon) {
        throw ConfigError("berinde_compare: sequences shorter than the horizon " + std::to_string(horizon));
    }
    RateVerdict v;
    v.horizon = horizon;
    v.threshold = threshold;
    v.ratios.reserve(horizon);
    for (std::size_t i = 0; i < horizon; ++i) {
        if (b[i] == 0) {
            v.degenerate_index = i + 1;
            v.verdict = Verdict::degenerate;
            v.final_ratio = v.ratios.empty() ? real{0} : v.ratios.back();
            return v;
        }
        v.ratios.push_back(a[i] / b[i]);
    }
    v.final_ratio = v.ratios.back();
    const std::size_t tail_start = horizon - std::max<std::size_t>(1, horizon / 4);
    v.tail_monotone = true;
    for (std::size_t i = tail_start + 1; i < horizon; ++i) {
        if (v.ratios[i] > v.ratios[i - 1]) {
            v.tail_monotone = false;
            break;
        }
    }
    v.verdict = v.final_ratio < threshold && v.tail_monotone ? Verdict::faster : Verdict::not_established;
    return v;
}

RecursiveBoundReport check_recursive_bound(std::span<const real> a, std::span<const real> mu, std::span<const real> eta,
                          std::size_t horizon, real tol) {
    if (horizon < 2) throw ConfigError("check_recursive_bound: horizon must be >= 2");
    if (a.size() < horizon || mu.size() < horizon - 1 || eta.size() < horizon - 1) {
        throw ConfigError("check_recursive_bound: sequences shorter than the horizon");
    }
    RecursiveBoundReport r;
    for (std::size_t n = 1; n < horizon; ++n) {
        const real m = mu[n - 1];
        const real e = eta[n - 1];
        if (!(m > 0 && m < 1)) throw CertificateError("check_recursive_bound: mu_" + std::to_string(n) + " outside (0,1)");
        if (!(e >= 0)) throw CertificateError("check_recursive_bound: eta_" + std::to_string(n) + " is negative");
        if (!(a[n - 1] >= 0)) throw CertificateError("check_recursive_bound: a_" + std::to_string(n) + " is negative");
        const real excess = a[n] - ((1 - m) * a[n - 1] + m * e);
        if (excess > tol || std::isnan(excess)) {
            ++r.violations;
            if (!r.first_violation) r.first_violation = n;
        }
        r.max_violation = std::max(r.max_violation, excess);
    }
    const std::size_t decile = std::max<std::size_t>(1, horizon / 10);
    for (std::size_t i = horizon - decile; i < horizon; ++i) r.tail_sup_a = std::max(r.tail_sup_a, a[i]);
    for (std::size_t i = horizon - 1 - std::min(decile, horizon - 1); i < horizon - 1; ++i) {
        r.tail_sup_eta = std::max(r.tail_sup_eta, eta[i]);
    }
    r.conclusion_holds = r.tail_sup_a <= r.tail_sup_eta + tol;
    return r;
}

real datadep_bound(real epsilon, real delta) {
    check_delta(delta);
    if (!(epsilon >= 0)) throw CertificateError("datadep_bound: epsilon must be nonnegative");
    return 2 * epsilon / ((1 - delta) * (1 - delta));
}

}  // namespace wfix
