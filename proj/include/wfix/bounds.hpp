#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wfix/core.hpp"
#include "wfix/schemes.hpp"

namespace wfix {

// Error envelopes for the three implicit schemes. Index origin is n = 2
// (the first step from x_1), d0 = d(x_1, p), and envelope(1) = d0.
//
// Per-step factors:
//   implicit-S        alpha_k delta / (1 - (1-alpha_k) delta [beta_k + (1-beta_k) delta])
//   implicit-Mann     alpha_k       / (1 - (1-alpha_k) delta)
//   implicit-Ishikawa alpha_k       / (1 - (1-alpha_k) delta [beta_k + (1-beta_k) delta])
//
// `product` multiplies the factors for k = 2..n; `literal` raises the n-th
// factor to the power n-1, which only bounds the traces when the factor
// is constant in k.

enum class EnvelopeForm { product, literal };

enum class EnvelopeKind { implicit_s, implicit_mann, implicit_ishikawa };

real step_factor(EnvelopeKind kind, real alpha, real beta, real delta);

real envelope_s(const Schedule& schedule, real delta, real d0, std::size_t n,
                EnvelopeForm form = EnvelopeForm::product);
real envelope_mann(const Schedule& schedule, real delta, real d0, std::size_t n,
                   EnvelopeForm form = EnvelopeForm::product);
real envelope_ishikawa(const Schedule& schedule, real delta, real d0, std::size_t n,
                       EnvelopeForm form = EnvelopeForm::product);

/// Entry k holds the envelope at n = k + 1, for n = 1..n_max.
std::vector<real> envelope_sequence(EnvelopeKind kind, const Schedule& schedule, real delta, real d0,
                                    std::size_t n_max, EnvelopeForm form = EnvelopeForm::product);

/// exp(-sum_{i=2}^n (1-alpha_i)(1-delta)) d0.
real exp_envelope(const Schedule& schedule, real delta, real d0, std::size_t n);

/// prod_{i=2}^n [1 - (1-alpha_i)(1-delta)] d0, the bound exp_envelope dominates.
real contraction_product(const Schedule& schedule, real delta, real d0, std::size_t n);

struct BoundSequences {
    std::vector<real> a;  ///< implicit-S
    std::vector<real> b;  ///< implicit-Mann
    std::vector<real> c;  ///< implicit-Ishikawa
    std::vector<real> exp_bound;
    real d0 = 0;
};

BoundSequences bound_sequences(const Schedule& schedule, real delta, real d0, std::size_t n_max,
                               EnvelopeForm form = EnvelopeForm::product);

enum class Verdict { faster, not_established, degenerate };

std::string_view verdict_id(Verdict v) noexcept;

struct RateVerdict {
    std::vector<real> ratios;
    std::size_t horizon = 0;
    real threshold = 0;
    real final_ratio = 0;
    bool tail_monotone = false;
    Verdict verdict = Verdict::not_established;
    /// Set when the comparison was cut short by b_n = 0.
    std::optional<std::size_t> degenerate_index;
};

/// `faster` iff a_h / b_h < threshold at h = horizon and the ratio never
/// increases over the last quarter of [1, horizon]. Indices are 1-based
/// positions in the sequences. A vanishing b_n yields Verdict::degenerate.
RateVerdict berinde_compare(std::span<const real> a, std::span<const real> b, std::size_t horizon = 200,
                            real threshold = real{1e-6});

struct RecursiveBoundReport {
    /// First n (1-based) with a_{n+1} > (1-mu_n) a_n + mu_n eta_n + tol.
    std::optional<std::size_t> first_violation;
    std::size_t violations = 0;
    real max_violation = 0;
    real tail_sup_a = 0;
    real tail_sup_eta = 0;
    /// sup of a over the last decile <= sup of eta over the last decile + tol.
    bool conclusion_holds = false;

    bool hypothesis_holds() const noexcept { return !first_violation.has_value(); }
};

/// Checks a_{n+1} <= (1-mu_n) a_n + mu_n eta_n for n = 1..horizon-1 with
/// 1-based indices into the spans. mu_n must lie in (0,1), eta_n >= 0.
RecursiveBoundReport check_recursive_bound(std::span<const real> a, std::span<const real> mu, std::span<const real> eta,
                          std::size_t horizon, real tol = real{1e-10});

/// 2 epsilon / (1 - delta)^2.
real datadep_bound(real epsilon, real delta);

}  // namespace wfix
