#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wfix/bounds.hpp"
#include "wfix/core.hpp"
#include "wfix/mappings.hpp"
#include "wfix/schemes.hpp"
#include "wfix/wspace.hpp"

namespace wfix {

using Rational = boost::multiprecision::cpp_rational;

/// Exact iterates of the three implicit schemes for T x = x/2 on the real
/// line with alpha_n = beta_n = 1 - 1/n and x_1 = 1. Solving each implicit
/// linear step by hand gives x_n = x_{n-1} * k_n with
///   Mann      k_n = 2(n-1) / (2n-1)
///   Ishikawa  k_n = 4n(n-1) / (4n^2-2n+1)
///   S         k_n = 2n(n-1) / (4n^2-2n+1)
class RationalOracle {
public:
    explicit RationalOracle(Scheme scheme);

    static Rational step_coefficient(Scheme scheme, std::size_t n);

    /// Exact x_n, n >= 1.
    const Rational& exact(std::size_t n);
    real value(std::size_t n);

private:
    Scheme scheme_;
    std::vector<Rational> values_;
};

/// Exact decimal with `digits` places, ties to even.
std::string round_half_even(const Rational& v, int digits);

struct TableRow {
    std::size_t n = 0;
    real imi = 0;
    real iii = 0;
    real isi = 0;
};

struct ComparisonTable {
    std::vector<TableRow> rows;
};

/// Rows printed in the reference comparison.
inline constexpr std::array<std::size_t, 14> kReferenceRows{2, 5, 7, 10, 13, 16, 20, 25, 30, 35, 40, 43, 46, 50};

struct ReferenceCell {
    std::size_t n;
    const char* imi;
    const char* iii;
    const char* isi;
};

/// The reference 14 x 3 cells, verbatim.
const std::array<ReferenceCell, 14>& reference_cells();

struct TableSetup {
    SpacePtr space;
    ContractiveLike mapping;
    Schedule schedule;
    Point x0;
    std::size_t n_max = 50;
    InnerSolverConfig inner;
    /// Emit every n instead of the reference row set.
    bool all_rows = false;

    /// euclidean:1, halving, harmonic, x_1 = 1, n_max = 50.
    static TableSetup reference_defaults();
};

/// Cells are x_n on euclidean:1 and d(x_n, p) elsewhere. Rows are the
/// reference row set within [2, n_max]; with n_max = 1 the initial row.
ComparisonTable reproduce_table(const TableSetup& setup);

std::string table_text(const ComparisonTable& table, int digits = 15);
std::string table_csv(const ComparisonTable& table, int digits = 15);

struct CellMismatch {
    std::size_t n;
    std::string column;
    std::string expected;
    std::string actual;
};

/// Compares every reference cell at 15 decimals. Missing rows count as
/// mismatches.
std::vector<CellMismatch> verify_against_reference(const ComparisonTable& table);

// ---------------------------------------------------------------------------
// Data dependence

enum class DataDepVariant {
    /// u_n = W(S u_{n-1}, T v_n, alpha_n).
    as_stated,
    /// u_n = W(S u_{n-1}, S v_n, alpha_n).
    proof
};

struct DataDepConfig {
    std::size_t n_max = 2'000'000;
    std::size_t tail_window = 10;
    real tail_tolerance = real{1e-12};
    DataDepVariant variant = DataDepVariant::as_stated;
    InnerSolverConfig inner;
    real recursion_tolerance = real{1e-10};
};

enum class DataDepStatus { holds, violated, inconclusive };

std::string_view datadep_status_id(DataDepStatus s) noexcept;

struct DataDepReport {
    real epsilon = 0;          ///< certified sup d(Tx, Sx)
    real sampled_epsilon = 0;  ///< observed on samples of T's domain
    real delta = 0;
    Point p;
    Point q;                   ///< u at the last step
    std::optional<Point> q_closed_form;
    real observed = 0;         ///< d(p, q)
    std::optional<real> observed_closed_form;
    real bound = 0;
    real margin = 0;           ///< bound - observed
    std::size_t steps = 0;
    bool tail_converged = false;
    RecursiveBoundReport recursion;
    DataDepStatus status = DataDepStatus::inconclusive;
};

/// Runs the implicit-S sequence for T alongside the perturbed sequence u_n
/// for (S, T), until d(u_n, u_{n-1}) < tail_tolerance for tail_window
/// consecutive steps or n_max is reached. q is resolved only to about
/// tail_tolerance, so the bound is checked with that much slack.
DataDepReport run_datadep(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                          const Schedule& schedule, const Point& x0, const Point& u0, const DataDepConfig& cfg);

std::string datadep_text(const Space& space, const DataDepReport& r, int digits = 15);

// ---------------------------------------------------------------------------
// Rate comparison

struct SchemeComparison {
    Scheme lhs = Scheme::implicit_s;
    Scheme rhs = Scheme::implicit_ishikawa;
    RateVerdict actual;
    RateVerdict envelope;
    /// First n at which the lhs trace reached p exactly.
    std::optional<std::size_t> lhs_exact_at;
    std::optional<std::size_t> rhs_exact_at;
};

struct RaceReport {
    std::vector<IterationTrace> traces;  ///< implicit-s, implicit-ishikawa, implicit-mann
    BoundSequences envelopes;
    std::vector<SchemeComparison> comparisons;

    bool all_faster() const noexcept;
};

struct RaceSetup {
    SpacePtr space;
    ContractiveLike mapping;
    Schedule schedule;
    Point x0;
    std::size_t horizon = 200;
    real threshold = real{1e-6};
    InnerSolverConfig inner;
    EnvelopeForm form = EnvelopeForm::product;
};

/// Verdict on distance sequences where either side may hit zero: a zero in
/// `lhs` truncates the comparison to the prefix before it; a zero in `rhs`
/// is degenerate.
RateVerdict compare_sequences(std::span<const real> lhs, std::span<const real> rhs, std::size_t horizon,
                              real threshold, std::optional<std::size_t>* lhs_zero_at = nullptr,
                              std::optional<std::size_t>* rhs_zero_at = nullptr);

/// implicit-S against implicit-Ishikawa and implicit-Mann, on traces and on
/// envelopes. Requires a known fixed point.
RaceReport rate_race(const RaceSetup& setup);

/// One pairwise comparison (lhs expected faster).
RaceReport compare_pair(const RaceSetup& setup, Scheme lhs, Scheme rhs);

std::string race_text(const RaceReport& r, int digits = 15);  // ratios use min(digits, 6) significant digits

}  // namespace wfix
