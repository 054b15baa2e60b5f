#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfix/core.hpp"
#include "wfix/mappings.hpp"
#include "wfix/wspace.hpp"

namespace wfix {

enum class Scheme { implicit_s, implicit_ishikawa, implicit_mann };

std::string_view scheme_id(Scheme s) noexcept;
/// Accepts `implicit-s`, `implicit-ishikawa`, `implicit-mann`.
Scheme parse_scheme(std::string_view id);

/// Whether sum(1 - alpha_n) diverges.
enum class Divergence { proven, fails, assumed };

/// Control sequences alpha_n, beta_n in [0,1]. Runs start from x_1 and the
/// first step uses n = 2, so the value at n = 1 never enters a recursion.
struct Schedule {
    std::string name;
    std::function<real(std::size_t)> alpha_fn;
    std::function<real(std::size_t)> beta_fn;
    Divergence divergence = Divergence::assumed;

    /// Range-checked accessors; throw CertificateError outside [0,1].
    real alpha(std::size_t n) const;
    real beta(std::size_t n) const;

    /// alpha_n = beta_n = 1 - 1/n for n >= 2, alpha_1 = beta_1 = 0.
    static Schedule harmonic();
    static Schedule constant(real alpha, real beta);
    /// alpha_n = 1 - n^-p, beta_n = 1 - n^-q (n >= 2); diverges iff p <= 1.
    static Schedule power(real p, real q);
    /// User-supplied sequences; divergence is the caller's assertion.
    static Schedule custom(std::string name, std::function<real(std::size_t)> alpha,
                           std::function<real(std::size_t)> beta);
};

/// `harmonic`, `constant:<a>[,<b>]`, `power:<p>[,<q>]`.
Schedule make_schedule(std::string_view spec);

enum class InnerMode { picard, exact_affine };

std::string_view inner_mode_id(InnerMode m) noexcept;
InnerMode parse_inner_mode(std::string_view id);

struct InnerSolverConfig {
    real tolerance = real{1e-14};
    std::size_t max_iterations = 10000;
    InnerMode mode = InnerMode::picard;
    /// Keep iterating past the tolerance while the residual still shrinks,
    /// so the accepted iterate is accurate to roundoff.
    bool polish = true;

    void validate() const;
};

struct StepResult {
    Point x;
    std::optional<Point> y;
    std::size_t inner_iterations = 0;
    /// d(x, Phi(x)) for the step map Phi; the solved-equation certificate.
    real residual = 0;
};

/// Picard iteration x <- phi(x) from `guess` until d(x, phi(x)) <= tolerance.
/// Throws NonConvergence when max_iterations is exhausted.
StepResult solve_implicit(const Space& space, const std::function<Point(const Point&)>& phi, const Point& guess,
                          const InnerSolverConfig& cfg);

// alpha_n multiplies the first argument, so W is called with 1-alpha.

/// x = W(T x_prev, T y, 1-alpha), y = W(x, T x, 1-beta).
StepResult implicit_s_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha, real beta,
                           const InnerSolverConfig& cfg);

/// x = W(x_prev, T y, 1-alpha), y = W(x, T x, 1-beta).
StepResult implicit_ishikawa_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                                  real beta, const InnerSolverConfig& cfg);

/// x = W(x_prev, T x, 1-alpha).
StepResult implicit_mann_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                              const InnerSolverConfig& cfg);

StepResult step(Scheme scheme, const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                real beta, const InnerSolverConfig& cfg);

/// The step map Phi whose fixed point is the new iterate.
std::function<Point(const Point&)> step_map(Scheme scheme, const Space& space, const ContractiveLike& t,
                                            const Point& x_prev, real alpha, real beta);

struct TraceRecord {
    std::size_t n = 0;
    Point x;
    std::optional<Point> y;
    std::size_t inner_iterations = 0;
    real residual = 0;
    std::optional<real> dist_to_p;
};

struct IterationTrace {
    Scheme scheme = Scheme::implicit_s;
    std::vector<TraceRecord> records;

    /// d(x_n, p) for every record; throws if p was not supplied.
    std::vector<real> distances() const;
};

/// Thrown by run(); carries the trace up to the failing step.
class RunFailure : public Error {
public:
    RunFailure(const std::string& what, IterationTrace partial, real last_residual)
        : Error(what), partial_(std::move(partial)), last_residual_(last_residual) {}

    const IterationTrace& partial() const noexcept { return partial_; }
    real last_residual() const noexcept { return last_residual_; }

private:
    IterationTrace partial_;
    real last_residual_;
};

/// Records n = 1 (x1 = x0) through n = n_max.
IterationTrace run(const Space& space, const ContractiveLike& t, Scheme scheme, const Schedule& schedule,
                   const Point& x0, std::size_t n_max, const InnerSolverConfig& cfg,
                   const std::optional<Point>& p = std::nullopt);

/// Columns n,x,inner_iters,residual,dist_to_p; LF line endings.
std::string trace_csv(const Space& space, const IterationTrace& trace, int digits = 15);

}  // namespace wfix
