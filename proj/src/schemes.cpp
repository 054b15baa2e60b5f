#include "wfix/schemes.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

#include "wfix/format.hpp"

namespace wfix {

std::string_view scheme_id(Scheme s) noexcept {
    switch (s) {
        case Scheme::implicit_s:
            return "implicit-s";
        case Scheme::implicit_ishikawa:
            return "implicit-ishikawa";
        case Scheme::implicit_mann:
            return "implicit-mann";
    }
    return "?";
}

Scheme parse_scheme(std::string_view id) {
    if (id == "implicit-s") return Scheme::implicit_s;
    if (id == "implicit-ishikawa") return Scheme::implicit_ishikawa;
    if (id == "implicit-mann") return Scheme::implicit_mann;
    throw ConfigError("unknown scheme '" + std::string(id) + "'");
}

std::string_view inner_mode_id(InnerMode m) noexcept {
    return m == InnerMode::picard ? "picard" : "exact-affine";
}

InnerMode parse_inner_mode(std::string_view id) {
    if (id == "picard") return InnerMode::picard;
    if (id == "exact-affine") return InnerMode::exact_affine;
    throw ConfigError("unknown inner solver mode '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Schedules

namespace {

real checked_weight(const std::function<real(std::size_t)>& f, std::size_t n, const std::string& name,
                    const char* which) {
    const real v = f(n);
    if (!(v >= 0 && v <= 1)) {
        throw CertificateError("schedule " + name + ": " + which + "_" + std::to_string(n) + " = " +
                               format_fixed(v, 6) + " is outside [0,1]");
    }
    return v;
}

}  // namespace

real Schedule::alpha(std::size_t n) const { return checked_weight(alpha_fn, n, name, "alpha"); }

real Schedule::beta(std::size_t n) const { return checked_weight(beta_fn, n, name, "beta"); }

Schedule Schedule::harmonic() {
    auto f = [](std::size_t n) -> real { return n < 2 ? real{0} : 1 - real{1} / static_cast<real>(n); };
    return Schedule{"harmonic", f, f, Divergence::proven};
}

Schedule Schedule::constant(real alpha, real beta) {
    if (!(alpha >= 0 && alpha <= 1 && beta >= 0 && beta <= 1)) {
        throw CertificateError("constant schedule needs alpha, beta in [0,1]");
    }
    return Schedule{"constant:" + format_fixed(alpha, 6) + "," + format_fixed(beta, 6),
                    [alpha](std::size_t) { return alpha; }, [beta](std::size_t) { return beta; },
                    alpha < 1 ? Divergence::proven : Divergence::fails};
}

Schedule Schedule::power(real p, real q) {
    if (!(p > 0 && q > 0)) throw CertificateError("power schedule needs positive exponents");
    auto make = [](real e) {
        return [e](std::size_t n) -> real { return n < 2 ? real{0} : 1 - std::pow(static_cast<real>(n), -e); };
    };
    return Schedule{"power:" + format_fixed(p, 6) + "," + format_fixed(q, 6), make(p), make(q),
                    p <= 1 ? Divergence::proven : Divergence::fails};
}

Schedule Schedule::custom(std::string name, std::function<real(std::size_t)> alpha,
                          std::function<real(std::size_t)> beta) {
    return Schedule{std::move(name), std::move(alpha), std::move(beta), Divergence::assumed};
}

Schedule make_schedule(std::string_view spec) {
    if (spec == "harmonic") return Schedule::harmonic();
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    if (colon == std::string_view::npos) throw ConfigError("unknown schedule '" + std::string(spec) + "'");
    const auto args = split(spec.substr(colon + 1), ',');
    if (args.empty() || args.size() > 2) throw ConfigError("schedule '" + std::string(spec) + "' needs 1 or 2 values");
    const real first = parse_real(args[0]);
    const real second = args.size() == 2 ? parse_real(args[1]) : first;
    Schedule s;
    if (head == "constant") {
        s = Schedule::constant(first, second);
    } else if (head == "power") {
        s = Schedule::power(first, second);
    } else {
        throw ConfigError("unknown schedule '" + std::string(spec) + "'");
    }
    s.name = std::string(spec);
    return s;
}

void InnerSolverConfig::validate() const {
    if (!(tolerance > 0)) throw ConfigError("inner tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("inner max_iterations must be >= 1");
}

// ---------------------------------------------------------------------------
// Inner solver

StepResult solve_implicit(const Space& space, const std::function<Point(const Point&)>& phi, const Point& guess,
                          const InnerSolverConfig& cfg) {
    cfg.validate();
    auto checked = [&](const Point& p) {
        Point q = phi(p);
        space.validate(q);
        return q;
    };
    Point x = guess;
    Point fx = checked(x);
    std::size_t iterations = 1;
    real residual = space.distance(x, fx);
    while (!(residual <= cfg.tolerance)) {
        if (iterations >= cfg.max_iterations) {
            throw NonConvergence("inner solver: residual " + format_fixed(residual, 18) + " after " +
                                     std::to_string(iterations) + " iterations",
                                 residual);
        }
        x = std::move(fx);
        fx = checked(x);
        ++iterations;
        residual = space.distance(x, fx);
    }
    if (cfg.polish) {
        while (residual > 0 && iterations < cfg.max_iterations) {
            Point next = checked(fx);
            ++iterations;
            const real r = space.distance(fx, next);
            if (!(r < residual)) break;
            x = std::move(fx);
            fx = std::move(next);
            residual = r;
        }
    }
    return StepResult{std::move(x), std::nullopt, iterations, residual};
}

std::function<Point(const Point&)> step_map(Scheme scheme, const Space& space, const ContractiveLike& t,
                                            const Point& x_prev, real alpha, real beta) {
    const Space* s = &space;
    const ContractiveLike* map = &t;
    switch (scheme) {
        case Scheme::implicit_s: {
            Point t_prev = t(x_prev);
            return [s, map, t_prev, alpha, beta](const Point& x) {
                const Point y = s->geodesic(x, (*map)(x), 1 - beta);
                return s->geodesic(t_prev, (*map)(y), 1 - alpha);
            };
        }
        case Scheme::implicit_ishikawa:
            return [s, map, x_prev, alpha, beta](const Point& x) {
                const Point y = s->geodesic(x, (*map)(x), 1 - beta);
                return s->geodesic(x_prev, (*map)(y), 1 - alpha);
            };
        case Scheme::implicit_mann:
            return [s, map, x_prev, alpha](const Point& x) { return s->geodesic(x_prev, (*map)(x), 1 - alpha); };
    }
    throw Error("unreachable scheme");
}

namespace {

void check_weights(real alpha, real beta) {
    if (!(alpha >= 0 && alpha <= 1)) throw CertificateError("alpha must lie in [0,1]");
    if (!(beta >= 0 && beta <= 1)) throw CertificateError("beta must lie in [0,1]");
}

Point solve_affine_step(Scheme scheme, const AffineMap& m, const Vector& x_prev, real alpha, real beta) {
    const Eigen::Index n = m.a.rows();
    const Matrix id = Matrix::Identity(n, n);
    // y = (beta I + (1-beta) A) x + (1-beta) b, then T y = A y + b.
    const Matrix y_lin = beta * id + (1 - beta) * m.a;
    const Vector ty_const = (1 - beta) * (m.a * m.b) + m.b;
    Matrix lhs;
    Vector rhs;
    switch (scheme) {
        case Scheme::implicit_s:
            lhs = id - (1 - alpha) * (m.a * y_lin);
            rhs = alpha * (m.a * x_prev + m.b) + (1 - alpha) * ty_const;
            break;
        case Scheme::implicit_ishikawa:
            lhs = id - (1 - alpha) * (m.a * y_lin);
            rhs = alpha * x_prev + (1 - alpha) * ty_const;
            break;
        case Scheme::implicit_mann:
            lhs = id - (1 - alpha) * m.a;
            rhs = alpha * x_prev + (1 - alpha) * m.b;
            break;
    }
    Eigen::FullPivLU<Matrix> lu(lhs);
    if (!lu.isInvertible()) throw NonConvergence("exact-affine: singular step system", real{0});
    return Vector(lu.solve(rhs));
}

}  // namespace

StepResult step(Scheme scheme, const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                real beta, const InnerSolverConfig& cfg) {
    check_weights(alpha, beta);
    cfg.validate();
    space.validate(x_prev);
    const auto phi = step_map(scheme, space, t, x_prev, alpha, beta);
    StepResult r;
    if (cfg.mode == InnerMode::exact_affine) {
        if (!t.affine || !dynamic_cast<const EuclideanSpace*>(&space)) {
            throw ConfigError("exact-affine inner mode needs an affine map on euclidean space");
        }
        r.x = solve_affine_step(scheme, *t.affine, std::get<Vector>(x_prev), alpha, beta);
        space.validate(r.x);
        r.residual = space.distance(r.x, phi(r.x));
        r.inner_iterations = 0;
        if (!(r.residual <= cfg.tolerance)) {
            throw NonConvergence("exact-affine: residual " + format_fixed(r.residual, 18) + " above tolerance",
                                 r.residual);
        }
    } else {
        r = solve_implicit(space, phi, x_prev, cfg);
    }
    if (scheme != Scheme::implicit_mann) {
        r.y = space.geodesic(r.x, t(r.x), 1 - beta);
        space.validate(*r.y);
    }
    return r;
}

StepResult implicit_s_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha, real beta,
                           const InnerSolverConfig& cfg) {
    return step(Scheme::implicit_s, space, t, x_prev, alpha, beta, cfg);
}

StepResult implicit_ishikawa_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                                  real beta, const InnerSolverConfig& cfg) {
    return step(Scheme::implicit_ishikawa, space, t, x_prev, alpha, beta, cfg);
}

StepResult implicit_mann_step(const Space& space, const ContractiveLike& t, const Point& x_prev, real alpha,
                              const InnerSolverConfig& cfg) {
    return step(Scheme::implicit_mann, space, t, x_prev, alpha, 1, cfg);
}

// ---------------------------------------------------------------------------
// Runs

std::vector<real> IterationTrace::distances() const {
    std::vector<real> d;
    d.reserve(records.size());
    for (const auto& r : records) {
        if (!r.dist_to_p) throw Error("trace has no distance-to-p column");
        d.push_back(*r.dist_to_p);
    }
    return d;
}

IterationTrace run(const Space& space, const ContractiveLike& t, Scheme scheme, const Schedule& schedule,
                   const Point& x0, std::size_t n_max, const InnerSolverConfig& cfg, const std::optional<Point>& p) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    cfg.validate();
    space.validate(x0);
    if (p) space.validate(*p);
    IterationTrace trace;
    trace.scheme = scheme;
    trace.records.reserve(n_max);
    TraceRecord first;
    first.n = 1;
    first.x = x0;
    if (p) first.dist_to_p = space.distance(x0, *p);
    trace.records.push_back(std::move(first));
    for (std::size_t n = 2; n <= n_max; ++n) {
        StepResult s;
        try {
            s = step(scheme, space, t, trace.records.back().x, schedule.alpha(n), schedule.beta(n), cfg);
        } catch (const NonConvergence& e) {
            throw RunFailure("step " + std::to_string(n) + ": " + e.what(), std::move(trace), e.last_residual());
        } catch (const Error& e) {
            throw RunFailure("step " + std::to_string(n) + ": " + e.what(), std::move(trace), real{0});
        }
        TraceRecord rec;
        rec.n = n;
        rec.x = std::move(s.x);
        rec.y = std::move(s.y);
        rec.inner_iterations = s.inner_iterations;
        rec.residual = s.residual;
        if (p) rec.dist_to_p = space.distance(rec.x, *p);
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

std::string trace_csv(const Space& space, const IterationTrace& trace, int digits) {
    std::ostringstream out;
    out << "n,x,inner_iters,residual,dist_to_p\n";
    for (const auto& r : trace.records) {
        out << r.n << ',' << space.format(r.x, digits) << ',' << r.inner_iterations << ','
            << format_fixed(r.residual, digits) << ',' << (r.dist_to_p ? format_fixed(*r.dist_to_p, digits) : "")
            << '\n';
    }
    return out.str();
}

}  // namespace wfix
