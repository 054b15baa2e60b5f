#include "wfix/mappings.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "wfix/format.hpp"

namespace wfix {

// ---------------------------------------------------------------------------
// Phi

Phi Phi::zero() { return Phi{}; }

Phi Phi::linear(real slope) {
    if (!(slope >= 0)) throw CertificateError("phi: slope must be nonnegative");
    if (slope == 0) return zero();
    Phi p;
    p.kind_ = Kind::linear;
    p.scale_ = slope;
    return p;
}

Phi Phi::power(real scale, real exponent) {
    if (!(scale > 0)) throw CertificateError("phi: power scale must be positive");
    if (!(exponent >= 1)) throw CertificateError("phi: power exponent must be >= 1");
    Phi p;
    p.kind_ = Kind::power;
    p.scale_ = scale;
    p.exponent_ = exponent;
    return p;
}

Phi Phi::tabulated(std::vector<std::pair<real, real>> knots) {
    if (knots.size() < 2) throw CertificateError("phi: need at least two knots");
    if (knots.front().first != 0 || knots.front().second != 0) throw CertificateError("phi: first knot must be (0, 0)");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first)) throw CertificateError("phi: knot abscissae must increase");
    }
    Phi p;
    p.kind_ = Kind::tabulated;
    p.knots_ = std::move(knots);
    return p;
}

real Phi::operator()(real t) const {
    switch (kind_) {
        case Kind::zero:
            return 0;
        case Kind::linear:
            return scale_ * t;
        case Kind::power:
            return scale_ * std::pow(t, exponent_);
        case Kind::tabulated: {
            auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                       [](real v, const auto& k) { return v < k.first; });
            if (it == knots_.begin()) return knots_.front().second;
            if (it == knots_.end()) it = std::prev(knots_.end());
            const auto& hi = *it;
            const auto& lo = *std::prev(it);
            const real s = (t - lo.first) / (hi.first - lo.first);
            return lo.second + s * (hi.second - lo.second);
        }
    }
    return 0;
}

std::string Phi::describe() const {
    switch (kind_) {
        case Kind::zero:
            return "0";
        case Kind::linear:
            return format_fixed(scale_, 6) + "*t";
        case Kind::power:
            return format_fixed(scale_, 6) + "*t^" + format_fixed(exponent_, 3);
        case Kind::tabulated:
            return "tabulated(" + std::to_string(knots_.size()) + " knots)";
    }
    return "?";
}

PhiCheck check_phi(const Phi& phi, real t_max, std::size_t grid) {
    PhiCheck c;
    c.zero_at_origin = phi(0) == 0;
    c.degenerate_zero = phi.kind() == Phi::Kind::zero;
    bool increasing = grid >= 2;
    real prev = phi(0);
    for (std::size_t i = 1; i < grid; ++i) {
        const real v = phi(t_max * static_cast<real>(i) / static_cast<real>(grid - 1));
        if (!(v > prev)) {
            increasing = false;
            break;
        }
        prev = v;
    }
    c.strictly_increasing = increasing;
    return c;
}

Phi phi_for(const OsilikeUdomeneCertificate& cert) {
    if (!(cert.delta >= 0 && cert.delta < 1)) throw CertificateError("Osilike-Udomene: delta must lie in [0,1)");
    return Phi::linear(cert.lipschitz);
}

ContractiveLike make_contractive_like(std::string name, PointMap apply, real delta, Phi phi, ConvexSubset domain,
                                      std::optional<Point> fixed_point) {
    if (!(delta >= 0 && delta < 1)) {
        throw CertificateError(name + ": delta = " + format_fixed(delta, 6) + " is outside [0,1)");
    }
    if (!check_phi(phi).admissible()) throw CertificateError(name + ": phi must vanish at 0 and increase");
    ContractiveLike t;
    t.name = std::move(name);
    t.apply = std::move(apply);
    t.delta = delta;
    t.phi = std::move(phi);
    t.domain = std::move(domain);
    t.fixed_point = std::move(fixed_point);
    return t;
}

real zamfirescu_delta(const ZamfirescuCertificate& cert) {
    if (!(cert.a > 0 && cert.a < 1)) throw CertificateError("Zamfirescu: a must lie in (0,1)");
    if (!(cert.b > 0 && cert.b < real{0.5})) throw CertificateError("Zamfirescu: b must lie in (0,1/2)");
    if (!(cert.c > 0 && cert.c < real{0.5})) throw CertificateError("Zamfirescu: c must lie in (0,1/2)");
    return std::max({cert.a, cert.b / (1 - cert.b), cert.c / (1 - cert.c)});
}

// ---------------------------------------------------------------------------
// Verification kernels

std::vector<PairSample> draw_pairs(const Space& space, const Sampler& sampler, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw Error("need at least one sample");
    Rng rng(seed);
    std::vector<PairSample> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point x = sampler(rng);
        Point y = sampler(rng);
        space.validate(x);
        space.validate(y);
        pairs.push_back({std::move(x), std::move(y)});
    }
    return pairs;
}

VerificationReport verify_contractive_like(const Space& space, const ContractiveLike& t,
                                           const std::vector<PairSample>& pairs, real tol, Exec exec) {
    if (pairs.empty()) throw Error("verify_contractive_like: need at least one sample");
    const auto worst = max_reduce(exec, pairs.size(), [&](std::size_t i) {
        const auto& [x, y] = pairs[i];
        const Point tx = t(x);
        const real lhs = space.distance(tx, t(y));
        const real rhs = t.delta * space.distance(x, y) + t.phi(space.distance(x, tx));
        return std::max(real{0}, lhs - rhs);
    });
    VerificationReport r;
    r.max_violation = worst.value;
    if (auto i = worst.where()) r.worst = pairs[*i];
    r.n_samples = pairs.size();
    r.tolerance = tol;
    r.pass = r.max_violation <= tol;
    return r;
}

VerificationReport verify_contractive_like(const Space& space, const ContractiveLike& t, std::size_t n_samples,
                                           real tol, std::uint64_t seed, Exec exec) {
    return verify_contractive_like(space, t, draw_pairs(space, t.domain.sampler, n_samples, seed), tol, exec);
}

ApproximationReport verify_approximate(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                                       const std::vector<Point>& points, real tol, Exec exec) {
    if (points.empty()) throw Error("verify_approximate: need at least one sample");
    const auto worst = max_reduce(exec, points.size(),
                                  [&](std::size_t i) { return space.distance(t(points[i]), s(points[i])); });
    ApproximationReport r;
    r.max_distance = worst.value;
    r.epsilon = s.epsilon;
    if (auto i = worst.where()) r.worst = points[*i];
    r.n_samples = points.size();
    r.pass = r.max_distance <= s.epsilon + tol;
    return r;
}

ApproximationReport verify_approximate(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                                       std::size_t n_samples, std::uint64_t seed, real tol, Exec exec) {
    if (n_samples < 1) throw Error("verify_approximate: need at least one sample");
    Rng rng(seed);
    std::vector<Point> points;
    points.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        points.push_back(t.domain.sampler(rng));
        space.validate(points.back());
    }
    return verify_approximate(space, t, s, points, tol, exec);
}

VerificationReport check_zamfirescu(const Space& space, const PointMap& t, const ZamfirescuCertificate& cert,
                                    const std::vector<PairSample>& pairs, real tol, Exec exec) {
    zamfirescu_delta(cert);
    if (pairs.empty()) throw Error("check_zamfirescu: need at least one sample");
    const auto worst = max_reduce(exec, pairs.size(), [&](std::size_t i) {
        const auto& [x, y] = pairs[i];
        const Point tx = t(x);
        const Point ty = t(y);
        const real lhs = space.distance(tx, ty);
        const real z1 = lhs - cert.a * space.distance(x, y);
        const real z2 = lhs - cert.b * (space.distance(x, tx) + space.distance(y, ty));
        const real z3 = lhs - cert.c * (space.distance(x, ty) + space.distance(y, tx));
        return std::max(real{0}, std::min({z1, z2, z3}));
    });
    VerificationReport r;
    r.max_violation = worst.value;
    if (auto i = worst.where()) r.worst = pairs[*i];
    r.n_samples = pairs.size();
    r.tolerance = tol;
    r.pass = r.max_violation <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

real spectral_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().size() ? svd.singularValues()(0) : real{0};
}

std::optional<Point> affine_fixed_point(const Matrix& a, const Vector& b) {
    const Matrix lhs = Matrix::Identity(a.rows(), a.cols()) - a;
    Eigen::FullPivLU<Matrix> lu(lhs);
    if (!lu.isInvertible()) return std::nullopt;
    return Point(Vector(lu.solve(b)));
}

Matrix parse_matrix(std::string_view text, int dim) {
    const auto rows = split(text, ';');
    if (rows.size() == 1 && split(rows[0], ',').size() == 1) {
        return Matrix::Identity(dim, dim) * parse_real(rows[0]);
    }
    if (rows.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("affine matrix needs " + std::to_string(dim) + " rows");
    }
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const auto cols = split(rows[static_cast<std::size_t>(i)], ',');
        if (cols.size() != static_cast<std::size_t>(dim)) {
            throw ConfigError("affine matrix row " + std::to_string(i + 1) + " needs " + std::to_string(dim) + " entries");
        }
        for (int j = 0; j < dim; ++j) a(i, j) = parse_real(cols[static_cast<std::size_t>(j)]);
    }
    return a;
}

Vector parse_vector(std::string_view text, int dim) {
    const auto parts = split(text, text.find(';') != std::string_view::npos ? ';' : ',');
    Vector v(dim);
    if (parts.size() == 1) {
        v.setConstant(parse_real(parts[0]));
    } else if (parts.size() == static_cast<std::size_t>(dim)) {
        for (int i = 0; i < dim; ++i) v(i) = parse_real(parts[static_cast<std::size_t>(i)]);
    } else {
        throw ConfigError("vector '" + std::string(text) + "' needs 1 or " + std::to_string(dim) + " entries");
    }
    return v;
}

const EuclideanSpace& require_euclidean(const SpacePtr& space, std::string_view what) {
    const auto* e = dynamic_cast<const EuclideanSpace*>(space.get());
    if (!e) throw ConfigError(std::string(what) + " needs a euclidean space, got " + space->name());
    return *e;
}

real parse_factor(std::string_view text, std::string_view what) {
    const real f = parse_real(text);
    if (!(f >= 0 && f < 1)) throw CertificateError(std::string(what) + ": factor must lie in [0,1)");
    return f;
}

}  // namespace

ContractiveLike halving_map(const EuclideanSpace& space) {
    Vector zero = Vector::Zero(space.dim());
    auto t = make_contractive_like(
        "halving", [](const Point& x) -> Point { return Vector(std::get<Vector>(x) / 2); }, real{0.5}, Phi::zero(),
        ConvexSubset::box(space.dim(), 0, 1), Point(zero));
    t.affine = AffineMap{Matrix::Identity(space.dim(), space.dim()) / 2, zero};
    return t;
}

ContractiveLike affine_map(const EuclideanSpace& space, Matrix a, Vector b) {
    const int n = space.dim();
    if (a.rows() != n || a.cols() != n || b.size() != n) throw ConfigError("affine map dimension mismatch");
    const real delta = spectral_norm(a);
    if (!(delta < 1)) throw CertificateError("affine map: spectral norm " + format_fixed(delta, 6) + " is not < 1");
    auto p = affine_fixed_point(a, b);
    // Any ball around p of radius R is invariant: |Ax+b-p| <= delta |x-p|.
    const Vector centre = p ? std::get<Vector>(*p) : Vector::Zero(n);
    const real radius = 2 + centre.norm();
    auto t = make_contractive_like(
        "affine", [a, b](const Point& x) -> Point { return Vector(a * std::get<Vector>(x) + b); }, delta,
        Phi::zero(), ConvexSubset::euclidean_ball(centre, radius), p);
    t.affine = AffineMap{std::move(a), std::move(b)};
    return t;
}

ContractiveLike constant_map(const EuclideanSpace& space, Vector c) {
    const int n = space.dim();
    if (c.size() != n) throw ConfigError("constant map dimension mismatch");
    auto t = make_contractive_like(
        "constant", [c](const Point&) -> Point { return c; }, 0, Phi::zero(),
        ConvexSubset::euclidean_ball(c, 2), Point(c));
    t.affine = AffineMap{Matrix::Zero(n, n), c};
    return t;
}

ContractiveLike tripod_radial_map(real factor) {
    if (!(factor >= 0 && factor < 1)) throw CertificateError("tripod-radial: factor must lie in [0,1)");
    return make_contractive_like(
        "tripod-radial",
        [factor](const Point& x) -> Point {
            const auto& p = std::get<TripodPoint>(x);
            return make_tripod_point(p.ray, factor * p.radius);
        },
        factor, Phi::zero(), ConvexSubset::tripod_ball(3), Point(TripodPoint{}));
}

ContractiveLike halfplane_contraction(real factor) {
    if (!(factor >= 0 && factor < 1)) throw CertificateError("halfplane-contract: factor must lie in [0,1)");
    const HalfPlanePoint centre{0, 1};
    auto space = std::make_shared<HalfPlaneSpace>();
    return make_contractive_like(
        "halfplane-contract",
        [space, centre, factor](const Point& z) -> Point { return space->geodesic(centre, z, factor); }, factor,
        Phi::zero(), ConvexSubset::halfplane_ball(centre, 2), Point(centre));
}

ContractiveLike make_mapping(std::string_view spec, const SpacePtr& space) {
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    ContractiveLike t;
    if (head == "halving") {
        t = halving_map(require_euclidean(space, "halving"));
    } else if (head == "affine") {
        const auto& e = require_euclidean(space, "affine");
        if (arg.empty()) throw ConfigError("affine needs a matrix, e.g. affine:0.9");
        const auto plus = arg.find('+');
        Matrix a = parse_matrix(arg.substr(0, plus), e.dim());
        Vector b = plus == std::string_view::npos ? Vector(Vector::Zero(e.dim())) : parse_vector(arg.substr(plus + 1), e.dim());
        t = affine_map(e, std::move(a), std::move(b));
    } else if (head == "constant") {
        const auto& e = require_euclidean(space, "constant");
        t = constant_map(e, parse_vector(arg.empty() ? std::string_view("0") : arg, e.dim()));
    } else if (head == "tripod-radial") {
        if (!dynamic_cast<const TripodSpace*>(space.get())) throw ConfigError("tripod-radial needs the tripod space");
        t = tripod_radial_map(parse_factor(arg.empty() ? std::string_view("0.5") : arg, "tripod-radial"));
    } else if (head == "halfplane-contract") {
        if (!dynamic_cast<const HalfPlaneSpace*>(space.get())) {
            throw ConfigError("halfplane-contract needs the halfplane space");
        }
        t = halfplane_contraction(parse_factor(arg.empty() ? std::string_view("0.5") : arg, "halfplane-contract"));
    } else {
        throw ConfigError("unknown mapping '" + std::string(spec) + "'");
    }
    t.name = std::string(spec);
    return t;
}

ApproximateOperator perturb(const Space& space, const ContractiveLike& base, std::string_view offset) {
    ApproximateOperator s;
    s.name = "perturb:" + base.name + ":" + std::string(offset);
    const PointMap t = base.apply;
    if (const auto* e = dynamic_cast<const EuclideanSpace*>(&space)) {
        const Vector c = parse_vector(offset, e->dim());
        s.epsilon = c.norm();
        s.apply = [t, c](const Point& x) -> Point { return Vector(std::get<Vector>(t(x)) + c); };
        if (base.affine) {
            s.affine = AffineMap{base.affine->a, base.affine->b + c};
            s.fixed_point = affine_fixed_point(s.affine->a, s.affine->b);
        }
        return s;
    }
    const real shift = parse_real(offset);
    if (!(shift >= 0)) throw ConfigError("perturbation offset must be nonnegative on " + space.name());
    s.epsilon = shift;
    if (dynamic_cast<const TripodSpace*>(&space)) {
        s.apply = [t, shift](const Point& x) -> Point {
            const auto p = std::get<TripodPoint>(t(x));
            return make_tripod_point(p.ray, p.radius + shift);
        };
        return s;
    }
    if (dynamic_cast<const HalfPlaneSpace*>(&space)) {
        const real scale = std::exp(shift);
        s.apply = [t, scale](const Point& x) -> Point {
            auto h = std::get<HalfPlanePoint>(t(x));
            h.y *= scale;
            return h;
        };
        return s;
    }
    throw ConfigError("no perturbation defined on " + space.name());
}

ApproximateOperator make_approximate(std::string_view spec, const SpacePtr& space, ContractiveLike* base_out) {
    constexpr std::string_view prefix = "perturb:";
    if (spec.substr(0, prefix.size()) != prefix) throw ConfigError("approximate operator must be perturb:<base>:<offset>");
    const std::string_view rest = spec.substr(prefix.size());
    const auto last = rest.rfind(':');
    if (last == std::string_view::npos || last == 0) throw ConfigError("perturb spec needs <base>:<offset>");
    ContractiveLike base = make_mapping(rest.substr(0, last), space);
    ApproximateOperator s = perturb(*space, base, rest.substr(last + 1));
    if (base_out) *base_out = std::move(base);
    return s;
}

}  // namespace wfix
