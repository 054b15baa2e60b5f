#include "wfix/wspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wfix/format.hpp"

namespace wfix {

namespace {

const Vector& as_vector(const Point& p) {
    const auto* v = std::get_if<Vector>(&p);
    if (!v) throw InvalidPoint("expected a Euclidean point");
    return *v;
}

const TripodPoint& as_tripod(const Point& p) {
    const auto* t = std::get_if<TripodPoint>(&p);
    if (!t) throw InvalidPoint("expected a tripod point");
    return *t;
}

const HalfPlanePoint& as_halfplane(const Point& p) {
    const auto* h = std::get_if<HalfPlanePoint>(&p);
    if (!h) throw InvalidPoint("expected a half-plane point");
    return *h;
}

real positive_part(real v) { return v > 0 ? v : real{0}; }

char ray_letter(int ray) { return static_cast<char>('A' + ray); }

}  // namespace

Point scalar_point(real v) {
    Vector x(1);
    x(0) = v;
    return x;
}

Vector make_vector(std::initializer_list<real> coords) {
    if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxEuclideanDim)) {
        throw ConfigError("vector dimension must be in [1, 16]");
    }
    Vector v(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (real c : coords) v(i++) = c;
    return v;
}

TripodPoint make_tripod_point(int ray, real radius) {
    if (radius == 0) return TripodPoint{0, 0};
    return TripodPoint{ray, radius};
}

void Space::validate(const Point& p) const {
    if (!contains(p)) throw InvalidPoint(name() + ": point " + format(p, 6) + " is outside the domain");
}

Point interpolate(const Space& space, const Point& x, const Point& y, real lambda) {
    if (!(lambda >= 0 && lambda <= 1)) throw InvalidPoint("interpolate: lambda must lie in [0, 1]");
    space.validate(x);
    space.validate(y);
    return space.geodesic(x, y, lambda);
}

// ---------------------------------------------------------------------------
// Euclidean

EuclideanSpace::EuclideanSpace(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxEuclideanDim) {
        throw ConfigError("euclidean dimension must be in [1, " + std::to_string(kMaxEuclideanDim) + "]");
    }
}

std::string EuclideanSpace::name() const { return "euclidean:" + std::to_string(dim_); }

real EuclideanSpace::distance(const Point& a, const Point& b) const {
    return (as_vector(a) - as_vector(b)).norm();
}

Point EuclideanSpace::geodesic(const Point& x, const Point& y, real lambda) const {
    const Vector& xv = as_vector(x);
    const Vector& yv = as_vector(y);
    // Anchor at the nearer endpoint: W(x,x,l) = x and W(x,y,0|1) are exact.
    if (lambda <= real{0.5}) return Vector(xv + lambda * (yv - xv));
    return Vector(yv + (1 - lambda) * (xv - yv));
}

bool EuclideanSpace::contains(const Point& p) const {
    const auto* v = std::get_if<Vector>(&p);
    return v && v->size() == dim_ && v->allFinite();
}

Sampler EuclideanSpace::default_sampler() const {
    return [dim = dim_](Rng& rng) -> Point {
        std::uniform_real_distribution<double> coord(-2.0, 2.0);
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = coord(rng);
        return v;
    };
}

std::string EuclideanSpace::format(const Point& p, int digits) const {
    const Vector& v = as_vector(p);
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_fixed(v(i), digits);
    }
    return out;
}

Point EuclideanSpace::parse(std::string_view text) const {
    auto parts = split(text, text.find(';') != std::string_view::npos ? ';' : ',');
    Vector v(dim_);
    if (parts.size() == 1) {
        v.setConstant(parse_real(parts[0]));
    } else if (parts.size() == static_cast<std::size_t>(dim_)) {
        for (int i = 0; i < dim_; ++i) v(i) = parse_real(parts[static_cast<std::size_t>(i)]);
    } else {
        throw ConfigError("point '" + std::string(text) + "' does not have " + std::to_string(dim_) +
                          " coordinates");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Tripod

real TripodSpace::distance(const Point& a, const Point& b) const {
    const auto& p = as_tripod(a);
    const auto& q = as_tripod(b);
    if (p.ray == q.ray || p.radius == 0 || q.radius == 0) return std::abs(p.radius - q.radius);
    return p.radius + q.radius;
}

Point TripodSpace::geodesic(const Point& x, const Point& y, real lambda) const {
    const auto& p = as_tripod(x);
    const auto& q = as_tripod(y);
    if (p.ray == q.ray || p.radius == 0 || q.radius == 0) {
        // One ray carries both points (the hub lies on every ray).
        const int ray = p.radius != 0 ? p.ray : q.ray;
        const real r = lambda <= real{0.5} ? p.radius + lambda * (q.radius - p.radius)
                                           : q.radius + (1 - lambda) * (p.radius - q.radius);
        return make_tripod_point(ray, r);
    }
    // Path runs down p's ray to the hub, then up q's ray.
    const real total = p.radius + q.radius;
    const real travelled = lambda * total;
    const real remaining = (1 - lambda) * total;
    if (travelled <= p.radius) return make_tripod_point(p.ray, std::max(real{0}, p.radius - travelled));
    return make_tripod_point(q.ray, std::max(real{0}, q.radius - remaining));
}

bool TripodSpace::contains(const Point& p) const {
    const auto* t = std::get_if<TripodPoint>(&p);
    return t && t->ray >= 0 && t->ray < kRays && std::isfinite(t->radius) && t->radius >= 0;
}

Sampler TripodSpace::default_sampler() const {
    return [](Rng& rng) -> Point {
        std::uniform_int_distribution<int> ray(0, kRays - 1);
        std::uniform_real_distribution<double> radius(0.0, 3.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < 0.05) return TripodPoint{};
        const int r = ray(rng);
        return make_tripod_point(r, radius(rng));
    };
}

std::string TripodSpace::format(const Point& p, int digits) const {
    const auto& t = as_tripod(p);
    return std::string(1, ray_letter(t.ray)) + ":" + format_fixed(t.radius, digits);
}

Point TripodSpace::parse(std::string_view text) const {
    if (text.size() < 3 || text[1] != ':') throw ConfigError("tripod point must look like A:<radius>");
    const char c = text[0];
    if (c < 'A' || c >= 'A' + kRays) throw ConfigError("tripod ray must be A, B or C");
    const real r = parse_real(text.substr(2));
    if (r < 0) throw InvalidPoint("tripod radius must be nonnegative");
    return make_tripod_point(c - 'A', r);
}

// ---------------------------------------------------------------------------
// Half-plane

real HalfPlaneSpace::distance(const Point& a, const Point& b) const {
    const auto& p = as_halfplane(a);
    const auto& q = as_halfplane(b);
    const real chord = std::hypot(p.x - q.x, p.y - q.y);
    return 2 * std::asinh(chord / (2 * std::sqrt(p.y * q.y)));
}

Point HalfPlaneSpace::geodesic(const Point& x, const Point& y, real lambda) const {
    if (lambda == 0) return x;
    if (lambda == 1) return y;
    const auto& p = as_halfplane(x);
    const auto& q = as_halfplane(y);
    const real d = distance(x, y);
    if (d == 0) return x;
    // Geodesic on the hyperboloid is sinh((1-l)d) P + sinh(l d) Q over
    // sinh d. Pulled back: X0 - X2 = 1/y and X1 = x/y are linear in P, Q.
    const real s = std::sinh(d);
    const real a = std::sinh((1 - lambda) * d) / s;
    const real b = std::sinh(lambda * d) / s;
    const real inv_y = a / p.y + b / q.y;
    const real x_over_y = a * p.x / p.y + b * q.x / q.y;
    return HalfPlanePoint{x_over_y / inv_y, 1 / inv_y};
}

bool HalfPlaneSpace::contains(const Point& p) const {
    const auto* h = std::get_if<HalfPlanePoint>(&p);
    return h && std::isfinite(h->x) && std::isfinite(h->y) && h->y > 0;
}

Sampler HalfPlaneSpace::default_sampler() const {
    return [](Rng& rng) -> Point {
        std::uniform_real_distribution<double> xs(-3.0, 3.0);
        std::uniform_real_distribution<double> log_y(-2.0, 2.0);
        const real x = xs(rng);
        return HalfPlanePoint{x, std::exp(static_cast<real>(log_y(rng)))};
    };
}

std::string HalfPlaneSpace::format(const Point& p, int digits) const {
    const auto& h = as_halfplane(p);
    return format_fixed(h.x, digits) + ";" + format_fixed(h.y, digits);
}

Point HalfPlaneSpace::parse(std::string_view text) const {
    auto parts = split(text, text.find(';') != std::string_view::npos ? ';' : ',');
    if (parts.size() != 2) throw ConfigError("half-plane point must look like x,y");
    HalfPlanePoint h{parse_real(parts[0]), parse_real(parts[1])};
    if (!(h.y > 0)) throw InvalidPoint("half-plane point needs y > 0");
    return h;
}

// ---------------------------------------------------------------------------
// Broken demo

real BrokenDemoSpace::distance(const Point& a, const Point& b) const { return plane_.distance(a, b); }

Point BrokenDemoSpace::geodesic(const Point&, const Point& y, real) const { return y; }

bool BrokenDemoSpace::contains(const Point& p) const { return plane_.contains(p); }

Sampler BrokenDemoSpace::default_sampler() const { return plane_.default_sampler(); }

std::string BrokenDemoSpace::format(const Point& p, int digits) const { return plane_.format(p, digits); }

Point BrokenDemoSpace::parse(std::string_view text) const { return plane_.parse(text); }

SpacePtr make_space(std::string_view name) {
    if (name == "tripod") return std::make_shared<TripodSpace>();
    if (name == "halfplane") return std::make_shared<HalfPlaneSpace>();
    if (name == "broken-demo") return std::make_shared<BrokenDemoSpace>();
    constexpr std::string_view prefix = "euclidean:";
    if (name.substr(0, prefix.size()) == prefix) {
        const real dim = parse_real(name.substr(prefix.size()));
        if (dim != std::floor(dim)) throw ConfigError("euclidean dimension must be an integer");
        return std::make_shared<EuclideanSpace>(static_cast<int>(dim));
    }
    throw ConfigError("unknown space '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Convex subsets

ConvexSubset ConvexSubset::whole(SpacePtr space) {
    ConvexSubset e;
    e.name = space->name();
    e.contains = [space](const Point& p, real) { return space->contains(p); };
    e.sampler = space->default_sampler();
    return e;
}

ConvexSubset ConvexSubset::box(int dim, real lo, real hi) {
    if (!(lo <= hi)) throw ConfigError("box needs lo <= hi");
    ConvexSubset e;
    e.name = "box[" + format_fixed(lo, 3) + "," + format_fixed(hi, 3) + "]^" + std::to_string(dim);
    e.contains = [dim, lo, hi](const Point& p, real slack) {
        const auto* v = std::get_if<Vector>(&p);
        if (!v || v->size() != dim) return false;
        return (v->array() >= lo - slack).all() && (v->array() <= hi + slack).all();
    };
    e.sampler = [dim, lo, hi](Rng& rng) -> Point {
        std::uniform_real_distribution<long double> coord(lo, hi);
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = coord(rng);
        return v;
    };
    return e;
}

ConvexSubset ConvexSubset::euclidean_ball(Vector center, real radius) {
    ConvexSubset e;
    e.name = "ball(" + format_fixed(radius, 3) + ")";
    e.contains = [center, radius](const Point& p, real slack) {
        const auto* v = std::get_if<Vector>(&p);
        return v && v->size() == center.size() && (*v - center).norm() <= radius + slack;
    };
    e.sampler = [center, radius](Rng& rng) -> Point {
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Vector dir(center.size());
        for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = gauss(rng);
        const real n = dir.norm();
        if (n == 0) return center;
        const real r = radius * std::pow(static_cast<real>(unit(rng)), real{1} / static_cast<real>(center.size()));
        return Vector(center + dir * (r / n));
    };
    return e;
}

ConvexSubset ConvexSubset::tripod_ball(real radius) {
    ConvexSubset e;
    e.name = "tripod-ball(" + format_fixed(radius, 3) + ")";
    e.contains = [radius](const Point& p, real slack) {
        const auto* t = std::get_if<TripodPoint>(&p);
        return t && t->radius >= 0 && t->radius <= radius + slack;
    };
    e.sampler = [radius](Rng& rng) -> Point {
        std::uniform_int_distribution<int> ray(0, TripodSpace::kRays - 1);
        std::uniform_real_distribution<long double> r(0, radius);
        const int k = ray(rng);
        return make_tripod_point(k, r(rng));
    };
    return e;
}

ConvexSubset ConvexSubset::halfplane_ball(HalfPlanePoint center, real radius) {
    ConvexSubset e;
    e.name = "halfplane-ball(" + format_fixed(radius, 3) + ")";
    auto space = std::make_shared<HalfPlaneSpace>();
    e.contains = [space, center, radius](const Point& p, real slack) {
        return space->contains(p) && space->distance(p, center) <= radius + slack;
    };
    // Rejection from the Euclidean bounding box of the hyperbolic disc:
    // its Euclidean centre is (cx, cy cosh r), Euclidean radius cy sinh r.
    e.sampler = [space, center, radius](Rng& rng) -> Point {
        const real ec = center.y * std::cosh(radius);
        const real er = center.y * std::sinh(radius);
        std::uniform_real_distribution<long double> xs(center.x - er, center.x + er);
        std::uniform_real_distribution<long double> ys(ec - er, ec + er);
        while (true) {
            HalfPlanePoint h{xs(rng), ys(rng)};
            if (h.y > 0 && space->distance(h, center) <= radius) return h;
        }
    };
    return e;
}

// ---------------------------------------------------------------------------
// Axiom checks

bool AxiomReport::passed() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const AxiomResult& r) { return r.pass; });
}

const AxiomResult& AxiomReport::row(std::string_view axiom) const {
    for (const auto& r : rows) {
        if (r.axiom == axiom) return r;
    }
    throw Error("no axiom row named '" + std::string(axiom) + "'");
}

std::vector<AxiomSample> draw_axiom_samples(const Space& space, const Sampler& sampler, std::size_t n,
                                            std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto weight = [&] {
        // Endpoints and the midpoint are where branchy W implementations break.
        const double pick = unit(rng);
        if (pick < 0.04) return real{0};
        if (pick < 0.08) return real{1};
        if (pick < 0.10) return real{0.5};
        return static_cast<real>(unit(rng));
    };
    auto draw = [&] {
        Point p = sampler(rng);
        space.validate(p);
        return p;
    };
    std::vector<AxiomSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        AxiomSample s;
        s.x = draw();
        // Occasionally repeat a point to exercise the degenerate x = y path.
        s.y = unit(rng) < 0.02 ? s.x : draw();
        s.z = draw();
        s.w = draw();
        s.u = draw();
        s.lambda = weight();
        s.mu = weight();
        samples.push_back(std::move(s));
    }
    return samples;
}

AxiomReport check_axioms(const Space& space, const std::vector<AxiomSample>& samples, real tol, Exec exec) {
    if (samples.empty()) throw Error("check_axioms: need at least one sample");
    if (!(tol > 0)) throw Error("check_axioms: tolerance must be positive");
    const auto n = samples.size();
    const Space& s = space;

    const auto metric = max_reduce(exec, n, [&](std::size_t i) {
        const auto& t = samples[i];
        const real self = s.distance(t.x, t.x);
        const real sym = std::abs(s.distance(t.x, t.y) - s.distance(t.y, t.x));
        const real tri = positive_part(s.distance(t.x, t.z) - s.distance(t.x, t.y) - s.distance(t.y, t.z));
        return std::max({self, sym, tri});
    });
    const auto ax1 = max_reduce(exec, n, [&](std::size_t i) {
        const auto& t = samples[i];
        const Point m = s.geodesic(t.x, t.y, t.lambda);
        return positive_part(s.distance(t.u, m) - (1 - t.lambda) * s.distance(t.u, t.x) -
                             t.lambda * s.distance(t.u, t.y));
    });
    const auto ax2 = max_reduce(exec, n, [&](std::size_t i) {
        const auto& t = samples[i];
        const Point a = s.geodesic(t.x, t.y, t.lambda);
        const Point b = s.geodesic(t.x, t.y, t.mu);
        return std::abs(s.distance(a, b) - std::abs(t.lambda - t.mu) * s.distance(t.x, t.y));
    });
    const auto ax3 = max_reduce(exec, n, [&](std::size_t i) {
        const auto& t = samples[i];
        return s.distance(s.geodesic(t.x, t.y, t.lambda), s.geodesic(t.y, t.x, 1 - t.lambda));
    });
    const auto ax4 = max_reduce(exec, n, [&](std::size_t i) {
        const auto& t = samples[i];
        const Point a = s.geodesic(t.x, t.z, t.lambda);
        const Point b = s.geodesic(t.y, t.w, t.lambda);
        return positive_part(s.distance(a, b) - (1 - t.lambda) * s.distance(t.x, t.y) -
                             t.lambda * s.distance(t.z, t.w));
    });

    AxiomReport report;
    report.n_samples = n;
    report.tolerance = tol;
    const std::array<std::pair<const char*, MaxTracker>, 5> named{{
        {"metric", metric}, {"i", ax1}, {"ii", ax2}, {"iii", ax3}, {"iv", ax4}}};
    for (std::size_t k = 0; k < named.size(); ++k) {
        auto& row = report.rows[k];
        row.axiom = named[k].first;
        row.max_violation = named[k].second.value;
        row.worst_sample = named[k].second.where();
        row.pass = row.max_violation <= tol;
    }
    return report;
}

AxiomReport check_axioms(const Space& space, const Sampler& sampler, std::size_t n_samples, real tol,
                         std::uint64_t seed, Exec exec) {
    if (n_samples < 1) throw Error("check_axioms: need at least one sample");
    return check_axioms(space, draw_axiom_samples(space, sampler, n_samples, seed), tol, exec);
}

}  // namespace wfix
