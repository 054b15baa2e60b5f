#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wfix/core.hpp"
#include "wfix/parallel.hpp"

namespace wfix {

inline constexpr int kMaxEuclideanDim = 16;

/// Coordinates in R^n. Fixed capacity, so no heap traffic in long runs.
using Vector = Eigen::Matrix<real, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxEuclideanDim, 1>;

/// A point on one of the three rays of the tripod. The hub is stored
/// canonically as ray 0 with radius 0.
struct TripodPoint {
    int ray = 0;
    real radius = 0;
};

/// Upper half-plane point, y > 0.
struct HalfPlanePoint {
    real x = 0;
    real y = 1;
};

using Point = std::variant<Vector, TripodPoint, HalfPlanePoint>;

Point scalar_point(real v);
Vector make_vector(std::initializer_list<real> coords);
TripodPoint make_tripod_point(int ray, real radius);

using Rng = std::mt19937_64;
using Sampler = std::function<Point(Rng&)>;

/// A metric space with a convexity mapping W. Implementations satisfy
/// d(u, W(x,y,l)) <= (1-l) d(u,x) + l d(u,y): weight (1-l) on the first
/// argument, so W(x,y,0) = x and W(x,y,1) = y.
class Space {
public:
    virtual ~Space() = default;

    virtual std::string name() const = 0;

    virtual real distance(const Point& a, const Point& b) const = 0;

    /// W(x, y, lambda) without domain checks; see interpolate() for the
    /// checked entry point.
    virtual Point geodesic(const Point& x, const Point& y, real lambda) const = 0;

    virtual bool contains(const Point& p) const = 0;

    /// Bounded region used by axiom checks and default verification.
    virtual Sampler default_sampler() const = 0;

    virtual std::string format(const Point& p, int digits) const = 0;

    /// Inverse of format() up to rounding.
    virtual Point parse(std::string_view text) const = 0;

    /// Throws InvalidPoint if p is not in the domain.
    void validate(const Point& p) const;
};

using SpacePtr = std::shared_ptr<const Space>;

/// Checked W(x, y, lambda).
Point interpolate(const Space& space, const Point& x, const Point& y, real lambda);

class EuclideanSpace final : public Space {
public:
    explicit EuclideanSpace(int dim);

    int dim() const noexcept { return dim_; }

    std::string name() const override;
    real distance(const Point& a, const Point& b) const override;
    Point geodesic(const Point& x, const Point& y, real lambda) const override;
    bool contains(const Point& p) const override;
    Sampler default_sampler() const override;
    std::string format(const Point& p, int digits) const override;
    Point parse(std::string_view text) const override;

private:
    int dim_;
};

/// Three rays glued at a hub with the path metric: same ray |r-s|,
/// different rays r+s.
class TripodSpace final : public Space {
public:
    static constexpr int kRays = 3;

    std::string name() const override { return "tripod"; }
    real distance(const Point& a, const Point& b) const override;
    Point geodesic(const Point& x, const Point& y, real lambda) const override;
    bool contains(const Point& p) const override;
    Sampler default_sampler() const override;
    std::string format(const Point& p, int digits) const override;
    Point parse(std::string_view text) const override;
};

/// Poincare upper half-plane, curvature -1.
class HalfPlaneSpace final : public Space {
public:
    std::string name() const override { return "halfplane"; }
    real distance(const Point& a, const Point& b) const override;
    Point geodesic(const Point& x, const Point& y, real lambda) const override;
    bool contains(const Point& p) const override;
    Sampler default_sampler() const override;
    std::string format(const Point& p, int digits) const override;
    Point parse(std::string_view text) const override;
};

/// Euclidean R^2 with W(x,y,l) := y. Violates the convexity axioms on
/// purpose; exists to exercise the checker.
class BrokenDemoSpace final : public Space {
public:
    std::string name() const override { return "broken-demo"; }
    real distance(const Point& a, const Point& b) const override;
    Point geodesic(const Point& x, const Point& y, real lambda) const override;
    bool contains(const Point& p) const override;
    Sampler default_sampler() const override;
    std::string format(const Point& p, int digits) const override;
    Point parse(std::string_view text) const override;

private:
    EuclideanSpace plane_{2};
};

/// Resolves `euclidean:<dim>`, `tripod`, `halfplane`, `broken-demo`.
SpacePtr make_space(std::string_view name);

/// Convex subset E of a space: W(x,y,l) stays in E for x, y in E.
/// `contains` accepts a slack for floating-point roundoff.
struct ConvexSubset {
    std::string name;
    std::function<bool(const Point&, real slack)> contains;
    Sampler sampler;

    static ConvexSubset whole(SpacePtr space);
    static ConvexSubset box(int dim, real lo, real hi);
    static ConvexSubset euclidean_ball(Vector center, real radius);
    static ConvexSubset tripod_ball(real radius);
    static ConvexSubset halfplane_ball(HalfPlanePoint center, real radius);
};

// ---------------------------------------------------------------------------
// Axiom checking

struct AxiomSample {
    Point x, y, z, w, u;
    real lambda = 0;
    real mu = 0;
};

struct AxiomResult {
    std::string axiom;
    real max_violation = 0;
    std::optional<std::size_t> worst_sample;
    bool pass = true;
};

/// Rows: metric, (i), (ii), (iii), (iv). Inequalities report the positive
/// part of LHS-RHS, equalities the absolute deviation.
struct AxiomReport {
    std::array<AxiomResult, 5> rows;
    std::size_t n_samples = 0;
    real tolerance = 0;

    bool passed() const noexcept;
    const AxiomResult& row(std::string_view axiom) const;
};

/// Draws n tuples; throws InvalidPoint if the sampler leaves the domain.
std::vector<AxiomSample> draw_axiom_samples(const Space& space, const Sampler& sampler,
                                            std::size_t n, std::uint64_t seed);

AxiomReport check_axioms(const Space& space, const std::vector<AxiomSample>& samples,
                         real tol, Exec exec = Exec::parallel);

AxiomReport check_axioms(const Space& space, const Sampler& sampler, std::size_t n_samples,
                         real tol, std::uint64_t seed = 1, Exec exec = Exec::parallel);

}  // namespace wfix
