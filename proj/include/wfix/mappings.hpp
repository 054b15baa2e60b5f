#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfix/core.hpp"
#include "wfix/parallel.hpp"
#include "wfix/wspace.hpp"

namespace wfix {

using Matrix = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxEuclideanDim,
                             kMaxEuclideanDim>;

/// The comparison function phi in d(Tx,Ty) <= delta d(x,y) + phi(d(x,Tx)).
/// Closed family: zero, L t, c t^q (q >= 1), or monotone piecewise-linear
/// through tabulated knots (linear extrapolation past the last knot).
class Phi {
public:
    enum class Kind { zero, linear, power, tabulated };

    static Phi zero();
    static Phi linear(real slope);
    static Phi power(real scale, real exponent);
    /// Knots must start at (0, 0) with strictly increasing t.
    static Phi tabulated(std::vector<std::pair<real, real>> knots);

    real operator()(real t) const;

    Kind kind() const noexcept { return kind_; }
    std::string describe() const;

private:
    Kind kind_ = Kind::zero;
    real scale_ = 0;
    real exponent_ = 1;
    std::vector<std::pair<real, real>> knots_;
};

struct PhiCheck {
    bool zero_at_origin = false;
    bool strictly_increasing = false;
    /// phi == 0: admitted (only phi(0) enters the convergence estimates)
    /// but flagged, since it is not strictly increasing.
    bool degenerate_zero = false;

    bool admissible() const noexcept { return zero_at_origin && (strictly_increasing || degenerate_zero); }
};

/// Exact monotonicity test on `grid` equispaced points of [0, t_max].
PhiCheck check_phi(const Phi& phi, real t_max = 10, std::size_t grid = 1000);

struct AffineMap {
    Matrix a;
    Vector b;
};

using PointMap = std::function<Point(const Point&)>;

/// A self-map with its contractive-like certificate (delta, phi).
struct ContractiveLike {
    std::string name;
    PointMap apply;
    real delta = 0;
    Phi phi;
    std::optional<Point> fixed_point;
    /// Present when the map is x -> A x + b on R^n.
    std::optional<AffineMap> affine;
    /// Region the map sends into itself; verification samples from here.
    ConvexSubset domain;

    Point operator()(const Point& x) const { return apply(x); }
};

/// Validates the certificate: delta in [0,1), phi admissible.
ContractiveLike make_contractive_like(std::string name, PointMap apply, real delta, Phi phi,
                                      ConvexSubset domain, std::optional<Point> fixed_point = std::nullopt);

struct ZamfirescuCertificate {
    real a = 0;
    real b = 0;
    real c = 0;
};

/// max{a, b/(1-b), c/(1-c)}; requires 0<a<1 and 0<b,c<1/2.
real zamfirescu_delta(const ZamfirescuCertificate& cert);

struct OsilikeUdomeneCertificate {
    real delta = 0;
    real lipschitz = 0;
};

/// phi(t) = L t, or the flagged zero function when L = 0.
Phi phi_for(const OsilikeUdomeneCertificate& cert);

/// S with sup_x d(Tx, Sx) <= epsilon.
struct ApproximateOperator {
    std::string name;
    PointMap apply;
    real epsilon = 0;
    std::optional<Point> fixed_point;
    std::optional<AffineMap> affine;

    Point operator()(const Point& x) const { return apply(x); }
};

// ---------------------------------------------------------------------------
// Sample-based verification

struct PairSample {
    Point x;
    Point y;
};

std::vector<PairSample> draw_pairs(const Space& space, const Sampler& sampler, std::size_t n,
                                   std::uint64_t seed);

struct VerificationReport {
    real max_violation = 0;
    std::optional<PairSample> worst;
    std::size_t n_samples = 0;
    real tolerance = 0;
    bool pass = true;
};

/// Max positive part of d(Tx,Ty) - delta d(x,y) - phi(d(x,Tx)).
VerificationReport verify_contractive_like(const Space& space, const ContractiveLike& t,
                                           const std::vector<PairSample>& pairs, real tol,
                                           Exec exec = Exec::parallel);
VerificationReport verify_contractive_like(const Space& space, const ContractiveLike& t, std::size_t n_samples,
                                           real tol, std::uint64_t seed = 1, Exec exec = Exec::parallel);

struct ApproximationReport {
    real max_distance = 0;
    real epsilon = 0;
    std::optional<Point> worst;
    std::size_t n_samples = 0;
    bool pass = true;
};

ApproximationReport verify_approximate(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                                       const std::vector<Point>& points, real tol = 0,
                                       Exec exec = Exec::parallel);
ApproximationReport verify_approximate(const Space& space, const ContractiveLike& t, const ApproximateOperator& s,
                                       std::size_t n_samples, std::uint64_t seed = 1, real tol = 0,
                                       Exec exec = Exec::parallel);

/// Each pair must satisfy at least one of the three Zamfirescu conditions.
VerificationReport check_zamfirescu(const Space& space, const PointMap& t, const ZamfirescuCertificate& cert,
                                    const std::vector<PairSample>& pairs, real tol, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Built-in corpus

/// x -> x/2 on [0,1]^n, p = 0, delta = 1/2.
ContractiveLike halving_map(const EuclideanSpace& space);

/// x -> A x + b; delta = spectral norm of A, which must be < 1.
ContractiveLike affine_map(const EuclideanSpace& space, Matrix a, Vector b);

/// x -> c, delta = 0.
ContractiveLike constant_map(const EuclideanSpace& space, Vector c);

/// (ray, r) -> (ray, f r), fixed point at the hub.
ContractiveLike tripod_radial_map(real factor);

/// z -> W(i, z, f): geodesic contraction toward i = (0,1). On the line
/// x = 0 it is y -> y^f.
ContractiveLike halfplane_contraction(real factor);

/// Resolves `halving`, `affine:<A>[+<b>]`, `constant:<c>`,
/// `tripod-radial:<f>`, `halfplane-contract:<f>` against a space.
/// A is a scalar (times identity) or rows separated by ';' with entries by ','.
ContractiveLike make_mapping(std::string_view spec, const SpacePtr& space);

/// S = T shifted by `offset`: a vector (or broadcast scalar) on R^n, an
/// outward radial shift on the tripod, a vertical log-shift on the
/// half-plane. epsilon is the exact sup-distance of the shift.
ApproximateOperator perturb(const Space& space, const ContractiveLike& base, std::string_view offset);

/// Resolves `perturb:<base>:<offset>`.
ApproximateOperator make_approximate(std::string_view spec, const SpacePtr& space, ContractiveLike* base_out = nullptr);

}  // namespace wfix
