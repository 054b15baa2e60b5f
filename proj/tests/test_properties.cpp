#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "wfix/bounds.hpp"
#include "wfix/experiments.hpp"
#include "wfix/mappings.hpp"
#include "wfix/schemes.hpp"

using namespace wfix;

namespace {

// Seeded generators; a failing case is reproducible from the printed seed.
struct Gen {
    Rng rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    real uniform(real lo, real hi) { return std::uniform_real_distribution<real>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Schedule schedule() {
        switch (integer(0, 2)) {
            case 0:
                return Schedule::harmonic();
            case 1:
                return Schedule::constant(uniform(0.05L, 0.95L), uniform(0.05L, 0.95L));
            default:
                return Schedule::power(uniform(0.3L, 1), uniform(0.3L, 2));
        }
    }

    Matrix contraction(int dim, real max_norm) {
        Matrix a(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) a(i, j) = uniform(-1, 1);
        }
        const real norm = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
        return a * (uniform(0.05L, max_norm) / norm);
    }
};

constexpr int kCases = 200;

}  // namespace

TEST(Property, EuclideanSwapSymmetry) {
    Gen g(101);
    EuclideanSpace space(3);
    auto sampler = space.default_sampler();
    for (int i = 0; i < kCases; ++i) {
        const Point x = sampler(g.rng), y = sampler(g.rng);
        const real dyadic = static_cast<real>(g.integer(0, 64)) / 64;
        EXPECT_EQ(space.distance(interpolate(space, x, y, dyadic), interpolate(space, y, x, 1 - dyadic)), 0);
        const real lambda = g.uniform(0, 1);
        EXPECT_LE(space.distance(interpolate(space, x, y, lambda), interpolate(space, y, x, 1 - lambda)), 1e-15L);
    }
}

TEST(Property, GeodesicParameterIsArcLength) {
    for (const char* name : {"euclidean:2", "tripod", "halfplane"}) {
        Gen g(202);
        auto space = make_space(name);
        auto sampler = space->default_sampler();
        for (int i = 0; i < kCases; ++i) {
            const Point x = sampler(g.rng), y = sampler(g.rng);
            const real l = g.uniform(0, 1), m = g.uniform(0, 1);
            const real d = space->distance(interpolate(*space, x, y, l), interpolate(*space, x, y, m));
            EXPECT_NEAR(d, std::abs(l - m) * space->distance(x, y), 1e-9L) << name << " case " << i;
            const real swapped = space->distance(interpolate(*space, x, y, l), interpolate(*space, y, x, 1 - l));
            EXPECT_LE(swapped, 1e-9L) << name;
        }
    }
}

TEST(Property, ConvexSubsetClosure) {
    const std::vector<std::pair<SpacePtr, ConvexSubset>> sets{
        {make_space("euclidean:3"), ConvexSubset::box(3, 0, 1)},
        {make_space("euclidean:2"), ConvexSubset::euclidean_ball(make_vector({1, -1}), 2)},
        {make_space("tripod"), ConvexSubset::tripod_ball(1.5L)},
        {make_space("halfplane"), ConvexSubset::halfplane_ball({0.5L, 2}, 1)},
    };
    for (const auto& [space, set] : sets) {
        Gen g(303);
        for (int i = 0; i < 10000; ++i) {
            const Point x = set.sampler(g.rng), y = set.sampler(g.rng);
            ASSERT_TRUE(set.contains(x, 0)) << set.name;
            const Point z = interpolate(*space, x, y, g.uniform(0, 1));
            ASSERT_TRUE(set.contains(z, 1e-12L)) << set.name << " case " << i;
        }
    }
}

TEST(Property, ZamfirescuDeltaMonotone) {
    Gen g(404);
    for (int i = 0; i < kCases; ++i) {
        ZamfirescuCertificate c{g.uniform(0.01L, 0.98L), g.uniform(0.01L, 0.48L), g.uniform(0.01L, 0.48L)};
        const real base = zamfirescu_delta(c);
        auto bumped = c;
        bumped.a = std::min<real>(0.99L, c.a + g.uniform(0, 0.2L));
        EXPECT_GE(zamfirescu_delta(bumped), base);
        bumped = c;
        bumped.b = std::min<real>(0.49L, c.b + g.uniform(0, 0.2L));
        EXPECT_GE(zamfirescu_delta(bumped), base);
        bumped = c;
        bumped.c = std::min<real>(0.49L, c.c + g.uniform(0, 0.2L));
        EXPECT_GE(zamfirescu_delta(bumped), base);
    }
}

TEST(Property, ZamfirescuImpliesContractiveLike) {
    Gen g(505);
    EuclideanSpace line(1);
    const Sampler unit = [](Rng& rng) -> Point {
        return scalar_point(std::uniform_real_distribution<real>(0, 1)(rng));
    };
    int checked = 0;
    for (int i = 0; i < kCases; ++i) {
        // Piecewise maps of [0,1] with a jump at `cut`; some are Zamfirescu, some not.
        const real cut = g.uniform(0.2L, 0.8L), s1 = g.uniform(0, 0.6L), s2 = g.uniform(0, 0.6L);
        const real c2 = g.uniform(0, 0.3L);
        PointMap t = [=](const Point& p) {
            const real x = std::get<Vector>(p)(0);
            return scalar_point(x < cut ? s1 * x : s2 * x + c2);
        };
        const ZamfirescuCertificate cert{g.uniform(0.05L, 0.95L), g.uniform(0.05L, 0.45L), g.uniform(0.05L, 0.45L)};
        const auto pairs = draw_pairs(line, unit, 500, 1000 + i);
        if (!check_zamfirescu(line, t, cert, pairs, 0).pass) continue;
        ++checked;
        const real delta = zamfirescu_delta(cert);
        const auto cl = make_contractive_like("z", t, delta, Phi::linear(2 * delta), ConvexSubset::box(1, 0, 1));
        EXPECT_TRUE(verify_contractive_like(line, cl, pairs, 1e-15L).pass) << "case " << i;
    }
    EXPECT_GT(checked, 20);
}

TEST(Property, VerificationMonotoneInDelta) {
    Gen g(606);
    EuclideanSpace plane(2);
    for (int i = 0; i < 50; ++i) {
        auto t = affine_map(plane, g.contraction(2, 0.95L), make_vector({g.uniform(-1, 1), g.uniform(-1, 1)}));
        const auto pairs = draw_pairs(plane, t.domain.sampler, 300, 2000 + i);
        t.delta = g.uniform(0, 0.99L);
        const bool pass = verify_contractive_like(plane, t, pairs, 1e-12L).pass;
        if (!pass) continue;
        t.delta = g.uniform(t.delta, 0.999L);
        EXPECT_TRUE(verify_contractive_like(plane, t, pairs, 1e-12L).pass);
    }
}

TEST(Property, EnvelopeOrdering) {
    Gen g(707);
    for (int i = 0; i < kCases; ++i) {
        const Schedule s = g.schedule();
        const real delta = g.uniform(0.01L, 0.99L);
        const auto b = bound_sequences(s, delta, 1, 60);
        for (std::size_t k = 1; k < 60; ++k) {
            EXPECT_LE(b.a[k], delta * b.c[k] * (1 + 1e-15L));
            EXPECT_LE(b.c[k], b.b[k] * (1 + 1e-15L));
            EXPECT_GE(b.exp_bound[k], contraction_product(s, delta, 1, k + 1) * (1 - 1e-15L));
        }
    }
}

TEST(Property, SelfComparisonNeverFaster) {
    Gen g(808);
    for (int i = 0; i < kCases; ++i) {
        const auto b = bound_sequences(g.schedule(), g.uniform(0, 0.99L), g.uniform(0.1L, 5), 100);
        EXPECT_NE(berinde_compare(b.a, b.a, 100).verdict, Verdict::faster);
        EXPECT_NE(berinde_compare(b.b, b.b, 100).verdict, Verdict::faster);
    }
}

TEST(Property, TracesStayUnderEnvelopes) {
    const auto d = TableSetup::reference_defaults();
    const auto env = bound_sequences(d.schedule, d.mapping.delta, 1, 50);
    const auto p = d.mapping.fixed_point;
    const auto s = run(*d.space, d.mapping, Scheme::implicit_s, d.schedule, d.x0, 50, d.inner, p).distances();
    const auto i = run(*d.space, d.mapping, Scheme::implicit_ishikawa, d.schedule, d.x0, 50, d.inner, p).distances();
    const auto m = run(*d.space, d.mapping, Scheme::implicit_mann, d.schedule, d.x0, 50, d.inner, p).distances();
    for (std::size_t k = 0; k < 50; ++k) {
        EXPECT_LE(s[k], env.a[k] + 1e-12L);
        EXPECT_LE(i[k], env.c[k] + 1e-12L);
        EXPECT_LE(m[k], env.b[k] + 1e-12L);
    }
}

TEST(Property, ImplicitSContractsTowardFixedPoint) {
    Gen g(909);
    EuclideanSpace plane(2);
    for (int c = 0; c < 40; ++c) {
        const auto t = affine_map(plane, g.contraction(2, 0.9L), make_vector({g.uniform(-1, 1), g.uniform(-1, 1)}));
        const Schedule s = g.schedule();
        const Point x0 = make_vector({g.uniform(-3, 3), g.uniform(-3, 3)});
        const auto trace = run(plane, t, Scheme::implicit_s, s, x0, 60, {}, t.fixed_point);
        const auto dist = trace.distances();
        for (std::size_t k = 1; k < dist.size(); ++k) {
            const std::size_t n = k + 1;
            const real per_step = step_factor(EnvelopeKind::implicit_s, s.alpha(n), s.beta(n), t.delta);
            EXPECT_LE(dist[k], per_step * dist[k - 1] + 1e-12L) << "case " << c << " n=" << n;
            EXPECT_LE(dist[k], (1 - (1 - s.alpha(n)) * (1 - t.delta)) * dist[k - 1] + 1e-12L);
            EXPECT_LE(trace.records[k].residual, 1e-14L);
        }
    }
}

TEST(Property, PicardAgreesWithExactAffine) {
    Gen g(1010);
    for (int c = 0; c < 30; ++c) {
        const int dim = g.integer(1, 4);
        EuclideanSpace space(dim);
        Vector b(dim);
        for (int i = 0; i < dim; ++i) b(i) = g.uniform(-2, 2);
        const auto t = affine_map(space, g.contraction(dim, 0.95L), b);
        const Schedule s = g.schedule();
        InnerSolverConfig exact;
        exact.mode = InnerMode::exact_affine;
        Vector x0(dim);
        for (int i = 0; i < dim; ++i) x0(i) = g.uniform(-3, 3);
        const auto scheme = static_cast<Scheme>(g.integer(0, 2));
        const auto a = run(space, t, scheme, s, x0, 30, {});
        const auto e = run(space, t, scheme, s, x0, 30, exact);
        for (std::size_t k = 0; k < a.records.size(); ++k) {
            EXPECT_LE(space.distance(a.records[k].x, e.records[k].x), 1e-12L) << "case " << c;
        }
    }
}

TEST(Property, OracleAgreement) {
    const auto d = TableSetup::reference_defaults();
    for (Scheme scheme : {Scheme::implicit_s, Scheme::implicit_ishikawa, Scheme::implicit_mann}) {
        RationalOracle oracle(scheme);
        const auto trace = run(*d.space, d.mapping, scheme, d.schedule, d.x0, 50, d.inner);
        for (const auto& rec : trace.records) {
            EXPECT_LE(std::abs(std::get<Vector>(rec.x)(0) - oracle.value(rec.n)), 5e-14L);
        }
    }
}

TEST(Property, SerialMatchesParallelKernels) {
    for (const char* name : {"euclidean:3", "tripod", "halfplane"}) {
        auto space = make_space(name);
        const std::string mapping = space->name() == "tripod"      ? "tripod-radial:0.7"
                                    : space->name() == "halfplane" ? "halfplane-contract:0.7"
                                                                   : "affine:0.6";
        auto t = make_mapping(mapping, space);
        t.delta *= 0.9L;
        const auto pairs = draw_pairs(*space, t.domain.sampler, 5000, 77);
        const auto s = verify_contractive_like(*space, t, pairs, 1e-12L, Exec::serial);
        const auto p = verify_contractive_like(*space, t, pairs, 1e-12L, Exec::parallel);
        EXPECT_EQ(s.max_violation, p.max_violation) << name;
        EXPECT_EQ(s.pass, p.pass);
        ASSERT_EQ(s.worst.has_value(), p.worst.has_value());
        if (s.worst) EXPECT_EQ(space->distance(s.worst->x, p.worst->x), 0);
    }
}
