#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dhrg/hypgeom.hpp"
#include "dhrg/random.hpp"
#include "dhrg/tessellation.hpp"

using namespace dhrg;

namespace {

double constraint(const HPoint& p) { return p.z * p.z - p.x * p.x - p.y * p.y; }

Isometry random_isometry(Rng& rng) {
    return compose(rotate(2 * std::numbers::pi * uniform01(rng)),
                   compose(translate_x(3 * uniform01(rng) - 1.5), rotate(2 * std::numbers::pi * uniform01(rng))));
}

HPoint random_point(Rng& rng, double rmax = 5) {
    return polar_point(rmax * uniform01(rng), 2 * std::numbers::pi * uniform01(rng));
}

}  // namespace

TEST(Hdist, Basics) {
    EXPECT_EQ(hdist(kOrigin, kOrigin), 0.0);
    for (double phi : {0.0, 1.0, 4.0}) EXPECT_NEAR(hdist(kOrigin, polar_point(2.5, phi)), 2.5, 1e-9);
    EXPECT_NEAR(hdist(apply(translate_x(2.0), kOrigin), kOrigin), 2.0, 1e-9);
}

TEST(PolarPoint, Values) {
    const HPoint o = polar_point(0.0, 1.7);
    EXPECT_DOUBLE_EQ(o.x, 0);
    EXPECT_DOUBLE_EQ(o.y, 0);
    EXPECT_DOUBLE_EQ(o.z, 1);
    const HPoint p = polar_point(1.0, 0.0);
    EXPECT_NEAR(p.x, 1.175201, 1e-6);
    EXPECT_NEAR(p.y, 0, 1e-12);
    EXPECT_NEAR(p.z, 1.543081, 1e-6);
    EXPECT_NEAR(hdist(polar_point(3.0, 0.7), kOrigin), 3, 1e-9);
}

TEST(Isometry, PrintedMatrices) {
    const HPoint r = apply(rotate(0.8), kOrigin);
    EXPECT_NEAR(r.x, 0, 1e-15);
    EXPECT_NEAR(r.z, 1, 1e-15);
    const HPoint t = apply(translate_x(1.0), kOrigin);
    EXPECT_NEAR(t.x, std::sinh(1.0), 1e-12);
    EXPECT_NEAR(t.y, 0, 1e-12);
    EXPECT_NEAR(t.z, std::cosh(1.0), 1e-12);
    const HPoint p = polar_point(1.3, 2.2);
    const HPoint q = apply(compose(translate_x(1.0), translate_x(-1.0)), p);
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
    EXPECT_NEAR(q.z, p.z, 1e-9);
    // rotate(a) moves angle phi to phi - a
    EXPECT_NEAR(to_polar(apply(rotate(0.5), polar_point(1.0, 1.0))).phi, 0.5, 1e-12);
}

TEST(Isometry, InverseUndoes) {
    Rng rng(3);
    for (int k = 0; k < 100; ++k) {
        const Isometry m = random_isometry(rng);
        const HPoint p = random_point(rng);
        EXPECT_NEAR(hdist(apply(inverse(m), apply(m, p)), p), 0, 1e-7);
    }
}

TEST(Isometry, LongChainsStayOnHyperboloid) {
    Rng rng(11);
    HPoint p = random_point(rng, 1);
    for (int k = 0; k < 1000; ++k) {
        p = apply(random_isometry(rng), p);
        // keep the point near the origin so that the chain is not a pure boost
        if (hdist(p, kOrigin) > 5) p = apply(translate_x(-hdist(p, kOrigin) + 1), apply(rotate(to_polar(p).phi), p));
        ASSERT_GT(p.z, 0);
        ASSERT_NEAR(constraint(p), 1, 1e-9);
    }
}

TEST(Hdist, MetricProperties) {
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const HPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
        EXPECT_NEAR(hdist(a, b), hdist(b, a), 1e-9);
        EXPECT_LE(hdist(a, c), hdist(a, b) + hdist(b, c) + 1e-9);
        const Isometry m = random_isometry(rng);
        EXPECT_NEAR(hdist(apply(m, a), apply(m, b)), hdist(a, b), 1e-9 * std::max(1.0, hdist(a, b)));
    }
}

TEST(PolarDistance, AgreesWithHdist) {
    Rng rng(8);
    for (int k = 0; k < 1000; ++k) {
        const PolarCoord a{4 * uniform01(rng), 6 * uniform01(rng)}, b{4 * uniform01(rng), 6 * uniform01(rng)};
        EXPECT_NEAR(polar_distance(a, b), hdist(polar_point(a), polar_point(b)), 1e-8);
    }
    // far from the origin the acosh form loses everything; the polar one does not
    const PolarCoord a{30, 1.0}, b{30, 1.0 + 1e-12};
    EXPECT_NEAR(polar_distance(a, b), 2 * std::asinh(std::sinh(30.0) * std::sin((b.phi - a.phi) / 2)), 1e-9);
}

TEST(Poincare, Projection) {
    const auto [x0, y0] = to_poincare(kOrigin);
    EXPECT_EQ(x0, 0);
    EXPECT_EQ(y0, 0);
    for (double r : {0.5, 2.0, 7.0}) EXPECT_NEAR(to_poincare(polar_point(r, 0.0)).first, std::tanh(r / 2), 1e-12);
    const auto [x, y] = to_poincare(polar_point(20.0, 1.3));
    EXPECT_LT(std::hypot(x, y), 1);
}

TEST(TilingEdgeLength, Values) {
    EXPECT_NEAR(tiling_edge_length(7), 1.09054966, 1e-6);
    EXPECT_THROW(tiling_edge_length(6), std::invalid_argument);
    // cross-check: two adjacent G810 tiles placed by isometries
    Tessellation tes(TilingRules::g810());
    Tile* a = tes.child(tes.root(), 3);
    EXPECT_NEAR(hdist(tes.tile_center(tes.root()), tes.tile_center(a)), tiling_edge_length(8), 1e-12);
    Tile* b = tes.child(a, 1);
    EXPECT_NEAR(hdist(tes.tile_center(a), tes.tile_center(b)), tiling_edge_length(8), 1e-9);
    EXPECT_NEAR(hdist(tes.tile_center(a), tes.tile_center(tes.right_sibling(a))), tiling_edge_length(8), 1e-9);
    EXPECT_NEAR(tiling_edge_length(8), 1.5285709194, 1e-9);
}
