#include <gtest/gtest.h>

#include <unordered_map>

#include "dhrg/dhrg.hpp"
#include "reference_oracles.hpp"

using namespace dhrg;

TEST(TileDistance, Trivial) {
    for (const auto& rules : {TilingRules::g710(), TilingRules::g810()}) {
        Tessellation tes(rules);
        for (Tile* t : oracle::ball(tes, 4)) {
            EXPECT_EQ(tile_distance(tes, t, t), 0);
            EXPECT_EQ(delta0(t), tile_distance(tes, t, tes.root()));
            for (int i = 0; i < tes.p(); ++i) EXPECT_EQ(tile_distance(tes, t, tes.adj(t, i)), 1);
        }
        EXPECT_EQ(delta0(tes.root()), 0);
        EXPECT_EQ(delta0(tes.resolve_address(address_from_string("0/0"))), 2);
    }
}

TEST(TileDistance, SegmentGapTwoIsNeeded) {
    // 6/2 and 0/1 are both adjacent to the shared type-2 tile 0/0 but their
    // parents are not adjacent; two sibling steps are needed on one layer.
    Tessellation tes(TilingRules::g710());
    Tile* a = tes.resolve_address({6, 2});
    Tile* b = tes.resolve_address({0, 1});
    EXPECT_EQ(oracle::bfs_distance(tes, a, b), 2);
    EXPECT_EQ(tile_distance(tes, a, b), 2);
    EXPECT_EQ(tile_distance(tes, a, b, 1), 3);
}

TEST(TileDistance, Delta0IsBfsDepth) {
    Tessellation tes(TilingRules::g710());
    const auto dist = oracle::bfs_from(tes, tes.root(), 7);
    for (auto [t, d] : dist) EXPECT_EQ(delta0(t), d);
}

// Full equivalence on the radius-6 / radius-5 balls lives in the acceptance
// binary; here a smaller ball keeps the unit suite fast.
TEST(TileDistance, MatchesBfsOnBall) {
    for (const auto& [rules, radius] : {std::pair{TilingRules::g710(), 4}, std::pair{TilingRules::g810(), 4}}) {
        Tessellation tes(rules);
        const auto ball = oracle::ball(tes, radius);
        for (Tile* a : ball) {
            const auto dist = oracle::bfs_from(tes, a, radius + 2);
            for (Tile* b : ball) ASSERT_EQ(tile_distance(tes, a, b), dist.at(b)) << rules.name;
        }
    }
}

TEST(TileDistance, MetricProperties) {
    for (const auto& rules : {TilingRules::g710(), TilingRules::g810()}) {
        Tessellation tes(rules);
        TileSampler sampler(tes, 10, 0.5);
        Rng rng(17);
        for (int k = 0; k < 100000; ++k) {
            Tile* a = sampler(rng);
            Tile* b = sampler(rng);
            const int d = tile_distance(tes, a, b);
            ASSERT_EQ(d, tile_distance(tes, b, a));
            ASSERT_GE(d, std::abs(a->layer - b->layer));
            ASSERT_LE(d, a->layer + b->layer);
        }
        for (int k = 0; k < 10000; ++k) {
            Tile* a = sampler(rng);
            Tile* b = sampler(rng);
            Tile* c = sampler(rng);
            ASSERT_LE(tile_distance(tes, a, c), tile_distance(tes, a, b) + tile_distance(tes, b, c));
        }
    }
}

TEST(TileDistance, NeighbourStepChangesByAtMostOne) {
    for (const auto& rules : {TilingRules::g710(), TilingRules::g810()}) {
        Tessellation tes(rules);
        TileSampler sampler(tes, 10, 0.5);
        Rng rng(23);
        for (int k = 0; k < 5000; ++k) {
            Tile* a = sampler(rng);
            Tile* target = sampler(rng);
            const int d = tile_distance(tes, a, target);
            bool closer = false;
            for (int i = 0; i < tes.p(); ++i) {
                const int e = tile_distance(tes, tes.adj(a, i), target);
                ASSERT_LE(std::abs(e - d), 1);
                closer = closer || e < d;
            }
            if (d > 0) ASSERT_TRUE(closer);
        }
    }
}
