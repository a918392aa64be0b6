#include <gtest/gtest.h>

#include <cmath>

#include "dhrg/dhrg.hpp"
#include "reference_oracles.hpp"

using namespace dhrg;

namespace {

// Distances along a line: vertex ids are positions.
struct LineMetric {
    double operator()(std::uint32_t a, std::uint32_t b) const { return std::abs(double(a) - double(b)); }
};

}  // namespace

TEST(GreedyRoute, AdjacentAndStar) {
    Graph g(5);
    g.add_edge(0, 1);
    auto r = greedy_route(g, LineMetric{}, 0, 1, 5);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.path.size(), 2u);

    Graph star(5);
    for (std::uint32_t v = 1; v < 5; ++v) star.add_edge(0, v);
    // center at distance 1 from everything, leaves at distance 2 from each other
    auto metric = [](std::uint32_t a, std::uint32_t b) { return a == b ? 0.0 : (a == 0 || b == 0) ? 1.0 : 2.0; };
    r = greedy_route(star, metric, 1, 3, 5);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.path, (std::vector<std::uint32_t>{1, 0, 3}));
    EXPECT_THROW(greedy_route(star, metric, 2, 2, 5), std::invalid_argument);
}

TEST(GreedyRoute, FailsWithoutStrictProgress) {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    auto flat = [](std::uint32_t a, std::uint32_t b) { return a == b ? 0.0 : 1.0; };
    const auto r = greedy_route(g, flat, 0, 2, 3);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.path, (std::vector<std::uint32_t>{0}));
}

TEST(SuccessRate, CompleteAndPath) {
    Graph k(6);
    for (std::uint32_t a = 0; a < 6; ++a)
        for (std::uint32_t b = a + 1; b < 6; ++b) k.add_edge(a, b);
    Rng rng(1);
    auto rep = success_rate(k, [](std::uint32_t, std::uint32_t) { return 1.0; }, 1000, rng);
    EXPECT_EQ(rep.attempts, 30u);
    EXPECT_EQ(rep.success_rate, 1.0);
    EXPECT_EQ(rep.mean_hops, 1.0);

    // path along a geodesic tile sequence, discrete metric
    auto tes = std::make_shared<Tessellation>(TilingRules::g710());
    std::vector<Tile*> tiles{tes->root()};
    while (tiles.size() < 8) tiles.push_back(tes->child(tiles.back(), 1));
    Graph path(8);
    for (std::uint32_t v = 0; v + 1 < 8; ++v) path.add_edge(v, v + 1);
    DiscreteEmbedding emb{tes, {8, 8, 0.1, 0.75}, tiles};
    rep = success_rate(path, DiscreteMetric{&emb}, 1000, rng);
    EXPECT_EQ(rep.success_rate, 1.0);
    EXPECT_EQ(rep.mean_stretch, 1.0);
}

TEST(SuccessRate, DisconnectedPairsAreSkipped) {
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    Rng rng(2);
    const auto rep = success_rate(g, LineMetric{}, 100, rng);
    EXPECT_EQ(rep.attempts, 4u);
    EXPECT_EQ(rep.disconnected, 8u);
    EXPECT_EQ(rep.successes, 4u);
}

TEST(SuccessRate, TileBallIsTotal) {
    Tessellation tes(TilingRules::g710());
    const auto ball = oracle::ball(tes, 4);
    const Graph g = oracle::tile_graph(tes, ball);
    auto metric = [&](std::uint32_t a, std::uint32_t b) { return double(tile_distance(tes, ball[a], ball[b])); };
    Rng rng(3);
    const auto rep = success_rate(g, metric, 20000, rng);
    EXPECT_EQ(rep.attempts, 20000u);
    EXPECT_EQ(rep.success_rate, 1.0);
    EXPECT_EQ(rep.mean_stretch, 1.0);  // every greedy step is a shortest-path step
}

TEST(SuccessRate, SeedReproducible) {
    auto tes = std::make_shared<Tessellation>(TilingRules::g710());
    Rng g(4);
    auto s = generate_dhrg({300, 8, 0.1, 0.75}, tes, g);
    Rng a(9), b(9);
    const auto ra = success_rate(s.graph, DiscreteMetric{&s.embedding}, 2000, a);
    const auto rb = success_rate(s.graph, DiscreteMetric{&s.embedding}, 2000, b);
    EXPECT_EQ(ra.successes, rb.successes);
    EXPECT_EQ(ra.mean_stretch, rb.mean_stretch);
    EXPECT_LE(ra.successes, ra.attempts);
}

TEST(SuccessRate, SuccessfulPathsAreValid) {
    auto tes = std::make_shared<Tessellation>(TilingRules::g710());
    Rng g(5);
    auto s = generate_dhrg({300, 8, 0.1, 0.75}, tes, g);
    DiscreteMetric m{&s.embedding};
    for (std::uint32_t a = 0; a < 300; a += 7)
        for (std::uint32_t b = 1; b < 300; b += 11) {
            if (a == b) continue;
            const auto r = greedy_route(s.graph, m, a, b, 300);
            for (std::size_t k = 1; k < r.path.size(); ++k) {
                EXPECT_TRUE(s.graph.has_edge(r.path[k - 1], r.path[k]));
                if (r.path[k] != b) EXPECT_LT(m(r.path[k], b), m(r.path[k - 1], b));  // delivery to a neighbour is exempt
            }
            if (r.success) EXPECT_EQ(r.path.back(), b);
        }
}
