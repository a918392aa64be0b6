#pragma once

// Brute-force references for tests. Deliberately quadratic; nothing here is
// used by the library.

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhrg/dhrg.hpp"

namespace dhrg::oracle {

/// Tiles with layer <= radius, in BFS order from the root.
inline std::vector<Tile*> ball(Tessellation& tes, int radius) {
    std::vector<Tile*> out{tes.root()};
    std::unordered_map<Tile*, bool> seen{{tes.root(), true}};
    for (std::size_t k = 0; k < out.size(); ++k) {
        Tile* t = out[k];
        if (t->layer == radius) continue;
        for (int i = 0; i < tes.p(); ++i) {
            Tile* u = tes.adj(t, i);
            if (u->layer <= radius && seen.emplace(u, true).second) out.push_back(u);
        }
    }
    return out;
}

/// BFS distances from `source` over adj, restricted to tiles with layer <= limit.
inline std::unordered_map<Tile*, int> bfs_from(Tessellation& tes, Tile* source, int limit) {
    std::unordered_map<Tile*, int> dist{{source, 0}};
    std::deque<Tile*> q{source};
    while (!q.empty()) {
        Tile* t = q.front();
        q.pop_front();
        const int d = dist[t];
        for (int i = 0; i < tes.p(); ++i) {
            Tile* u = tes.adj(t, i);
            if (u->layer > limit) continue;
            if (dist.emplace(u, d + 1).second) q.push_back(u);
        }
    }
    return dist;
}

/// Exact distance by BFS; paths may leave the ball of the endpoints by at most
/// `slack` layers.
inline int bfs_distance(Tessellation& tes, Tile* a, Tile* b, int slack = 2) {
    if (a == b) return 0;
    const int limit = std::max(a->layer, b->layer) + slack;
    std::unordered_map<Tile*, int> dist{{a, 0}};
    std::deque<Tile*> q{a};
    while (!q.empty()) {
        Tile* t = q.front();
        q.pop_front();
        const int d = dist[t];
        for (int i = 0; i < tes.p(); ++i) {
            Tile* u = tes.adj(t, i);
            if (u->layer > limit || !dist.emplace(u, d + 1).second) continue;
            if (u == b) return d + 1;
            q.push_back(u);
        }
    }
    return -1;
}

inline std::vector<std::int64_t> brute_tally(Tessellation& tes, const std::vector<std::pair<Tile*, std::int64_t>>& items,
                                             Tile* t, std::size_t size) {
    std::vector<std::int64_t> out(size, 0);
    for (const auto& [u, w] : items) out.at(static_cast<std::size_t>(tile_distance(tes, t, u))) += w;
    return out;
}

inline DistanceHistograms brute_histograms(const Graph& g, const DiscreteEmbedding& emb) {
    DistanceHistograms h;
    const std::size_t n = emb.tiles.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto d = static_cast<std::size_t>(tile_distance(*emb.tessellation, emb.tiles[i], emb.tiles[j]));
            if (h.size() <= d) h.resize(d + 1);
            ++h.pairs[d];
            if (g.has_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j))) ++h.edges[d];
        }
    return h;
}

/// The defining double sum over vertex pairs, no histograms.
inline double naive_loglik(const Graph& g, const DiscreteEmbedding& emb, double R, double T) {
    double ll = 0;
    const std::size_t n = emb.tiles.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = tile_distance(*emb.tessellation, emb.tiles[i], emb.tiles[j]);
            const double z = (d - R) / (2 * T);
            const bool edge = g.has_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            ll += edge ? -std::log1p(std::exp(z)) : -std::log1p(std::exp(-z));
        }
    return ll;
}

/// Adjacency graph of a tile set; vertex k is tiles[k].
inline Graph tile_graph(Tessellation& tes, const std::vector<Tile*>& tiles) {
    std::unordered_map<Tile*, std::uint32_t> index;
    for (std::size_t k = 0; k < tiles.size(); ++k) index[tiles[k]] = static_cast<std::uint32_t>(k);
    Graph g(tiles.size());
    for (std::size_t k = 0; k < tiles.size(); ++k)
        for (int i = 0; i < tes.p(); ++i)
            if (auto it = index.find(tes.adj(tiles[k], i)); it != index.end()) g.add_edge(static_cast<std::uint32_t>(k), it->second);
    return g;
}

}  // namespace dhrg::oracle
