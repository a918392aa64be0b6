#pragma once

// DHRG model: parameters, the logistic connection probability, tile sampling
// and graph generation.

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "random.hpp"
#include "tessellation.hpp"
#include "tile_distance.hpp"

namespace dhrg {

struct ModelParams {
    std::size_t n = 1;
    double R = 1;  // integral for discrete embeddings
    double T = 0.1;
    double alpha = 0.75;

    void validate() const {
        if (n < 1) throw std::invalid_argument("model parameter n must be at least 1");
        if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("model parameter R must be positive");
        if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("model parameter T must be positive");
        if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("model parameter alpha must be positive");
    }

    /// Integer radius of the discrete model.
    int radius() const {
        const double r = std::round(R);
        if (std::abs(R - r) > 1e-9) throw std::invalid_argument("discrete model radius must be an integer, got " + std::to_string(R));
        return static_cast<int>(r);
    }

    /// Degree distribution exponent of the generated graphs.
    double power_law_exponent() const { return 2 * alpha + 1; }
};

/// 1 / (1 + exp((d - R) / 2T)), evaluated without overflow.
inline double edge_probability(double d, double R, double T) {
    const double z = (d - R) / (2 * T);
    if (z > 0) {
        const double e = std::exp(-z);
        return e / (1 + e);
    }
    return 1 / (1 + std::exp(z));
}

inline double edge_probability(double d, const ModelParams& params) { return edge_probability(d, params.R, params.T); }

/// Simple undirected graph on vertices 0..n-1.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adj_(n) {}

    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adj_.at(v); }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

    bool has_edge(std::uint32_t u, std::uint32_t v) const { return keys_.count(key(u, v)) > 0; }

    /// Returns false for self-loops and duplicates, which are dropped.
    bool add_edge(std::uint32_t u, std::uint32_t v) {
        if (u >= adj_.size() || v >= adj_.size())
            throw std::out_of_range("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside vertex range " +
                                    std::to_string(adj_.size()));
        if (u == v || !keys_.insert(key(u, v)).second) return false;
        if (u > v) std::swap(u, v);
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        edges_.emplace_back(u, v);
        return true;
    }

private:
    static std::uint64_t key(std::uint32_t u, std::uint32_t v) {
        if (u > v) std::swap(u, v);
        return (std::uint64_t{u} << 32) | v;
    }

    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
    std::unordered_set<std::uint64_t> keys_;
};

struct DiscreteEmbedding {
    std::shared_ptr<Tessellation> tessellation;
    ModelParams params;
    std::vector<Tile*> tiles;  // by vertex

    int radius() const { return params.radius(); }

    void validate() const {
        if (!tessellation) throw std::invalid_argument("discrete embedding has no tessellation");
        params.validate();
        if (tiles.size() != params.n)
            throw std::invalid_argument("discrete embedding maps " + std::to_string(tiles.size()) + " vertices, expected " +
                                        std::to_string(params.n));
        const int R = radius();
        for (std::size_t v = 0; v < tiles.size(); ++v)
            if (!tiles[v] || tiles[v]->layer > R)
                throw std::out_of_range("vertex " + std::to_string(v) + " lies outside the radius-" + std::to_string(R) + " ball");
    }
};

/// Draws tiles of D_R with P(t) proportional to e^{alpha d} / |R_d| for a
/// tile in ring d: the ring by its total mass, then a uniform tile of the ring
/// by descending the ownership tree weighted by descendant counts.
class TileSampler {
public:
    TileSampler(Tessellation& tes, int R, double alpha) : tes_(&tes), table_(tes.rules(), R) {
        if (R < 0) throw std::invalid_argument("sampler radius must be non-negative");
        std::vector<double> logw(static_cast<std::size_t>(R) + 1);
        for (int d = 0; d <= R; ++d) logw[static_cast<std::size_t>(d)] = alpha * d;
        ring_probabilities_ = normalize_log_weights(logw);
    }

    const std::vector<double>& ring_probabilities() const { return ring_probabilities_; }

    int sample_ring(Rng& rng) const { return static_cast<int>(sample_weighted(rng, ring_probabilities_)); }

    Tile* sample_in_ring(int d, Rng& rng) const {
        Tile* t = tes_->root();
        std::vector<double> w;
        for (int remaining = d; remaining > 0; --remaining) {
            const int k = tes_->owned_count(t);
            w.assign(static_cast<std::size_t>(k), 0);
            for (int i = 0; i < k; ++i)
                w[static_cast<std::size_t>(i)] = table_.approx(tes_->rules().owned_child_type(t->type, i), remaining - 1);
            t = tes_->child(t, static_cast<int>(sample_weighted(rng, w)));
        }
        return t;
    }

    Tile* operator()(Rng& rng) const { return sample_in_ring(sample_ring(rng), rng); }

private:
    Tessellation* tes_;
    RingTable table_;
    std::vector<double> ring_probabilities_;
};

struct DhrgSample {
    Graph graph;
    DiscreteEmbedding embedding;
};

/// Samples n tiles, then connects every pair independently with
/// probability p(tile distance). Distances are computed in parallel; the coin
/// flips run in a fixed pair order so the result depends only on the seed.
inline DhrgSample generate_dhrg(const ModelParams& params, std::shared_ptr<Tessellation> tes, Rng& rng) {
    params.validate();
    const int R = params.radius();
    DhrgSample out{Graph(params.n), {tes, params, {}}};
    TileSampler sampler(*tes, R, params.alpha);
    auto& tiles = out.embedding.tiles;
    tiles.reserve(params.n);
    for (std::size_t v = 0; v < params.n; ++v) tiles.push_back(sampler(rng));

    const std::size_t n = params.n;
    std::vector<double> prob(static_cast<std::size_t>(2 * R + tes->rules().segment_gap + 1));
    for (std::size_t d = 0; d < prob.size(); ++d) prob[d] = edge_probability(static_cast<double>(d), params);

    std::vector<std::uint16_t> dist(n * (n - 1) / 2);
    auto row_start = [n](std::size_t i) { return i * (2 * n - i - 1) / 2; };
    parallel_for(n, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dist[row_start(i) + j - i - 1] = static_cast<std::uint16_t>(tile_distance(*tes, tiles[i], tiles[j]));
    }, 8);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (bernoulli(rng, prob[dist[row_start(i) + j - i - 1]]))
                out.graph.add_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    return out;
}

}  // namespace dhrg
