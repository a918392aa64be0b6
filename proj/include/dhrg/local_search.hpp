#pragma once

// Local search over discrete embeddings: move single vertices to adjacent
// tiles while the objective strictly improves. Pairs/Edges are kept exact
// incrementally through a tally counter that holds every vertex tile.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "likelihood.hpp"
#include "model.hpp"
#include "tally_counter.hpp"

namespace dhrg {

struct Objective {
    enum class Kind { kLogistic, kPointwise };
    Kind kind = Kind::kLogistic;
    double R = 0;
    double T = 1;

    static Objective logistic(double R, double T) { return {Kind::kLogistic, R, T}; }
    static Objective pointwise() { return {Kind::kPointwise, 0, 1}; }

    double operator()(const DistanceHistograms& h) const {
        return kind == Kind::kLogistic ? loglik_logistic(h, R, T) : loglik_pointwise_mle(h);
    }
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0;
    std::size_t accepted_moves = 0;
};

class SearchState {
public:
    /// Strict-improvement slack, absorbing floating-point noise.
    static constexpr double kMinGain = 1e-12;

    SearchState(const Graph& g, DiscreteEmbedding emb, Objective objective)
        : graph_(&g), emb_(std::move(emb)), objective_(objective), counter_(*emb_.tessellation, emb_.radius()) {
        emb_.validate();
        if (g.vertex_count() != emb_.tiles.size())
            throw std::invalid_argument("graph has " + std::to_string(g.vertex_count()) + " vertices but the embedding maps " +
                                        std::to_string(emb_.tiles.size()));
        for (Tile* t : emb_.tiles) counter_.add(t, 1);
        hist_.pairs = compute_pairs(counter_, emb_.tiles);
        hist_.edges = compute_edges(g, emb_);
        hist_.resize(counter_.histogram_size());
        value_ = objective_(hist_);
    }

    /// Objective with the default logistic (R, T) taken from the embedding.
    SearchState(const Graph& g, DiscreteEmbedding emb)
        : SearchState(g, emb, Objective::logistic(emb.params.R, emb.params.T)) {}

    const DiscreteEmbedding& embedding() const { return emb_; }
    const DistanceHistograms& histograms() const { return hist_; }
    const Objective& objective_function() const { return objective_; }
    double objective() const { return value_; }
    int iterations() const { return iteration_; }
    const std::vector<IterationRecord>& history() const { return history_; }

    /// Objective after moving v to w, without changing the state.
    double evaluate_move(std::uint32_t v, Tile* w) const {
        if (w == emb_.tiles.at(v)) return value_;
        DistanceHistograms h = hist_;
        apply_delta(h, v, w, counter_.count(emb_.tiles[v]));
        return objective_(h);
    }

    void commit_move(std::uint32_t v, Tile* w) {
        Tile* old = emb_.tiles.at(v);
        if (w == old) return;
        if (w->layer > emb_.radius()) throw std::out_of_range("move outside the embedding radius");
        apply_delta(hist_, v, w, counter_.count(old));
        counter_.add(old, -1);
        counter_.add(w, 1);
        emb_.tiles[v] = w;
        value_ = objective_(hist_);
    }

    /// One pass over the vertices in id order; each vertex moves to its best
    /// strictly improving neighbour tile (lowest adj index on ties), committed
    /// immediately. Returns the number of moves.
    std::size_t improve_iteration() {
        Tessellation& tes = *emb_.tessellation;
        const int R = emb_.radius();
        std::size_t accepted = 0;
        for (std::uint32_t v = 0; v < emb_.tiles.size(); ++v) {
            Tile* old = emb_.tiles[v];
            const auto here = counter_.count(old);
            double best = value_ + kMinGain;
            Tile* target = nullptr;
            for (int i = 0; i < tes.p(); ++i) {
                Tile* w = tes.adj(old, i);
                if (w->layer > R) continue;
                DistanceHistograms h = hist_;
                apply_delta(h, v, w, here);
                const double value = objective_(h);
                if (value > best) {
                    best = value;
                    target = w;
                }
            }
            if (target) {
                commit_move(v, target);
                ++accepted;
            }
        }
        ++iteration_;
        history_.push_back({iteration_, value_, accepted});
        return accepted;
    }

    /// Runs iterations until one accepts nothing or max_iters is reached.
    void improve(int max_iters = 20) {
        if (max_iters < 0) throw std::invalid_argument("improve: negative iteration cap");
        if (history_.empty()) history_.push_back({0, value_, 0});
        for (int k = 0; k < max_iters; ++k)
            if (improve_iteration() == 0) break;
    }

private:
    // Histogram change for moving v from its tile to w. `here` is the tally
    // count at v's current tile, which includes v itself at distance 0; v's
    // own contribution at the new tile is removed the same way.
    void apply_delta(DistanceHistograms& h, std::uint32_t v, Tile* w, const std::vector<std::int64_t>& here) const {
        Tessellation& tes = *emb_.tessellation;
        Tile* old = emb_.tiles[v];
        const auto there = counter_.count(w);
        const auto moved = static_cast<std::size_t>(tile_distance(tes, old, w));
        for (std::size_t d = 0; d < here.size(); ++d) h.pairs[d] += there[d] - here[d];
        h.pairs[moved] -= 1;  // v seen from w
        h.pairs[0] += 1;      // v seen from its old tile
        for (std::uint32_t u : graph_->neighbors(v)) {
            h.edges[static_cast<std::size_t>(tile_distance(tes, old, emb_.tiles[u]))] -= 1;
            h.edges[static_cast<std::size_t>(tile_distance(tes, w, emb_.tiles[u]))] += 1;
        }
    }

    const Graph* graph_;
    DiscreteEmbedding emb_;
    Objective objective_;
    TallyCounter counter_;
    DistanceHistograms hist_;
    double value_ = 0;
    int iteration_ = 0;
    std::vector<IterationRecord> history_;
};

}  // namespace dhrg
