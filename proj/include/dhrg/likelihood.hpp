#pragma once

// Pairs/Edges distance histograms and the log-likelihoods built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "parallel.hpp"
#include "tally_counter.hpp"
#include "tile_distance.hpp"

namespace dhrg {

/// Pairs[d]: unordered vertex pairs at tile distance d; Edges[d]: the ones
/// joined by an edge. 64-bit counts cover n up to about 6e9.
struct DistanceHistograms {
    std::vector<std::int64_t> pairs;
    std::vector<std::int64_t> edges;

    std::size_t size() const { return std::max(pairs.size(), edges.size()); }

    void resize(std::size_t n) {
        pairs.resize(n, 0);
        edges.resize(n, 0);
    }

    /// One past the last distance with any pair.
    std::size_t effective_length() const {
        std::size_t n = pairs.size();
        while (n > 0 && pairs[n - 1] == 0) --n;
        return n;
    }

    std::int64_t pair_at(std::size_t d) const { return d < pairs.size() ? pairs[d] : 0; }
    std::int64_t edge_at(std::size_t d) const { return d < edges.size() ? edges[d] : 0; }

    bool operator==(const DistanceHistograms& o) const {
        const std::size_t n = std::max(size(), o.size());
        for (std::size_t d = 0; d < n; ++d)
            if (pair_at(d) != o.pair_at(d) || edge_at(d) != o.edge_at(d)) return false;
        return true;
    }
};

namespace detail {

inline void add_histogram(std::vector<std::int64_t>& into, const std::vector<std::int64_t>& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

inline void trim_zeros(std::vector<std::int64_t>& h) {
    while (!h.empty() && h.back() == 0) h.pop_back();
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace detail

/// Pairs histogram from a counter holding every vertex tile with weight 1.
inline std::vector<std::int64_t> compute_pairs(const TallyCounter& counter, const std::vector<Tile*>& tiles) {
    const unsigned workers = thread_count();
    std::vector<std::vector<std::int64_t>> partial(workers, std::vector<std::int64_t>(counter.histogram_size(), 0));
    parallel_for(tiles.size(), [&](std::size_t b, std::size_t e, unsigned w) {
        for (std::size_t v = b; v < e; ++v) counter.count_into(tiles[v], partial[w]);
    });
    std::vector<std::int64_t> pairs(counter.histogram_size(), 0);
    for (const auto& p : partial) detail::add_histogram(pairs, p);
    // Each vertex sees itself at distance 0 and every other pair twice.
    pairs[0] -= static_cast<std::int64_t>(tiles.size());
    for (auto& x : pairs) {
        if (x % 2 != 0) throw std::logic_error("compute_pairs: odd ordered pair count");
        x /= 2;
    }
    detail::trim_zeros(pairs);
    return pairs;
}

inline std::vector<std::int64_t> compute_pairs(const DiscreteEmbedding& emb) {
    TallyCounter counter(*emb.tessellation, emb.radius());
    for (Tile* t : emb.tiles) counter.add(t, 1);
    return compute_pairs(counter, emb.tiles);
}

inline std::vector<std::int64_t> compute_edges(const Graph& g, const DiscreteEmbedding& emb) {
    if (g.vertex_count() != emb.tiles.size())
        throw std::invalid_argument("graph has " + std::to_string(g.vertex_count()) + " vertices but the embedding maps " +
                                    std::to_string(emb.tiles.size()));
    const auto& edges = g.edges();
    std::vector<std::vector<std::int64_t>> partial(thread_count());
    parallel_for(edges.size(), [&](std::size_t b, std::size_t e, unsigned w) {
        auto& h = partial[w];
        for (std::size_t k = b; k < e; ++k) {
            const auto d = static_cast<std::size_t>(
                tile_distance(*emb.tessellation, emb.tiles[edges[k].first], emb.tiles[edges[k].second]));
            if (h.size() <= d) h.resize(d + 1, 0);
            ++h[d];
        }
    }, 1024);
    std::vector<std::int64_t> out;
    for (const auto& p : partial) detail::add_histogram(out, p);
    detail::trim_zeros(out);
    return out;
}

inline DistanceHistograms compute_histograms(const Graph& g, const DiscreteEmbedding& emb) {
    DistanceHistograms h{compute_pairs(emb), compute_edges(g, emb)};
    h.resize(h.size());
    return h;
}

/// Sum over distances of E ln p(d) + (P - E) ln(1 - p(d)) with the logistic p.
inline double loglik_logistic(const DistanceHistograms& h, double R, double T) {
    if (!(T > 0)) throw std::invalid_argument("loglik_logistic: T must be positive");
    double ll = 0;
    for (std::size_t d = 0; d < h.size(); ++d) {
        const double P = static_cast<double>(h.pair_at(d)), E = static_cast<double>(h.edge_at(d));
        if (P == 0 && E == 0) continue;
        const double z = (static_cast<double>(d) - R) / (2 * T);
        if (E != 0) ll -= E * detail::softplus(z);
        if (P != E) ll -= (P - E) * detail::softplus(-z);
    }
    return ll;
}

/// Log-likelihood under the best arbitrary p(d), i.e. p(d) = E/P per bin.
inline double loglik_pointwise_mle(const DistanceHistograms& h) {
    double ll = 0;
    for (std::size_t d = 0; d < h.size(); ++d) {
        const auto P = h.pair_at(d), E = h.edge_at(d);
        if (E <= 0 || E >= P) continue;
        const double q = static_cast<double>(E) / static_cast<double>(P);
        ll += static_cast<double>(E) * std::log(q) + static_cast<double>(P - E) * std::log1p(-q);
    }
    return ll;
}

struct LogisticFit {
    double R = 0;
    double T = 0;
    double loglik = 0;
};

namespace detail {

/// Maximizer of a unimodal f on [lo, hi], to absolute tolerance tol.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

/// Coarse grid then alternating golden-section refinement of any LL(R, T)
/// over R in [0, r_max], T in [0.01, 10]. For fixed T the logistic LL is
/// concave in R, and for fixed R it is concave in 1/T, so each line search is
/// unimodal.
template <class LL>
LogisticFit fit_grid_golden(LL&& ll, double r_max) {
    constexpr int kGrid = 64;
    constexpr double kTMin = 0.01, kTMax = 10;
    LogisticFit best{0, kTMin, -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < kGrid; ++i) {
        const double R = r_max * i / (kGrid - 1);
        for (int j = 0; j < kGrid; ++j) {
            const double T = kTMin * std::pow(kTMax / kTMin, static_cast<double>(j) / (kGrid - 1));
            const double v = ll(R, T);
            if (v > best.loglik) best = {R, T, v};
        }
    }
    // Line searches in beta = 1/T.
    for (int round = 0; round < 200; ++round) {
        const LogisticFit prev = best;
        best.R = golden_max([&](double R) { return ll(R, best.T); }, 0, r_max, 1e-7);
        const double beta = golden_max([&](double b) { return ll(best.R, 1 / b); }, 1 / kTMax, 1 / kTMin, 1e-7);
        best.T = 1 / beta;
        best.loglik = ll(best.R, best.T);
        if (best.loglik < prev.loglik) {
            best = prev;
            break;
        }
        if (std::abs(best.R - prev.R) < 1e-6 && std::abs(best.T - prev.T) < 1e-6 * std::max(1.0, best.T)) break;
    }
    return best;
}

}  // namespace detail

/// Maximum-likelihood (R, T) of the logistic model for the histograms.
inline LogisticFit fit_logistic(const DistanceHistograms& h) {
    bool mixed = false;
    for (std::size_t d = 0; d < h.size(); ++d) {
        if (h.edge_at(d) < 0 || h.edge_at(d) > h.pair_at(d))
            throw std::invalid_argument("fit_logistic: Edges[" + std::to_string(d) + "] outside [0, Pairs]");
        mixed = mixed || (h.edge_at(d) > 0 && h.edge_at(d) < h.pair_at(d));
    }
    if (!mixed)
        throw std::domain_error("fit_logistic: degenerate histogram, every distance has all or none of its pairs connected");
    const double r_max = 2.0 * static_cast<double>(h.effective_length());
    return detail::fit_grid_golden([&](double R, double T) { return loglik_logistic(h, R, T); }, r_max);
}

}  // namespace dhrg
