#pragma once

// Greedy routing: forward to the neighbour closest to the target, failing as
// soon as no neighbour is strictly closer than the current vertex.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

#include "convert.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "tile_distance.hpp"

namespace dhrg {

struct RouteResult {
    bool success = false;
    std::vector<std::uint32_t> path;  // starts at the source; ends at the target on success
};

template <class Metric>
RouteResult greedy_route(const Graph& g, Metric&& dist, std::uint32_t s, std::uint32_t t, std::size_t hop_cap) {
    if (s == t) throw std::invalid_argument("greedy_route: source equals target");
    RouteResult out;
    out.path.push_back(s);
    std::uint32_t v = s;
    double here = dist(v, t);
    while (out.path.size() <= hop_cap) {
        std::uint32_t next = v;
        double best = here;
        for (std::uint32_t u : g.neighbors(v)) {
            if (u == t) {
                next = u;
                best = -std::numeric_limits<double>::infinity();
                break;
            }
            const double d = dist(u, t);
            if (d < best || (d == best && next != v && u < next)) {
                best = d;
                next = u;
            }
        }
        if (next == v) return out;
        out.path.push_back(next);
        if (next == t) {
            out.success = true;
            return out;
        }
        v = next;
        here = best;
    }
    return out;
}

/// Tile distance between the vertices' tiles.
struct DiscreteMetric {
    const DiscreteEmbedding* emb;
    double operator()(std::uint32_t a, std::uint32_t b) const {
        return tile_distance(*emb->tessellation, emb->tiles[a], emb->tiles[b]);
    }
};

/// Hyperbolic distance between the vertices' points.
struct ContinuousMetric {
    const ContinuousEmbedding* emb;
    double operator()(std::uint32_t a, std::uint32_t b) const { return polar_distance(emb->coords[a], emb->coords[b]); }
};

struct RoutingReport {
    std::size_t attempts = 0;
    std::size_t successes = 0;
    std::size_t disconnected = 0;  // sampled or enumerated pairs skipped for lying in different components
    double success_rate = 0;
    double mean_hops = 0;
    double mean_stretch = 0;  // hops over BFS distance, successful routes only
};

namespace detail {

inline std::vector<std::uint32_t> components(const Graph& g) {
    const auto none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> comp(g.vertex_count(), none);
    std::uint32_t next = 0;
    std::vector<std::uint32_t> stack;
    for (std::uint32_t s = 0; s < comp.size(); ++s) {
        if (comp[s] != none) continue;
        comp[s] = next;
        stack.assign(1, s);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto u : g.neighbors(v))
                if (comp[u] == none) {
                    comp[u] = next;
                    stack.push_back(u);
                }
        }
        ++next;
    }
    return comp;
}

inline std::vector<int> bfs_hops(const Graph& g, std::uint32_t s) {
    std::vector<int> d(g.vertex_count(), -1);
    std::queue<std::uint32_t> q;
    d[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto u : g.neighbors(v))
            if (d[u] < 0) {
                d[u] = d[v] + 1;
                q.push(u);
            }
    }
    return d;
}

}  // namespace detail

/// Success rate over all ordered pairs when n(n-1) <= pair_budget, otherwise
/// over pair_budget random ordered pairs from the same component.
template <class Metric>
RoutingReport success_rate(const Graph& g, const Metric& dist, std::size_t pair_budget, Rng& rng) {
    const std::size_t n = g.vertex_count();
    RoutingReport rep;
    if (n < 2 || pair_budget == 0) return rep;
    const auto comp = detail::components(g);

    // Targets grouped by source, so one BFS per source gives the stretch.
    std::vector<std::vector<std::uint32_t>> targets(n);
    if (static_cast<double>(n) * static_cast<double>(n - 1) <= static_cast<double>(pair_budget)) {
        for (std::uint32_t s = 0; s < n; ++s)
            for (std::uint32_t t = 0; t < n; ++t) {
                if (s == t) continue;
                if (comp[s] != comp[t])
                    ++rep.disconnected;
                else
                    targets[s].push_back(t);
            }
    } else {
        std::size_t drawn = 0;
        const std::size_t max_draws = 100 * pair_budget;
        for (std::size_t tries = 0; drawn < pair_budget && tries < max_draws; ++tries) {
            const auto s = static_cast<std::uint32_t>(uniform_index(rng, n));
            const auto t = static_cast<std::uint32_t>(uniform_index(rng, n));
            if (s == t) continue;
            if (comp[s] != comp[t]) {
                ++rep.disconnected;
                continue;
            }
            targets[s].push_back(t);
            ++drawn;
        }
    }

    std::vector<std::uint32_t> sources;
    for (std::uint32_t s = 0; s < n; ++s)
        if (!targets[s].empty()) sources.push_back(s);
    struct Partial {
        std::size_t attempts = 0, successes = 0, hops = 0;
        double stretch = 0;
    };
    std::vector<Partial> part(sources.size());
    parallel_for(sources.size(), [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t k = b; k < e; ++k) {
            const auto s = sources[k];
            const auto hops = detail::bfs_hops(g, s);
            for (auto t : targets[s]) {
                const auto r = greedy_route(g, dist, s, t, n);
                ++part[k].attempts;
                if (!r.success) continue;
                ++part[k].successes;
                part[k].hops += r.path.size() - 1;
                part[k].stretch += static_cast<double>(r.path.size() - 1) / hops[t];
            }
        }
    }, 1);
    std::size_t hops = 0;
    double stretch = 0;
    for (const auto& p : part) {
        rep.attempts += p.attempts;
        rep.successes += p.successes;
        hops += p.hops;
        stretch += p.stretch;
    }
    if (rep.attempts) rep.success_rate = static_cast<double>(rep.successes) / static_cast<double>(rep.attempts);
    if (rep.successes) {
        rep.mean_hops = static_cast<double>(hops) / static_cast<double>(rep.successes);
        rep.mean_stretch = stretch / static_cast<double>(rep.successes);
    }
    return rep;
}

}  // namespace dhrg
