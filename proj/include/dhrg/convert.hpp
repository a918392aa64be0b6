#pragma once

// Continuous (HRG) embeddings and their conversion to and from tiles, the
// c1/c2 calibration of tile distance against hyperbolic distance, HRG
// generation and the bucketed continuous log-likelihood.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypgeom.hpp"
#include "likelihood.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "tessellation.hpp"

namespace dhrg {

/// Affine fit R_d ~ c1 d + c2 of the expected hyperbolic distance from the
/// origin to a ring-d tile center on G710.
inline constexpr double kC1 = 0.9696687;
inline constexpr double kC2 = 0.0863634;

struct ContinuousEmbedding {
    ModelParams params;
    std::vector<PolarCoord> coords;  // by vertex

    void validate() const {
        params.validate();
        if (coords.size() != params.n)
            throw std::invalid_argument("continuous embedding has " + std::to_string(coords.size()) + " points, expected " +
                                        std::to_string(params.n));
        for (std::size_t v = 0; v < coords.size(); ++v)
            if (!std::isfinite(coords[v].r) || !std::isfinite(coords[v].phi) || coords[v].r < 0)
                throw std::invalid_argument("vertex " + std::to_string(v) + " has invalid polar coordinates");
    }
};

/// Discrete parameters for a continuous model: R rounded after scaling.
inline ModelParams scale_to_discrete(const ModelParams& p, double c1 = kC1) {
    return {p.n, std::round(p.R / c1), p.T / c1, p.alpha / c1};
}

inline ModelParams scale_to_continuous(const ModelParams& p, double c1 = kC1) {
    return {p.n, p.R * c1, p.T * c1, p.alpha * c1};
}

/// Nearest tile for every vertex. Tiles deeper than the discrete radius are
/// replaced by their ancestor on the radius (count reported via `clamped`).
inline DiscreteEmbedding discretize(const ContinuousEmbedding& ce, std::shared_ptr<Tessellation> tes, double c1 = kC1,
                                    std::size_t* clamped = nullptr) {
    ce.validate();
    DiscreteEmbedding out{tes, scale_to_discrete(ce.params, c1), std::vector<Tile*>(ce.coords.size())};
    const int R = out.radius();
    std::vector<std::size_t> over(thread_count(), 0);
    parallel_for(ce.coords.size(), [&](std::size_t b, std::size_t e, unsigned w) {
        for (std::size_t v = b; v < e; ++v) {
            Tile* t = tes->locate(polar_point(ce.coords[v]));
            if (t->layer > R) ++over[w];
            while (t->layer > R) t = t->parent;
            out.tiles[v] = t;
        }
    }, 16);
    if (clamped) {
        *clamped = 0;
        for (auto c : over) *clamped += c;
    }
    return out;
}

inline ContinuousEmbedding dediscretize(const DiscreteEmbedding& de, double c1 = kC1) {
    ContinuousEmbedding out{scale_to_continuous(de.params, c1), {}};
    out.coords.reserve(de.tiles.size());
    for (Tile* t : de.tiles) out.coords.push_back(de.tessellation->tile_polar(t));
    return out;
}

struct CalibrationLayer {
    int d = 0;
    BigCount ring_size;
    std::size_t samples = 0;  // ring size when exhaustive
    bool exhaustive = false;
    double mean = 0;
    double variance = 0;
};

struct Calibration {
    double c1 = 0;
    double c2 = 0;
    double variance_slope = 0;
    double variance_intercept = 0;
    double variance_r2 = 0;
    std::vector<CalibrationLayer> layers;
};

namespace detail {

// splitmix64 finalizer: independent per-layer streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Moments {
    long double sum = 0, sum2 = 0;
    std::size_t n = 0;
    void add(long double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
};

// Weighted least squares y = a x + b; returns {a, b, r2 of the weighted fit}.
struct LineFit {
    double slope, intercept, r2;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    long double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const long double mx = sx / sw, my = sy / sw;
    long double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        syy += w[i] * (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const long double a = sxy / sxx;
    const long double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1;
    return {static_cast<double>(a), static_cast<double>(my - a * mx), static_cast<double>(r2)};
}

}  // namespace detail

/// Largest ring size enumerated tile by tile during calibration.
inline constexpr double kExhaustiveRingLimit = 1e5;

/// Distance from the origin to ring-d tile centers for d <= d_max: exact over
/// whole rings while they are small, sampled uniformly beyond. Sampled tiles
/// are never materialized; their frame is composed along the drawn child path.
/// c1 and c2 come from a least-squares line through the layer means (d >= 4)
/// weighted by samples / variance; the variance line is an unweighted fit.
inline Calibration calibrate(const TilingRules& rules, int d_max, std::size_t samples_per_layer, std::uint64_t seed) {
    if (d_max < 2) throw std::invalid_argument("calibrate: d_max must be at least 2");
    if (samples_per_layer < 2) throw std::invalid_argument("calibrate: need at least 2 samples per layer");
    RingTable table(rules, d_max);
    Tessellation tes(rules);
    Calibration cal;
    cal.layers.resize(static_cast<std::size_t>(d_max) + 1);

    // Exhaustive rings, walked through the ownership tree.
    int exhaustive_depth = 0;
    while (exhaustive_depth < d_max && table.approx(TileType::kRoot, exhaustive_depth + 1) <= kExhaustiveRingLimit)
        ++exhaustive_depth;
    std::vector<detail::Moments> exact(static_cast<std::size_t>(exhaustive_depth) + 1);
    std::vector<std::pair<Tile*, Frame>> stack{{tes.root(), Frame{}}};
    while (!stack.empty()) {
        auto [t, f] = stack.back();
        stack.pop_back();
        exact[static_cast<std::size_t>(t->layer)].add(std::acosh(std::max(1.0L, f(2, 2))));
        if (t->layer == exhaustive_depth) continue;
        for (int k = 0; k < tes.owned_count(t); ++k)
            stack.emplace_back(tes.child(t, k), compose(f, tes.child_transform<long double>(t->type, k)));
    }
    for (int d = 0; d <= exhaustive_depth; ++d) {
        const auto& m = exact[static_cast<std::size_t>(d)];
        auto& L = cal.layers[static_cast<std::size_t>(d)];
        L.exhaustive = true;
        L.samples = m.n;
        L.mean = static_cast<double>(m.sum / m.n);
        L.variance = static_cast<double>(std::max(0.0L, m.sum2 / m.n - (m.sum / m.n) * (m.sum / m.n)));
    }

    // Sampled rings, one independent stream per layer.
    std::vector<Frame> step[3];
    for (TileType type : {TileType::kRoot, TileType::kOneParent, TileType::kTwoParents})
        for (int k = 0; k < rules.owned_children(type); ++k)
            step[static_cast<int>(type)].push_back(tes.child_transform<long double>(type, k));
    parallel_for(static_cast<std::size_t>(d_max - exhaustive_depth), [&](std::size_t b, std::size_t e, unsigned) {
        std::vector<double> w;
        for (std::size_t k = b; k < e; ++k) {
            const int d = exhaustive_depth + 1 + static_cast<int>(k);
            Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(d)));
            std::vector<long double> r(samples_per_layer);
            for (auto& x : r) {
                Frame f;
                TileType type = TileType::kRoot;
                for (int remaining = d; remaining > 0; --remaining) {
                    const int owned = rules.owned_children(type);
                    w.assign(static_cast<std::size_t>(owned), 0);
                    for (int i = 0; i < owned; ++i)
                        w[static_cast<std::size_t>(i)] = table.approx(rules.owned_child_type(type, i), remaining - 1);
                    const int c = static_cast<int>(sample_weighted(rng, w));
                    f = compose(f, step[static_cast<int>(type)][static_cast<std::size_t>(c)]);
                    type = rules.owned_child_type(type, c);
                }
                x = std::acosh(std::max(1.0L, f(2, 2)));
            }
            long double mean = 0;
            for (auto x : r) mean += x;
            mean /= static_cast<long double>(r.size());
            long double var = 0;
            for (auto x : r) var += (x - mean) * (x - mean);
            var /= static_cast<long double>(r.size() - 1);
            auto& L = cal.layers[static_cast<std::size_t>(d)];
            L.samples = r.size();
            L.mean = static_cast<double>(mean);
            L.variance = static_cast<double>(var);
        }
    }, 1);

    for (int d = 0; d <= d_max; ++d) {
        cal.layers[static_cast<std::size_t>(d)].d = d;
        cal.layers[static_cast<std::size_t>(d)].ring_size = table.count(TileType::kRoot, d);
    }

    std::vector<double> x, y, wt, vx, vy, vw;
    for (const auto& L : cal.layers) {
        if (L.d >= 1) {
            vx.push_back(L.d);
            vy.push_back(L.variance);
            vw.push_back(1);
        }
        if (L.d >= 4 || (d_max < 4 && L.d >= 1)) {
            x.push_back(L.d);
            y.push_back(L.mean);
            wt.push_back(static_cast<double>(L.samples) / std::max(L.variance, 1e-12));
        }
    }
    const auto mean_fit = detail::fit_line(x, y, wt);
    cal.c1 = mean_fit.slope;
    cal.c2 = mean_fit.intercept;
    const auto var_fit = detail::fit_line(vx, vy, vw);
    cal.variance_slope = var_fit.slope;
    cal.variance_intercept = var_fit.intercept;
    cal.variance_r2 = var_fit.r2;
    return cal;
}

/// Radius in a disk of radius R under the quasi-uniform density
/// alpha sinh(alpha r) / (cosh(alpha R) - 1), phi uniform.
inline PolarCoord sample_hrg_point(double R, double alpha, Rng& rng) {
    const double u = uniform01(rng);
    const double r = std::acosh(1 + u * (std::cosh(alpha * R) - 1)) / alpha;
    return {std::min(r, R), 2 * std::numbers::pi * uniform01(rng)};
}

struct HrgSample {
    Graph graph;
    ContinuousEmbedding embedding;
};

inline HrgSample generate_hrg(const ModelParams& params, Rng& rng) {
    params.validate();
    HrgSample out{Graph(params.n), {params, {}}};
    auto& pts = out.embedding.coords;
    for (std::size_t v = 0; v < params.n; ++v) pts.push_back(sample_hrg_point(params.R, params.alpha, rng));
    const std::size_t n = params.n;
    auto row_start = [n](std::size_t i) { return i * (2 * n - i - 1) / 2; };
    std::vector<float> prob(n * (n - 1) / 2);
    parallel_for(n, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                prob[row_start(i) + j - i - 1] = static_cast<float>(edge_probability(polar_distance(pts[i], pts[j]), params));
    }, 8);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (bernoulli(rng, prob[row_start(i) + j - i - 1]))
                out.graph.add_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    return out;
}

/// Pair and edge histograms of hyperbolic distances bucketed at width eps;
/// evaluates LL(R, T) at bin centers.
class ContinuousLogLik {
public:
    static constexpr double kDefaultPairCap = 2e9;

    ContinuousLogLik(const ContinuousEmbedding& ce, const Graph& g, double eps = 1e-4, double pair_cap = kDefaultPairCap)
        : eps_(eps) {
        if (!(eps > 0)) throw std::invalid_argument("continuous_loglik: eps must be positive");
        ce.validate();
        const std::size_t n = ce.coords.size();
        if (g.vertex_count() != n)
            throw std::invalid_argument("graph has " + std::to_string(g.vertex_count()) + " vertices but the embedding maps " +
                                        std::to_string(n));
        if (0.5 * static_cast<double>(n) * static_cast<double>(n - 1) > pair_cap)
            throw std::length_error("continuous_loglik: " + std::to_string(n) + " vertices exceed the pair cap of " +
                                    std::to_string(static_cast<long long>(pair_cap)) + " pairs");
        double rmax = 0;
        for (const auto& c : ce.coords) rmax = std::max(rmax, c.r);
        const auto bins = static_cast<std::size_t>(std::ceil((2 * rmax + 1) / eps)) + 1;
        auto bin = [&](double d) { return std::min(bins - 1, static_cast<std::size_t>(d / eps)); };

        std::vector<std::vector<std::int64_t>> partial(thread_count());
        parallel_for(n, [&](std::size_t b, std::size_t e, unsigned w) {
            auto& h = partial[w];
            if (h.empty()) h.assign(bins, 0);
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = i + 1; j < n; ++j) ++h[bin(polar_distance(ce.coords[i], ce.coords[j]))];
        }, 8);
        std::vector<std::int64_t> pairs(bins, 0);
        for (const auto& h : partial)
            for (std::size_t k = 0; k < h.size(); ++k) pairs[k] += h[k];
        std::vector<std::int64_t> edges(bins, 0);
        for (const auto& [u, v] : g.edges()) ++edges[bin(polar_distance(ce.coords[u], ce.coords[v]))];
        for (std::size_t k = 0; k < bins; ++k)
            if (pairs[k] > 0) bins_.push_back({(static_cast<double>(k) + 0.5) * eps, pairs[k], edges[k]});
    }

    double eps() const { return eps_; }

    double operator()(double R, double T) const { return evaluate(bins_, R, T); }

    /// Maximum-likelihood (R, T): grid and line searches on bins merged to
    /// width >= 1e-3, then a final local polish on the full resolution.
    LogisticFit fit() const {
        bool mixed = false;
        for (const auto& b : bins_) mixed = mixed || (b.edges > 0 && b.edges < b.pairs);
        if (!mixed) throw std::domain_error("continuous fit: degenerate histogram");
        const double width = std::max(eps_, 1e-3);
        std::vector<Bin> coarse;
        for (const auto& b : bins_) {
            const double c = (std::floor(b.center / width) + 0.5) * width;
            if (!coarse.empty() && coarse.back().center == c) {
                coarse.back().pairs += b.pairs;
                coarse.back().edges += b.edges;
            } else {
                coarse.push_back({c, b.pairs, b.edges});
            }
        }
        const double r_max = 2 * (bins_.empty() ? 1 : bins_.back().center + eps_);
        LogisticFit best = detail::fit_grid_golden([&](double R, double T) { return evaluate(coarse, R, T); }, r_max);
        best.loglik = (*this)(best.R, best.T);
        for (int round = 0; round < 3; ++round) {
            const double R = detail::golden_max([&](double r) { return (*this)(r, best.T); }, best.R - 2 * width,
                                                best.R + 2 * width, 1e-8);
            const double beta = detail::golden_max([&](double b) { return (*this)(R, 1 / b); }, 0.97 / best.T,
                                                   1.03 / best.T, 1e-8);
            const double ll = (*this)(R, 1 / beta);
            if (!(ll > best.loglik)) break;
            best = {R, 1 / beta, ll};
        }
        return best;
    }

private:
    struct Bin {
        double center;
        std::int64_t pairs;
        std::int64_t edges;
    };

    static double evaluate(const std::vector<Bin>& bins, double R, double T) {
        if (!(T > 0)) throw std::invalid_argument("continuous loglik: T must be positive");
        double ll = 0;
        for (const auto& b : bins) {
            const double z = (b.center - R) / (2 * T);
            if (b.edges) ll -= static_cast<double>(b.edges) * detail::softplus(z);
            if (b.pairs != b.edges) ll -= static_cast<double>(b.pairs - b.edges) * detail::softplus(-z);
        }
        return ll;
    }

    double eps_;
    std::vector<Bin> bins_;
};

inline ContinuousLogLik continuous_loglik(const ContinuousEmbedding& ce, const Graph& g, double eps = 1e-4) {
    return ContinuousLogLik(ce, g, eps);
}

}  // namespace dhrg
