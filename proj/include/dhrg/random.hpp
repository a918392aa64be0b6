#pragma once

// Deterministic random helpers on top of std::mt19937_64. The standard
// distributions are implementation-defined, so uniform reals and indices are
// derived by hand to keep seeded runs identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace dhrg {

using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform in [0, n) without modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return x % n;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Index drawn with probability proportional to weights[i] (non-negative).
inline std::size_t sample_weighted(Rng& rng, const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (!(total > 0)) throw std::invalid_argument("sample_weighted: weights sum to zero");
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0) return i;
    return 0;
}

/// Turns log-weights into a normalized distribution without overflow.
inline std::vector<double> normalize_log_weights(const std::vector<double>& logw) {
    double top = -std::numeric_limits<double>::infinity();
    for (double x : logw) top = std::max(top, x);
    std::vector<double> out(logw.size());
    double total = 0;
    for (std::size_t i = 0; i < logw.size(); ++i) total += out[i] = std::exp(logw[i] - top);
    for (double& x : out) x /= total;
    return out;
}

}  // namespace dhrg
