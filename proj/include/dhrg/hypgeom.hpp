#pragma once

// Minkowski hyperboloid primitives. Points live on z^2 - x^2 - y^2 = 1, z > 0;
// the Poincare disk is only used for export. Everything is templated on the
// scalar so that long composition chains (far tiles) can run in long double.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace dhrg {

template <class T>
struct BasicHPoint {
    T x = 0;
    T y = 0;
    T z = 1;

    template <class U>
    explicit operator BasicHPoint<U>() const {
        return {static_cast<U>(x), static_cast<U>(y), static_cast<U>(z)};
    }
};

using HPoint = BasicHPoint<double>;

inline constexpr HPoint kOrigin{0.0, 0.0, 1.0};

template <class T>
struct BasicPolar {
    T r = 0;
    T phi = 0;
};

using PolarCoord = BasicPolar<double>;

/// Row-major 3x3 matrix acting on hyperboloid coordinates (x, y, z).
template <class T>
struct BasicIsometry {
    std::array<T, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    T operator()(int row, int col) const { return m[row * 3 + col]; }
    T& operator()(int row, int col) { return m[row * 3 + col]; }

    template <class U>
    explicit operator BasicIsometry<U>() const {
        BasicIsometry<U> r;
        for (int i = 0; i < 9; ++i) r.m[i] = static_cast<U>(m[i]);
        return r;
    }
};

using Isometry = BasicIsometry<double>;

template <class T>
T minkowski_dot(const BasicHPoint<T>& a, const BasicHPoint<T>& b) {
    return a.z * b.z - a.x * b.x - a.y * b.y;
}

/// Pushes a point back onto the hyperboloid by recomputing z.
template <class T>
BasicHPoint<T> renormalize(BasicHPoint<T> p) {
    p.z = std::sqrt(T(1) + p.x * p.x + p.y * p.y);
    return p;
}

template <class T>
T hdist(const BasicHPoint<T>& a, const BasicHPoint<T>& b) {
    const T c = minkowski_dot(a, b);
    if (c >= T(2)) return std::acosh(c);
    // near points: the chord |a - b| = 2 sinh(d/2) keeps the small digits
    const T dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    const T q = dx * dx + dy * dy - dz * dz;
    return q > 0 ? 2 * std::asinh(std::sqrt(q) / 2) : T(0);
}

template <class T = double>
BasicHPoint<T> polar_point(T r, T phi) {
    const T s = std::sinh(r);
    return {std::cos(phi) * s, std::sin(phi) * s, std::cosh(r)};
}

inline HPoint polar_point(const PolarCoord& c) { return polar_point<double>(c.r, c.phi); }

/// Polar coordinates with phi in [0, 2pi).
template <class T>
BasicPolar<T> to_polar(const BasicHPoint<T>& p) {
    T phi = std::atan2(p.y, p.x);
    if (phi < 0) phi += 2 * std::numbers::pi_v<T>;
    if (phi >= 2 * std::numbers::pi_v<T>) phi = 0;
    return {std::acosh(std::max(T(1), p.z)), phi};
}

/// Distance between polar points via
///   sinh^2(d/2) = sinh^2((r1 - r2)/2) + sinh(r1) sinh(r2) sin^2(dphi/2),
/// a sum of non-negative terms, so far-from-origin pairs keep full relative
/// precision (the acosh form cancels catastrophically there).
template <class T>
T polar_distance(const BasicPolar<T>& a, const BasicPolar<T>& b) {
    const T dr = std::sinh((a.r - b.r) / 2);
    const T da = std::sin((a.phi - b.phi) / 2);
    const T s2 = dr * dr + std::sinh(a.r) * std::sinh(b.r) * da * da;
    return 2 * std::asinh(std::sqrt(s2));
}

template <class T>
std::pair<T, T> to_poincare(const BasicHPoint<T>& p) {
    return {p.x / (p.z + 1), p.y / (p.z + 1)};
}

// rotate(alpha) maps angle phi to phi - alpha (the usual hyperboloid-model
// matrix); translate_x(x) moves the origin to (sinh x, 0, cosh x).
template <class T = double>
BasicIsometry<T> rotate(T alpha) {
    const T c = std::cos(alpha), s = std::sin(alpha);
    return BasicIsometry<T>{{c, s, 0, -s, c, 0, 0, 0, 1}};
}

template <class T = double>
BasicIsometry<T> translate_x(T x) {
    const T c = std::cosh(x), s = std::sinh(x);
    return BasicIsometry<T>{{c, 0, s, 0, 1, 0, s, 0, c}};
}

/// compose(a, b) applies b first, then a.
template <class T>
BasicIsometry<T> compose(const BasicIsometry<T>& a, const BasicIsometry<T>& b) {
    BasicIsometry<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return r;
}

template <class T>
BasicHPoint<T> apply_raw(const BasicIsometry<T>& t, const BasicHPoint<T>& p) {
    return {t(0, 0) * p.x + t(0, 1) * p.y + t(0, 2) * p.z, t(1, 0) * p.x + t(1, 1) * p.y + t(1, 2) * p.z,
            t(2, 0) * p.x + t(2, 1) * p.y + t(2, 2) * p.z};
}

template <class T>
BasicHPoint<T> apply(const BasicIsometry<T>& t, const BasicHPoint<T>& p) {
    return renormalize(apply_raw(t, p));
}

/// Inverse of a Lorentz isometry: J M^T J with J = diag(1, 1, -1).
template <class T>
BasicIsometry<T> inverse(const BasicIsometry<T>& t) {
    BasicIsometry<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = (((i == 2) != (j == 2)) ? -1 : 1) * t(j, i);
    return r;
}

/// Minkowski Gram-Schmidt on the columns; keeps composition chains inside
/// SO(2,1).
template <class T>
void renormalize(BasicIsometry<T>& t) {
    using P = BasicHPoint<T>;
    auto col = [&](int j) { return P{t(0, j), t(1, j), t(2, j)}; };
    auto set = [&](int j, const P& p) {
        t(0, j) = p.x;
        t(1, j) = p.y;
        t(2, j) = p.z;
    };
    auto sdot = [](const P& a, const P& b) { return -minkowski_dot(a, b); };
    auto axpy = [](P a, T k, const P& b) { return P{a.x + k * b.x, a.y + k * b.y, a.z + k * b.z}; };
    auto scale = [](const P& a, T k) { return P{a.x * k, a.y * k, a.z * k}; };

    const P c2 = renormalize(col(2));
    P c0 = axpy(col(0), sdot(col(0), c2), c2);
    c0 = scale(c0, 1 / std::sqrt(sdot(c0, c0)));
    P c1 = axpy(col(1), sdot(col(1), c2), c2);
    c1 = axpy(c1, -sdot(c1, c0), c0);
    c1 = scale(c1, 1 / std::sqrt(sdot(c1, c1)));
    set(0, c0);
    set(1, c1);
    set(2, c2);
}

/// Center-to-center distance of adjacent tiles in the order-3 tiling by
/// p-gons: the side opposite the 2pi/3 angle of a triangle with angles
/// pi/p, pi/p, 2pi/3.
inline double tiling_edge_length(int p) {
    if (p < 7) throw std::invalid_argument("tiling_edge_length: order-3 p-gon tilings are hyperbolic only for p >= 7");
    const double a = std::numbers::pi / p;
    const double c = (std::cos(2 * std::numbers::pi / 3) + std::cos(a) * std::cos(a)) / (std::sin(a) * std::sin(a));
    return std::acosh(c);
}

}  // namespace dhrg
