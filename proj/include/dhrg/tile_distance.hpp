#pragma once

// Exact tile distance via canonical shortest paths: climb both tiles through
// their leftmost/rightmost ancestors until the two ancestor segments meet or
// sit within segment_gap sibling steps of each other.

#include <limits>

#include "tessellation.hpp"

namespace dhrg {

inline int delta0(const Tile* t) { return t->layer; }

/// Ancestor segment [p_L^a(v), p_R^a(v)] of a tile, at layer `layer`.
struct SegmentState {
    Tile* left = nullptr;
    Tile* right = nullptr;
    int layer = 0;
    int steps = 0;

    SegmentState() = default;
    explicit SegmentState(Tile* v) : left(v), right(v), layer(v->layer) {}

    void push(Tessellation& tes) {
        ++steps;
        if (layer == 0) return;  // the root is its own parent segment
        --layer;
        left = tes.left_parent(left);
        right = tes.right_parent(right);
    }
};

namespace detail {

/// True if `t` lies on the ring between `left` and `right` (inclusive),
/// scanning at most max_steps right siblings.
inline bool ring_contains(Tessellation& tes, Tile* left, Tile* right, Tile* t, int max_steps) {
    Tile* cur = left;
    for (int k = 0; k <= max_steps; ++k) {
        if (cur == t) return true;
        if (cur == right) return false;
        cur = tes.right_sibling(cur);
    }
    return false;
}

}  // namespace detail

/// Graph distance between two tiles of the same tessellation, in time
/// proportional to the distance.
inline int tile_distance(Tessellation& tes, Tile* v1, Tile* v2, int gap) {
    SegmentState s[2] = {SegmentState(v1), SegmentState(v2)};
    Tile* v[2] = {v1, v2};
    while (s[0].layer > s[1].layer) s[0].push(tes);
    while (s[1].layer > s[0].layer) s[1].push(tes);

    // A shallower tile inside the other's ancestor segment: only reachable
    // with wide segments (gap > 1); for gap 1 the main loop catches it too.
    for (int i = 0; i < 2; ++i)
        if (s[1 - i].steps > 0 && detail::ring_contains(tes, s[1 - i].left, s[1 - i].right, v[i], gap))
            return s[1 - i].steps;

    int best = std::numeric_limits<int>::max();
    while (s[0].steps + s[1].steps < best) {
        for (int i = 0; i < 2; ++i) {
            Tile* probe = s[1 - i].right;
            for (int k = 0; k <= gap; ++k) {
                if (s[i].left == probe) {
                    best = std::min(best, s[0].steps + s[1].steps + k);
                    break;
                }
                if (k < gap && probe->layer > 0) probe = tes.right_sibling(probe);
            }
        }
        s[0].push(tes);
        s[1].push(tes);
    }
    return best;
}

inline int tile_distance(Tessellation& tes, Tile* v1, Tile* v2) {
    return tile_distance(tes, v1, v2, tes.rules().segment_gap);
}

}  // namespace dhrg
