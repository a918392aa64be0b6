#pragma once

// Lazily generated order-3 tessellations ({7,3} and {8,3}).
//
// Layer structure: every non-root tile has one (type 1) or two (type 2)
// neighbours in the previous layer, two in its own layer and the rest in the
// next one. The tree used for addressing links every tile to its right
// parent. Conventions, frozen because address files depend on them:
//
//  * adj(t, i) enumerates neighbours in one rotational direction, starting at
//    the right parent:
//      root:    children 0..p-1
//      type 1:  right parent, left sibling, next-layer tiles left to right,
//               right sibling
//      type 2:  right parent, left parent, left sibling, next-layer tiles left
//               to right, right sibling
//  * the next-layer tile shared by t and its left sibling is a type-2 tile
//    whose right parent is t; it is t's owned child 0. The rightmost
//    next-layer neighbour of t is owned child 0 of t's right sibling.
//  * owned children: root owns p type-1 tiles; a type-1 tile owns
//    [2, 1 x (p-5)], a type-2 tile owns [2, 1 x (p-6)].
//  * geometrically, neighbour i of a tile sits at angle 2*pi*i/p in the
//    tile's own frame, measured counterclockwise.

#include <atomic>
#include <charconv>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypgeom.hpp"

namespace dhrg {

using BigCount = boost::multiprecision::cpp_int;

enum class TileType : std::uint8_t { kRoot = 0, kOneParent = 1, kTwoParents = 2 };

struct TilingRules {
    std::string name;
    int p = 7;
    // Largest number of sibling steps between two ancestor segments that the
    // distance and tally algorithms must bridge on one layer. Ancestor
    // segments themselves are at most one step wide, but two type-1 tiles
    // flanking a shared type-2 tile (e.g. 6/2 and 0/1) are two sibling steps
    // apart with no shorter route through their parents.
    int segment_gap = 2;

    /// Number of tiles whose right parent is a tile of the given type.
    int owned_children(TileType type) const {
        switch (type) {
            case TileType::kRoot: return p;
            case TileType::kOneParent: return p - 4;
            case TileType::kTwoParents: return p - 5;
        }
        return 0;
    }

    /// All neighbours in the next layer, including the one owned by the right sibling.
    int next_layer_neighbors(TileType type) const {
        return type == TileType::kRoot ? p : owned_children(type) + 1;
    }

    TileType owned_child_type(TileType parent, int index) const {
        if (parent == TileType::kRoot) return TileType::kOneParent;
        return index == 0 ? TileType::kTwoParents : TileType::kOneParent;
    }

    /// adj index (in the parent's enumeration) of the parent's owned child k.
    int child_adj_index(TileType parent, int k) const {
        switch (parent) {
            case TileType::kRoot: return k;
            case TileType::kOneParent: return k + 2;
            case TileType::kTwoParents: return k + 3;
        }
        return k;
    }

    static TilingRules g710() { return {"g710", 7, 2}; }
    static TilingRules g810() { return {"g810", 8, 2}; }

    static TilingRules from_name(std::string_view name) {
        if (name == "g710") return g710();
        if (name == "g810") return g810();
        throw std::invalid_argument("unknown tiling '" + std::string(name) + "' (expected g710 or g810)");
    }
};

/// Number of depth-k descendants (in the right-parent tree) of a tile of each
/// type; row kRoot is the ring size |R_k|.
class RingTable {
public:
    explicit RingTable(const TilingRules& rules, int depth = 64) : rules_(rules) { ensure(depth); }

    /// Not thread-safe; call before sharing the table.
    void ensure(int depth) {
        if (totals_[0].empty()) {
            totals_[0].push_back(1);
            totals_[1].push_back(1);
            totals_[2].push_back(1);
        }
        const int p = rules_.p;
        while (static_cast<int>(totals_[0].size()) <= depth) {
            const std::size_t k = totals_[0].size() - 1;
            BigCount t0 = BigCount(p) * totals_[1][k];
            BigCount t1 = totals_[2][k] + BigCount(p - 5) * totals_[1][k];
            BigCount t2 = totals_[2][k] + BigCount(p - 6) * totals_[1][k];
            totals_[0].push_back(std::move(t0));
            totals_[1].push_back(std::move(t1));
            totals_[2].push_back(std::move(t2));
        }
        for (int t = 0; t < 3; ++t) {
            approx_[t].resize(totals_[t].size());
            for (std::size_t k = 0; k < totals_[t].size(); ++k) approx_[t][k] = totals_[t][k].convert_to<double>();
        }
    }

    int depth() const { return static_cast<int>(totals_[0].size()) - 1; }

    const BigCount& count(TileType type, int depth) const { return totals_[static_cast<int>(type)].at(depth); }
    double approx(TileType type, int depth) const { return approx_[static_cast<int>(type)].at(depth); }
    const TilingRules& rules() const { return rules_; }

private:
    TilingRules rules_;
    std::vector<BigCount> totals_[3];
    std::vector<double> approx_[3];
};

inline BigCount ring_size(int d, const TilingRules& rules) {
    if (d < 0) throw std::invalid_argument("ring_size: negative layer");
    RingTable table(rules, d);
    return table.count(TileType::kRoot, d);
}

inline BigCount subtree_ring_count(TileType type, int depth, const TilingRules& rules) {
    if (depth < 0) throw std::invalid_argument("subtree_ring_count: negative depth");
    RingTable table(rules, depth);
    return table.count(type, depth);
}

struct Tile {
    std::uint32_t id = 0;
    std::int32_t layer = 0;
    TileType type = TileType::kRoot;
    std::uint8_t child_index = 0;  // position among the right parent's owned children
    Tile* parent = nullptr;        // right parent
    std::atomic<Tile*> children{nullptr};
    std::atomic<Tile*> left_sibling{nullptr};
    std::atomic<Tile*> right_sibling{nullptr};
};

using TileAddress = std::vector<int>;
using Frame = BasicIsometry<long double>;

/// tiling_edge_length evaluated in long double.
inline long double edge_length_long(int p) {
    if (p < 7) throw std::invalid_argument("tiling_edge_length: order-3 p-gon tilings are hyperbolic only for p >= 7");
    const long double a = std::numbers::pi_v<long double> / p;
    const long double c = (std::cos(2 * std::numbers::pi_v<long double> / 3) + std::cos(a) * std::cos(a)) /
                          (std::sin(a) * std::sin(a));
    return std::acosh(c);
}

inline std::string address_to_string(const TileAddress& address) {
    std::string out;
    for (std::size_t i = 0; i < address.size(); ++i) {
        if (i) out += '/';
        out += std::to_string(address[i]);
    }
    return out;
}

inline TileAddress address_from_string(std::string_view text) {
    TileAddress out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t slash = text.find('/', pos);
        const std::string_view part = text.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || value < 0)
            throw std::invalid_argument("malformed tile address '" + std::string(text) + "'");
        out.push_back(value);
        if (slash == std::string_view::npos) break;
        pos = slash + 1;
    }
    return out;
}

/// The lazily materialized tile graph. Tiles are never freed and keep their
/// address for the lifetime of the tessellation. Materialization is guarded by
/// a lock; navigation over already-known links is lock-free.
class Tessellation {
public:
    explicit Tessellation(TilingRules rules)
        : rules_(std::move(rules)),
          edge_length_(tiling_edge_length(rules_.p)),
          edge_length_ld_(edge_length_long(rules_.p)),
          step_angle_(2 * std::numbers::pi / rules_.p) {
        root_ = allocate(1);
        root_->type = TileType::kRoot;
        frames_.emplace(root_, Frame{});
    }

    Tessellation(const Tessellation&) = delete;
    Tessellation& operator=(const Tessellation&) = delete;

    const TilingRules& rules() const { return rules_; }
    int p() const { return rules_.p; }
    double edge_length() const { return edge_length_; }
    Tile* root() const { return root_; }

    std::size_t tile_count() const {
        std::lock_guard lock(mutex_);
        return allocated_;
    }
    /// Upper bound (exclusive) on tile ids handed out so far.
    std::uint32_t id_bound() const {
        std::lock_guard lock(mutex_);
        return static_cast<std::uint32_t>(chunks_.size() * kChunkSize);
    }

    int owned_count(const Tile* t) const { return rules_.owned_children(t->type); }

    Tile* child(Tile* t, int k) {
        if (k < 0 || k >= owned_count(t)) throw std::out_of_range("child index out of range");
        return children(t) + k;
    }

    Tile* right_parent(Tile* t) const { return t->parent; }
    Tile* left_parent(Tile* t) {
        if (t->type == TileType::kTwoParents) return left_sibling(t->parent);
        return t->parent;
    }

    Tile* right_sibling(Tile* c) {
        if (Tile* s = c->right_sibling.load(std::memory_order_acquire)) return s;
        if (!c->parent) throw std::logic_error("the root tile has no siblings");
        Tile* t = c->parent;
        const int j = c->child_index;
        Tile* s;
        if (t->type == TileType::kRoot)
            s = children(t) + (j + 1) % rules_.p;
        else if (j + 1 < owned_count(t))
            s = children(t) + j + 1;
        else
            s = children(right_sibling(t));
        c->right_sibling.store(s, std::memory_order_release);
        return s;
    }

    Tile* left_sibling(Tile* c) {
        if (Tile* s = c->left_sibling.load(std::memory_order_acquire)) return s;
        if (!c->parent) throw std::logic_error("the root tile has no siblings");
        Tile* t = c->parent;
        const int j = c->child_index;
        Tile* s;
        if (t->type == TileType::kRoot)
            s = children(t) + (j + rules_.p - 1) % rules_.p;
        else if (j > 0)
            s = children(t) + j - 1;
        else {
            Tile* u = left_sibling(t);
            s = children(u) + owned_count(u) - 1;
        }
        c->left_sibling.store(s, std::memory_order_release);
        return s;
    }

    /// k-th right sibling for k >= 0, k-th left sibling for k < 0.
    Tile* sibling_step(Tile* t, int k) {
        for (; k > 0; --k) t = right_sibling(t);
        for (; k < 0; ++k) t = left_sibling(t);
        return t;
    }

    /// k-th next-layer neighbour of t, left to right.
    Tile* next_layer(Tile* t, int k) {
        const int owned = owned_count(t);
        if (k < owned) return children(t) + k;
        return children(right_sibling(t));
    }

    Tile* adj(Tile* t, int i) {
        const int p = rules_.p;
        if (i < 0 || i >= p) throw std::out_of_range("adj: neighbour index out of range");
        switch (t->type) {
            case TileType::kRoot: return children(t) + i;
            case TileType::kOneParent:
                if (i == 0) return t->parent;
                if (i == 1) return left_sibling(t);
                if (i == p - 1) return right_sibling(t);
                return next_layer(t, i - 2);
            case TileType::kTwoParents:
                if (i == 0) return t->parent;
                if (i == 1) return left_parent(t);
                if (i == 2) return left_sibling(t);
                if (i == p - 1) return right_sibling(t);
                return next_layer(t, i - 3);
        }
        return nullptr;
    }

    /// Index of `neighbor` in adj(t, .), or -1 when the tiles are not adjacent.
    int adj_index(Tile* t, Tile* neighbor) {
        for (int i = 0; i < rules_.p; ++i)
            if (adj(t, i) == neighbor) return i;
        return -1;
    }

    TileAddress encode_address(const Tile* t) const {
        TileAddress out(static_cast<std::size_t>(t->layer));
        for (int k = t->layer - 1; k >= 0; --k, t = t->parent) out[static_cast<std::size_t>(k)] = t->child_index;
        return out;
    }

    Tile* resolve_address(const TileAddress& address) {
        Tile* t = root_;
        for (int k : address) {
            if (k < 0 || k >= owned_count(t))
                throw std::out_of_range("tile address component " + std::to_string(k) + " out of range (tile owns " +
                                        std::to_string(owned_count(t)) + " children)");
            t = children(t) + k;
        }
        return t;
    }

    /// Frame of the neighbour in adj slot i, relative to the current tile,
    /// given that the current tile is the neighbour's slot j.
    template <class T = double>
    BasicIsometry<T> neighbor_transform(int i, int j) const {
        const T step = 2 * std::numbers::pi_v<T> / rules_.p;
        return compose(compose(rotate<T>(-i * step), translate_x<T>(static_cast<T>(edge_length_ld_))),
                       rotate<T>(j * step - std::numbers::pi_v<T>));
    }

    /// Frame of owned child k relative to a tile of the given type.
    template <class T = double>
    BasicIsometry<T> child_transform(TileType parent_type, int k) const {
        return neighbor_transform<T>(rules_.child_adj_index(parent_type, k), 0);
    }

    /// Isometry mapping the tile's local frame (center at the origin,
    /// neighbour i in direction 2*pi*i/p) into root coordinates. Kept in long
    /// double; far tiles lose precision quickly in double.
    Frame tile_frame(const Tile* t) const {
        {
            std::shared_lock lock(frames_mutex_);
            if (auto it = frames_.find(t); it != frames_.end()) return it->second;
        }
        std::vector<const Tile*> path;
        Frame frame;
        {
            std::shared_lock lock(frames_mutex_);
            const Tile* cur = t;
            while (true) {
                auto it = frames_.find(cur);
                if (it != frames_.end()) {
                    frame = it->second;
                    break;
                }
                path.push_back(cur);
                cur = cur->parent;
            }
        }
        std::unique_lock lock(frames_mutex_);
        // Plain products keep relative precision along outward paths; a
        // Gram-Schmidt pass would cancel catastrophically on large boosts.
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            frame = compose(frame, child_transform<long double>((*it)->parent->type, (*it)->child_index));
            frames_.emplace(*it, frame);
        }
        return frame;
    }

    HPoint tile_center(const Tile* t) const {
        return static_cast<HPoint>(apply(tile_frame(t), BasicHPoint<long double>{}));
    }

    /// Polar coordinates of the tile center, taken from the long double frame.
    BasicPolar<long double> tile_polar_ext(const Tile* t) const {
        const Frame f = tile_frame(t);
        return to_polar(BasicHPoint<long double>{f(0, 2), f(1, 2), f(2, 2)});
    }

    PolarCoord tile_polar(const Tile* t) const {
        const auto p = tile_polar_ext(t);
        return {static_cast<double>(p.r), static_cast<double>(p.phi)};
    }

    /// Hyperbolic distance between two tile centers, accurate far from the root.
    double center_distance(const Tile* a, const Tile* b) const {
        return static_cast<double>(polar_distance(tile_polar_ext(a), tile_polar_ext(b)));
    }

    /// Nearest tile center by greedy descent from the root. The point is
    /// carried in the current tile's frame, so only distances to nearby
    /// centers are ever compared.
    Tile* locate(const HPoint& point) {
        Tile* t = root_;
        HPoint q = renormalize(point);
        const int p = rules_.p;
        while (true) {
            double best = std::acosh(std::max(1.0, q.z));
            int best_i = -1;
            for (int i = 0; i < p; ++i) {
                const double d = hdist(q, polar_point(edge_length_, i * step_angle_));
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            if (best_i < 0) return t;
            Tile* next = adj(t, best_i);
            const int j = adj_index(next, t);
            q = apply(inverse(neighbor_transform<double>(best_i, j)), q);
            t = next;
        }
    }

private:
    static constexpr std::size_t kChunkSize = 1u << 15;

    Tile* children(Tile* t) {
        if (Tile* c = t->children.load(std::memory_order_acquire)) return c;
        std::lock_guard lock(mutex_);
        if (Tile* c = t->children.load(std::memory_order_relaxed)) return c;
        const int k = owned_count(t);
        Tile* block = allocate_locked(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            Tile& c = block[i];
            c.layer = t->layer + 1;
            c.type = rules_.owned_child_type(t->type, i);
            c.child_index = static_cast<std::uint8_t>(i);
            c.parent = t;
        }
        t->children.store(block, std::memory_order_release);
        return block;
    }

    Tile* allocate(std::size_t n) {
        std::lock_guard lock(mutex_);
        return allocate_locked(n);
    }

    Tile* allocate_locked(std::size_t n) {
        if (chunks_.empty() || used_ + n > kChunkSize) {
            chunks_.push_back(std::make_unique<Tile[]>(kChunkSize));
            used_ = 0;
        }
        Tile* block = chunks_.back().get() + used_;
        const std::size_t base = (chunks_.size() - 1) * kChunkSize + used_;
        for (std::size_t i = 0; i < n; ++i) block[i].id = static_cast<std::uint32_t>(base + i);
        used_ += n;
        allocated_ += n;
        return block;
    }

    TilingRules rules_;
    double edge_length_;
    long double edge_length_ld_;
    double step_angle_;
    Tile* root_ = nullptr;

    mutable std::mutex mutex_;
    std::vector<std::unique_ptr<Tile[]>> chunks_;
    std::size_t used_ = 0;
    std::size_t allocated_ = 0;

    mutable std::shared_mutex frames_mutex_;
    mutable std::unordered_map<const Tile*, Frame> frames_;
};

}  // namespace dhrg
