#pragma once

// Distance tally counter: a weighted multiset of tiles that answers "how much
// weight sits at each distance from t" in O(R^2) per query.
//
// Every added tile w registers weight along its ancestor segment chain
// [w,w], P[w,w], P^2[w,w], ...; the segment reached after i steps stores the
// weight in slot i. A query climbs the ancestor segments of t; at each level
// it collects the registered segments within segment_gap sibling steps and
// charges their slots at (levels climbed + separation + i). A tile is seen at every
// level where its chain is close to the query chain, but only the highest such
// level gives its distance; the lower contributions are cancelled by
// subtracting each segment's weights at its parent's base one slot further.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tessellation.hpp"
#include "tile_distance.hpp"

namespace dhrg {

class TallyCounter {
public:
    TallyCounter(Tessellation& tes, int R) : tes_(&tes), R_(R), gap_(tes.rules().segment_gap) {
        if (R < 0) throw std::invalid_argument("tally counter radius must be non-negative");
    }

    int radius() const { return R_; }
    int gap() const { return gap_; }
    Tessellation& tessellation() const { return *tes_; }
    std::size_t histogram_size() const { return static_cast<std::size_t>(2 * R_ + gap_ + 1); }
    std::size_t segment_count() const { return segments_.size(); }

    void add(Tile* u, std::int64_t x) {
        check_depth(u, "add");
        Segment* s = find_or_create(u, u);
        for (std::size_t i = 0;; ++i) {
            if (s->weights.size() <= i) s->weights.resize(i + 1, 0);
            s->weights[i] += x;
            if (s->left->layer == 0) break;
            if (!s->parent) s->parent = find_or_create(tes_->left_parent(s->left), tes_->right_parent(s->right));
            s = s->parent;
        }
    }

    /// Weight of the multiset at each distance from t; does not modify the
    /// counter, so concurrent counts are fine (concurrent adds are not).
    std::vector<std::int64_t> count(Tile* t) const {
        std::vector<std::int64_t> out(histogram_size(), 0);
        count_into(t, out);
        return out;
    }

    /// Adds count(t) into `out`, which must have histogram_size() entries.
    void count_into(Tile* t, std::vector<std::int64_t>& out) const {
        check_depth(t, "count");
        if (out.size() < histogram_size()) throw std::invalid_argument("tally histogram buffer too small");
        if (segments_.empty()) return;

        const int levels = t->layer + 1;
        std::vector<std::vector<Candidate>> near(static_cast<std::size_t>(levels));
        SegmentState q(t);
        for (int a = 0; a < levels; ++a, q.push(*tes_)) collect(q, a, near[static_cast<std::size_t>(a)]);

        for (int a = 0; a < levels; ++a) {
            for (const Candidate& c : near[static_cast<std::size_t>(a)]) {
                const auto& w = c.segment->weights;
                for (std::size_t i = 0; i < w.size(); ++i) charge(out, c.base + i, w[i]);
                if (a + 1 >= levels || !c.segment->parent) continue;
                for (const Candidate& up : near[static_cast<std::size_t>(a + 1)]) {
                    if (up.segment != c.segment->parent) continue;
                    for (std::size_t i = 0; i < w.size(); ++i) charge(out, up.base + i + 1, -w[i]);
                    break;
                }
            }
        }
    }

private:
    struct Segment {
        Tile* left;
        Tile* right;
        int width;  // sibling steps from left to right
        Segment* parent = nullptr;
        Segment* next_same_left = nullptr;
        std::vector<std::int64_t> weights;
    };

    struct Candidate {
        const Segment* segment;
        std::size_t base;
    };

    void check_depth(const Tile* t, const char* op) const {
        if (t->layer > R_)
            throw std::out_of_range(std::string("tally ") + op + ": tile layer " + std::to_string(t->layer) +
                                    " exceeds counter radius " + std::to_string(R_));
    }

    void charge(std::vector<std::int64_t>& out, std::size_t index, std::int64_t x) const {
        if (index >= histogram_size()) throw std::logic_error("tally counter: distance beyond 2R+gap");
        out[index] += x;
    }

    const Segment* head(const Tile* x) const { return x->id < heads_.size() ? heads_[x->id] : nullptr; }

    Segment* find_or_create(Tile* left, Tile* right) {
        if (left->id >= heads_.size()) heads_.resize(std::max<std::size_t>(left->id + 1, heads_.size() * 2), nullptr);
        for (Segment* s = heads_[left->id]; s; s = s->next_same_left)
            if (s->right == right) return s;
        int width = 0;
        for (Tile* cur = left; cur != right; cur = tes_->right_sibling(cur))
            if (++width > gap_) throw std::logic_error("tally counter: ancestor segment wider than the segment gap");
        Segment& s = segments_.emplace_back(Segment{left, right, width, nullptr, heads_[left->id], {}});
        heads_[left->id] = &s;
        return &s;
    }

    // Registered segments whose sibling-step separation from q is at most the
    // gap, each with its distance to the query tile.
    void collect(const SegmentState& q, int a, std::vector<Candidate>& out) const {
        if (q.layer == 0) {
            if (const Segment* s = head(q.left)) out.push_back({s, static_cast<std::size_t>(a)});
            return;
        }
        int qwidth = 0;
        for (Tile* cur = q.left; cur != q.right; cur = tes_->right_sibling(cur)) ++qwidth;

        const int lo = -(gap_ + gap_), hi = qwidth + gap_;
        // On the first ring the window can wrap around; a segment then shows
        // up twice and the nearer sighting wins.
        const std::size_t first = out.size();
        Tile* x = tes_->sibling_step(q.left, lo);
        for (int o = lo; o <= hi; ++o, x = tes_->right_sibling(x)) {
            for (const Segment* s = head(x); s; s = s->next_same_left) {
                const int sep = std::max({0, o - qwidth, -(o + s->width)});
                if (sep > gap_) continue;
                const auto base = static_cast<std::size_t>(a + sep);
                auto it = std::find_if(out.begin() + first, out.end(), [&](const Candidate& c) { return c.segment == s; });
                if (it == out.end())
                    out.push_back({s, base});
                else
                    it->base = std::min(it->base, base);
            }
        }
    }

    Tessellation* tes_;
    int R_;
    int gap_;
    std::deque<Segment> segments_;
    std::vector<Segment*> heads_;  // by tile id: registered segments with that left end
};

}  // namespace dhrg
