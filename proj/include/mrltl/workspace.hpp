#pragma once

// Grid workspace partition, labelling, and the controlled transition system
// abstraction of robot motion over it.
//
// Cells are numbered row-major from the bottom-left corner starting at 1, so
// on a 5 x 6 grid cell R1 spans [0,1]x[0,1] and R30 spans [4,5]x[5,6].

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrltl/geometry.hpp"
#include "mrltl/ltl/formula.hpp"

namespace mrltl {

using RegionId = int;  // 1-based

class OutOfBounds : public std::out_of_range {
public:
    explicit OutOfBounds(Vec2 p)
        : std::out_of_range("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") outside workspace") {}
};

struct Region {
    RegionId id = 0;
    std::string name;
    Rect bounds;
    LabelSet labels = 0;
};

class Workspace {
public:
    Workspace() = default;

    /// Uniform grid of `cols` x `rows` cells over [0, width] x [0, height].
    Workspace(double width, double height, int cols, int rows)
        : width_(width), height_(height), cols_(cols), rows_(rows) {
        if (cols <= 0 || rows <= 0 || !(width > 0.0) || !(height > 0.0))
            throw std::invalid_argument("workspace dimensions must be positive");
        const double cw = width / cols, ch = height / rows;
        if (std::abs(cw - ch) > 1e-9)
            throw std::invalid_argument("workspace cells must be square");
        regions_.reserve(static_cast<std::size_t>(cols * rows));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const RegionId id = r * cols + c + 1;
                regions_.push_back({id, "R" + std::to_string(id),
                                    Rect{c * cw, r * ch, (c + 1) * cw, (r + 1) * ch}, 0});
            }
        blocked_.assign(regions_.size(), 0);
    }

    double width() const noexcept { return width_; }
    double height() const noexcept { return height_; }
    int cols() const noexcept { return cols_; }
    int rows() const noexcept { return rows_; }
    double cell_size() const noexcept { return width_ / cols_; }
    int num_regions() const noexcept { return static_cast<int>(regions_.size()); }
    const std::vector<Region>& regions() const noexcept { return regions_; }
    Rect bounds() const { return {0.0, 0.0, width_, height_}; }

    const Region& region(RegionId id) const {
        check(id);
        return regions_[static_cast<std::size_t>(id - 1)];
    }

    void add_label(RegionId id, int prop) {
        check(id);
        regions_[static_cast<std::size_t>(id - 1)].labels |= prop_bit(prop);
    }

    void set_obstacle(RegionId id, bool blocked = true) {
        check(id);
        blocked_[static_cast<std::size_t>(id - 1)] = blocked ? 1 : 0;
    }
    bool is_obstacle(RegionId id) const {
        check(id);
        return blocked_[static_cast<std::size_t>(id - 1)] != 0;
    }
    std::vector<RegionId> static_obstacles() const {
        std::vector<RegionId> out;
        for (const auto& r : regions_)
            if (blocked_[static_cast<std::size_t>(r.id - 1)]) out.push_back(r.id);
        return out;
    }
    std::vector<Rect> obstacle_rects() const {
        std::vector<Rect> out;
        for (RegionId id : static_obstacles()) out.push_back(region(id).bounds);
        return out;
    }

    bool in_bounds(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= height_;
    }

    int col_of(double x) const { return std::min(static_cast<int>(std::floor(x / cell_size())), cols_ - 1); }
    int row_of(double y) const { return std::min(static_cast<int>(std::floor(y / cell_size())), rows_ - 1); }

    /// Containing cell. Points on shared edges go to the cell with the larger
    /// column, then the larger row.
    RegionId region_of(Vec2 p) const {
        if (!in_bounds(p)) throw OutOfBounds(p);
        return row_of(p.y) * cols_ + col_of(p.x) + 1;
    }

    LabelSet label_of(Vec2 p) const { return region(region_of(p)).labels; }

    /// Regions met by segment [a, b] in traversal order (consecutive duplicates
    /// removed). Exact: the region is constant between grid-line crossings.
    std::vector<RegionId> segment_regions(Vec2 a, Vec2 b) const {
        if (!in_bounds(a) || !in_bounds(b)) throw OutOfBounds(in_bounds(a) ? b : a);
        std::vector<double> ts{0.0, 1.0};
        const double cs = cell_size();
        auto crossings = [&](double p0, double p1, int lines) {
            if (p0 == p1) return;
            const double lo = std::min(p0, p1), hi = std::max(p0, p1);
            for (int k = static_cast<int>(std::ceil(lo / cs)); k <= lines && k * cs <= hi; ++k) {
                const double t = (k * cs - p0) / (p1 - p0);
                if (t > 0.0 && t < 1.0) ts.push_back(t);
            }
        };
        crossings(a.x, b.x, cols_);
        crossings(a.y, b.y, rows_);
        std::sort(ts.begin(), ts.end());
        std::vector<RegionId> out;
        auto push = [&](RegionId id) {
            if (out.empty() || out.back() != id) out.push_back(id);
        };
        auto at = [&](double t) {
            Vec2 p = a + t * (b - a);
            p.x = std::clamp(p.x, 0.0, width_);
            p.y = std::clamp(p.y, 0.0, height_);
            return p;
        };
        for (std::size_t i = 0; i < ts.size(); ++i) {
            push(region_of(at(ts[i])));
            if (i + 1 < ts.size() && ts[i + 1] > ts[i]) push(region_of(at((ts[i] + ts[i + 1]) / 2.0)));
        }
        return out;
    }

    /// Regions adjacent to `id` under 4- or 8-connectivity (excluding itself).
    std::vector<RegionId> neighbors(RegionId id, int connectivity) const {
        check(id);
        const int c = (id - 1) % cols_, r = (id - 1) / cols_;
        std::vector<RegionId> out;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                if (connectivity == 4 && dr != 0 && dc != 0) continue;
                const int nr = r + dr, nc = c + dc;
                if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_) continue;
                out.push_back(nr * cols_ + nc + 1);
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    void check(RegionId id) const {
        if (id < 1 || id > num_regions())
            throw std::out_of_range("region id " + std::to_string(id) + " out of range");
    }

    double width_ = 0.0, height_ = 0.0;
    int cols_ = 0, rows_ = 0;
    std::vector<Region> regions_;
    std::vector<char> blocked_;
};

/// Controlled transition system over workspace regions.
struct Cts {
    int num_regions = 0;
    RegionId initial = 0;
    std::vector<std::vector<RegionId>> successors;  // index id-1, sorted, incl. self
    std::vector<LabelSet> labels;                   // index id-1
    std::vector<char> reachable;                    // from `initial`

    const std::vector<RegionId>& succ(RegionId id) const {
        return successors.at(static_cast<std::size_t>(id - 1));
    }
    LabelSet label(RegionId id) const { return labels.at(static_cast<std::size_t>(id - 1)); }
    std::size_t num_transitions() const {
        std::size_t n = 0;
        for (const auto& s : successors) n += s.size();
        return n;
    }
};

/// Adjacency transitions between free cells plus a dwell self-loop on each;
/// obstacle cells have no transitions at all.
inline Cts build_cts(const Workspace& w, RegionId start, int connectivity = 4) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connectivity must be 4 or 8");
    if (w.is_obstacle(start))
        throw std::invalid_argument("start region R" + std::to_string(start) + " is an obstacle");
    Cts cts;
    cts.num_regions = w.num_regions();
    cts.initial = start;
    cts.successors.resize(static_cast<std::size_t>(cts.num_regions));
    cts.labels.resize(static_cast<std::size_t>(cts.num_regions));
    for (const auto& r : w.regions()) {
        const auto i = static_cast<std::size_t>(r.id - 1);
        cts.labels[i] = r.labels;
        if (w.is_obstacle(r.id)) continue;
        auto& out = cts.successors[i];
        out.push_back(r.id);
        for (RegionId n : w.neighbors(r.id, connectivity))
            if (!w.is_obstacle(n)) out.push_back(n);
        std::sort(out.begin(), out.end());
    }
    cts.reachable.assign(static_cast<std::size_t>(cts.num_regions), 0);
    std::vector<RegionId> stack{start};
    cts.reachable[static_cast<std::size_t>(start - 1)] = 1;
    while (!stack.empty()) {
        const RegionId r = stack.back();
        stack.pop_back();
        for (RegionId n : cts.succ(r)) {
            auto& seen = cts.reachable[static_cast<std::size_t>(n - 1)];
            if (!seen) {
                seen = 1;
                stack.push_back(n);
            }
        }
    }
    return cts;
}

}  // namespace mrltl
