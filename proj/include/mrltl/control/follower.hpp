#pragma once

// Low-level plan following: shortest safe route over the region graph and a
// turn-then-drive point tracker.

#include <cmath>
#include <deque>
#include <vector>

#include "mrltl/sim/dynamics.hpp"
#include "mrltl/workspace.hpp"

namespace mrltl {

/// Shortest region path from `from` to `to` in the CTS avoiding `blocked`
/// regions (index id-1); `to` itself is always allowed. Empty if none.
inline std::vector<RegionId> safe_route(const Cts& cts, RegionId from, RegionId to, const std::vector<char>& blocked) {
    if (from == to) return {from};
    std::vector<RegionId> parent(static_cast<std::size_t>(cts.num_regions + 1), 0);
    std::deque<RegionId> queue{from};
    parent[static_cast<std::size_t>(from)] = from;
    while (!queue.empty()) {
        const RegionId r = queue.front();
        queue.pop_front();
        for (RegionId n : cts.succ(r)) {
            if (parent[static_cast<std::size_t>(n)] != 0) continue;
            if (n != to && !blocked.empty() && blocked[static_cast<std::size_t>(n - 1)]) continue;
            parent[static_cast<std::size_t>(n)] = r;
            if (n == to) {
                std::vector<RegionId> path{to};
                for (RegionId v = to; v != from;) path.push_back(v = parent[static_cast<std::size_t>(v)]);
                return {path.rbegin(), path.rend()};
            }
            queue.push_back(n);
        }
    }
    return {};
}

struct TrackerParams {
    double k_w = 1.5;        // heading gain (1/s)
    double arrive = 0.05;    // stop radius (m)
    int speed_shape = 4;     // v = v_max * max(0, cos(err))^speed_shape
};

/// Heads for `target`: turn rate proportional to heading error, forward
/// speed shaped by the cosine of the error so large errors rotate in place.
inline ControlInput track_point(const RobotState& s, Vec2 target, const InputBounds& bounds,
                                const TrackerParams& p = {}) {
    const Vec2 d = target - s.position();
    const double dist = norm(d);
    if (dist < p.arrive) return {};
    const double err = wrap_angle(std::atan2(d.y, d.x) - s.theta);
    const double c = std::max(0.0, std::cos(err));
    double v = bounds.v_max * std::pow(c, p.speed_shape);
    v = std::min(v, dist / 0.5);  // slow down on final approach
    return bounds.clamp({v, p.k_w * err});
}

}  // namespace mrltl
