#pragma once

// Moving obstacles, range sensing, broadcast local trajectories and
// region-level conflict detection.

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "mrltl/geometry.hpp"
#include "mrltl/sim/dynamics.hpp"
#include "mrltl/workspace.hpp"

namespace mrltl {

struct Waypoint {
    double t = 0.0;
    Vec2 p;
};

/// Disc moving piecewise-linearly through timed waypoints; holds the first
/// and last waypoint outside the scripted interval.
struct MovingObstacle {
    int id = 0;
    double radius = 0.25;
    std::vector<Waypoint> script;

    void validate(const Workspace& w) const {
        if (script.empty()) throw std::invalid_argument("obstacle " + std::to_string(id) + ": empty script");
        if (!(radius > 0.0)) throw std::invalid_argument("obstacle " + std::to_string(id) + ": radius must be positive");
        for (std::size_t i = 0; i < script.size(); ++i) {
            if (!w.in_bounds(script[i].p))
                throw std::invalid_argument("obstacle " + std::to_string(id) + ": waypoint out of bounds");
            if (i > 0 && !(script[i].t > script[i - 1].t))
                throw std::invalid_argument("obstacle " + std::to_string(id) + ": times must increase");
        }
    }

    Vec2 position(double t) const {
        if (t <= script.front().t) return script.front().p;
        if (t >= script.back().t) return script.back().p;
        const auto it = std::upper_bound(script.begin(), script.end(), t,
                                         [](double tt, const Waypoint& w) { return tt < w.t; });
        const Waypoint& b = *it;
        const Waypoint& a = *(it - 1);
        const double s = (t - a.t) / (b.t - a.t);
        return a.p + s * (b.p - a.p);
    }

    Vec2 velocity(double t) const {
        if (t < script.front().t || t >= script.back().t || script.size() < 2) return {};
        const auto it = std::upper_bound(script.begin(), script.end(), t,
                                         [](double tt, const Waypoint& w) { return tt < w.t; });
        const Waypoint& b = *it;
        const Waypoint& a = *(it - 1);
        return (1.0 / (b.t - a.t)) * (b.p - a.p);
    }

    Disc disc(double t) const { return {position(t), radius}; }
};

/// Seeded random-waypoint walker: straight legs at constant `speed` between
/// uniformly drawn points whose legs keep `radius` clear of static obstacles.
inline MovingObstacle random_walker(int id, double radius, double speed, Vec2 start, double duration,
                                    const Workspace& w, std::mt19937_64& rng) {
    if (!(speed > 0.0)) throw std::invalid_argument("walker speed must be positive");
    const auto rects = w.obstacle_rects();
    std::uniform_real_distribution<double> ux(radius, w.width() - radius), uy(radius, w.height() - radius);
    MovingObstacle o{id, radius, {{0.0, start}}};
    double t = 0.0;
    Vec2 p = start;
    while (t < duration) {
        Vec2 q;
        int tries = 0;
        for (;; ++tries) {
            if (tries > 1000) throw std::runtime_error("walker: no obstacle-free leg found");
            q = {ux(rng), uy(rng)};
            if (distance(p, q) < 0.5) continue;
            bool clear = true;
            for (const auto& r : rects) clear = clear && distance(p, q, r) > radius;
            if (clear) break;
        }
        t += distance(p, q) / speed;
        o.script.push_back({t, q});
        p = q;
    }
    return o;
}

struct TimedPoint {
    double t = 0.0;
    Vec2 p;
};

/// Predicted motion of one robot over [t, t + delta], time-ordered.
struct LocalTrajectory {
    int owner = -1;
    std::vector<TimedPoint> samples;

    double horizon() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }

    /// Regions met by the polyline through the samples, in traversal order.
    std::vector<RegionId> regions(const Workspace& w) const {
        std::vector<RegionId> out;
        if (samples.empty()) return out;
        out.push_back(w.region_of(samples.front().p));
        for (std::size_t i = 1; i < samples.size(); ++i)
            for (RegionId r : w.segment_regions(samples[i - 1].p, samples[i].p))
                if (out.back() != r) out.push_back(r);
        return out;
    }
};

struct SensedRobot {
    int id = 0;
    RobotState state;
    double radius = 0.0;
    std::optional<LocalTrajectory> broadcast;  // communication mode only
};

struct SensedObstacle {
    int id = 0;
    Vec2 position;
    double radius = 0.0;
};

struct SensorSnapshot {
    int observer = 0;
    std::vector<SensedRobot> robots;
    std::vector<SensedObstacle> obstacles;

    bool empty() const { return robots.empty() && obstacles.empty(); }
    std::vector<Disc> discs() const {
        std::vector<Disc> out;
        for (const auto& r : robots) out.push_back({r.state.position(), r.radius});
        for (const auto& o : obstacles) out.push_back({o.position, o.radius});
        return out;
    }
};

struct RobotView {
    int id = 0;
    RobotState state;
    double radius = 0.0;
    const LocalTrajectory* broadcast = nullptr;
};

/// Entities whose centre lies within the closed ball B(p, range) of the
/// observer. Broadcasts are attached only when `comm` is set.
inline SensorSnapshot sense(const RobotView& me, double range, const std::vector<RobotView>& robots,
                            const std::vector<SensedObstacle>& obstacles, bool comm) {
    SensorSnapshot snap;
    snap.observer = me.id;
    const Vec2 p = me.state.position();
    for (const auto& r : robots) {
        if (r.id == me.id || distance(p, r.state.position()) > range) continue;
        SensedRobot s{r.id, r.state, r.radius, std::nullopt};
        if (comm && r.broadcast) s.broadcast = *r.broadcast;
        snap.robots.push_back(std::move(s));
    }
    for (const auto& o : obstacles)
        if (distance(p, o.position) <= range) snap.obstacles.push_back(o);
    return snap;
}

struct ConflictRecord {
    int robot = 0;
    int other = 0;
    RegionId region = 0;
    long tick = 0;
    friend bool operator==(const ConflictRecord&, const ConflictRecord&) = default;
};

/// One record per (neighbour, region) both local trajectories pass through,
/// sorted by (neighbour, region).
inline std::vector<ConflictRecord> detect_conflicts(const LocalTrajectory& mine,
                                                    const std::vector<LocalTrajectory>& neighbors,
                                                    const Workspace& w, long tick = 0) {
    std::vector<ConflictRecord> out;
    auto own = mine.regions(w);
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());
    for (const auto& n : neighbors) {
        if (n.owner == mine.owner) continue;
        auto theirs = n.regions(w);
        std::sort(theirs.begin(), theirs.end());
        theirs.erase(std::unique(theirs.begin(), theirs.end()), theirs.end());
        std::vector<RegionId> both;
        std::set_intersection(own.begin(), own.end(), theirs.begin(), theirs.end(), std::back_inserter(both));
        for (RegionId r : both) out.push_back({mine.owner, n.owner, r, tick});
    }
    std::sort(out.begin(), out.end(), [](const ConflictRecord& a, const ConflictRecord& b) {
        return std::tie(a.other, a.region) < std::tie(b.other, b.region);
    });
    return out;
}

}  // namespace mrltl
