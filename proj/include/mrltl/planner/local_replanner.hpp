#pragma once

// Sampling-based local trajectory generation inside the sensing region,
// gated by Buchi tracking and the product potential, with priority-ordered
// conflict resolution and a global replan from the returned leaf.

#include <algorithm>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "mrltl/planner/product.hpp"
#include "mrltl/sim/dynamics.hpp"
#include "mrltl/sim/world.hpp"

namespace mrltl {

struct ReplanParams {
    int n_max = 600;
    double eta = 0.3;       // sampling margin beyond the sensing radius (m)
    double tau_s = 0.5;     // steering duration (s)
    double r_safe = 0.3;    // safety radius (m)
    double lambda = 0.1;    // heading weight in the state metric (m/rad)
    int steer_grid = 21;    // input values per axis
    int substeps = 5;       // collision-check subdivisions per steering edge

    void validate() const {
        if (n_max <= 0 || !(eta > 0) || !(tau_s > 0) || !(r_safe > 0) || !(lambda >= 0) || steer_grid < 2 ||
            substeps < 1)
            throw std::invalid_argument("invalid replan parameters");
    }
};

/// Robots in each conflict cluster in ascending id order, clusters
/// concatenated by their smallest id. A record with a negative `other`
/// stands for an obstacle-only trigger.
inline std::vector<int> assign_priorities(const std::vector<ConflictRecord>& conflicts) {
    std::map<int, int> parent;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto add = [&](int x) { parent.emplace(x, x); };
    for (const auto& c : conflicts) {
        add(c.robot);
        if (c.other < 0) continue;
        add(c.other);
        const int a = find(c.robot), b = find(c.other);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<int, std::vector<int>> clusters;
    for (const auto& [id, _] : parent) clusters[find(id)].push_back(id);
    std::vector<int> order;
    for (const auto& [_, ids] : clusters) order.insert(order.end(), ids.begin(), ids.end());
    return order;
}

inline double state_distance(const RobotState& a, const RobotState& b, double lambda) {
    return distance(a.position(), b.position()) + lambda * std::abs(wrap_angle(a.theta - b.theta));
}

/// Uniform over B(center, radius + eta) within the workspace and outside
/// static obstacle cells; heading uniform in (-pi, pi].
template <class Rng>
RobotState generate_sample(Vec2 center, double radius, double eta, const Workspace& w, Rng& rng) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    const double big = radius + eta;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int tries = 0; tries < 1000; ++tries) {
        const double r = big * std::sqrt(unit(rng));
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        const Vec2 p{center.x + r * std::cos(phi), center.y + r * std::sin(phi)};
        const double theta = std::numbers::pi - 2.0 * std::numbers::pi * unit(rng);  // (-pi, pi]
        if (!w.in_bounds(p) || w.is_obstacle(w.region_of(p))) continue;
        return {p.x, p.y, theta};
    }
    throw std::runtime_error("generate_sample: no free sample after 1000 tries");
}

struct LocalNode {
    RobotState state;
    std::vector<int> buchi;
    int parent = -1;
    ControlInput u;  // input applied from the parent for tau_s
};

struct LocalTree {
    std::vector<LocalNode> nodes;

    /// Nodes from the root to `leaf`, inclusive.
    std::vector<int> path_to(int leaf) const {
        std::vector<int> out;
        for (int v = leaf; v >= 0; v = nodes.at(static_cast<std::size_t>(v)).parent) out.push_back(v);
        std::reverse(out.begin(), out.end());
        return out;
    }
};

/// Node minimizing the composite state distance; ties to the earlier node.
inline int nearest(const LocalTree& tree, const RobotState& s, double lambda) {
    if (tree.nodes.empty()) throw std::invalid_argument("nearest: empty tree");
    int best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const double d = state_distance(tree.nodes[i].state, s, lambda);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

struct SteerResult {
    RobotState reached;
    ControlInput u;
};

/// Grid search over `grid` x `grid` constant inputs applied for tau seconds.
inline SteerResult steer(const RobotState& from, const RobotState& target, double tau, const InputBounds& bounds,
                         int grid, double lambda) {
    if (!(tau > 0.0)) throw std::invalid_argument("steer: tau must be positive");
    SteerResult best{from, {}};
    double best_d = state_distance(from, target, lambda);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const ControlInput u{-bounds.v_max + 2.0 * bounds.v_max * i / (grid - 1),
                                 -bounds.w_max + 2.0 * bounds.w_max * j / (grid - 1)};
            const RobotState r = step_unicycle(from, u, tau);
            const double d = state_distance(r, target, lambda);
            if (d < best_d) {
                best_d = d;
                best = {r, u};
            }
        }
    return best;
}

/// True iff segment [a, b] keeps more than `clearance` from every shape.
inline bool is_obstacle_free(Vec2 a, Vec2 b, const std::vector<Rect>& rects, const std::vector<Disc>& discs,
                             double clearance) {
    for (const auto& r : rects)
        if (!(distance(a, b, r) > clearance)) return false;
    for (const auto& d : discs)
        if (!(distance(a, b, d) > clearance)) return false;
    return true;
}

/// Closed test: every sensed entity centre at least r_safe + footprint away.
inline bool safe_motion(Vec2 p, double r_safe, double footprint, const std::vector<Vec2>& sensed) {
    for (const auto& q : sensed)
        if (distance(p, q) < r_safe + footprint) return false;
    return true;
}

struct LocalProblem {
    RobotState start;
    std::vector<int> buchi;             // current Buchi set at `start`
    double sensing_radius = 0.8;
    double footprint = 0.25;
    InputBounds bounds;
    std::vector<Rect> static_rects;     // known obstacle cells
    std::vector<Rect> conflict_rects;   // regions claimed by higher priorities
    std::vector<Disc> discs;            // sensed moving entities
};

struct LocalResult {
    LocalTree tree;
    std::optional<int> leaf;  // first inserted node outside the sensing ball
    int samples = 0;

    bool ok() const { return leaf.has_value(); }
};

/// Buchi set after moving through `regions` (first element is the region
/// already occupied); empty when some entry is rejected.
inline std::vector<int> track_along(const ProductAutomaton& p, std::vector<int> buchi,
                                    const std::vector<RegionId>& regions) {
    for (std::size_t i = 1; i < regions.size() && !buchi.empty(); ++i)
        buchi = track_buchi(p.nba(), buchi, p.cts().label(regions[i]));
    return buchi;
}

template <class Rng>
LocalResult local_trajectory_generation(const LocalProblem& prob, const ProductAutomaton& pba,
                                        const PotentialTable& v, const Workspace& w, const ReplanParams& params,
                                        Rng& rng) {
    params.validate();
    LocalResult res;
    res.tree.nodes.push_back({prob.start, prob.buchi, -1, {}});
    const Vec2 centre = prob.start.position();
    std::vector<Vec2> sensed;
    for (const auto& d : prob.discs) sensed.push_back(d.center);
    const double h = params.tau_s / params.substeps;
    for (int k = 0; k < params.n_max; ++k) {
        ++res.samples;
        const RobotState sample = generate_sample(centre, prob.sensing_radius, params.eta, w, rng);
        const int n = nearest(res.tree, sample, params.lambda);
        const LocalNode& from = res.tree.nodes[static_cast<std::size_t>(n)];
        const auto [reached, u] = steer(from.state, sample, params.tau_s, prob.bounds, params.steer_grid,
                                        params.lambda);
        if (reached == from.state) continue;
        // executed geometry: polyline through the tick-spaced substates
        bool free = true;
        std::vector<RegionId> regions{w.region_of(from.state.position())};
        RobotState s = from.state;
        for (int j = 0; j < params.substeps && free; ++j) {
            const RobotState s2 = step_unicycle(s, u, h);
            if (!w.in_bounds(s2.position())) {
                free = false;
                break;
            }
            free = is_obstacle_free(s.position(), s2.position(), prob.static_rects, prob.discs, prob.footprint) &&
                   is_obstacle_free(s.position(), s2.position(), prob.conflict_rects, {}, 0.0);
            for (RegionId r : w.segment_regions(s.position(), s2.position()))
                if (regions.back() != r) regions.push_back(r);
            s = s2;
        }
        if (!free) continue;
        auto buchi = track_along(pba, from.buchi, regions);
        if (buchi.empty() || v.at(regions.back(), buchi) == kUnreachable) continue;
        if (!safe_motion(reached.position(), params.r_safe, prob.footprint, sensed)) continue;
        res.tree.nodes.push_back({reached, std::move(buchi), n, u});
        if (distance(reached.position(), centre) > prob.sensing_radius) {
            res.leaf = static_cast<int>(res.tree.nodes.size()) - 1;
            return res;
        }
    }
    return res;
}

/// Plan from the leaf's region restricted to its Buchi set.
inline Plan global_replan(const RobotState& leaf, const std::vector<int>& buchi, const ProductAutomaton& pba,
                          const Workspace& w) {
    return find_plan_from(pba, w.region_of(leaf.position()), buchi);
}

}  // namespace mrltl
