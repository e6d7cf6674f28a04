#pragma once

// Receding-horizon controller solved by sampled shooting: an exhaustive grid
// of constant-input sequences plus seeded piecewise-constant perturbations of
// the incumbent, under hard clearance / bounds / trap constraints.

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "mrltl/geometry.hpp"
#include "mrltl/planner/product.hpp"
#include "mrltl/sim/dynamics.hpp"

namespace mrltl {

struct MpcParams {
    int steps = 10;         // H
    double dt = 0.3;        // s per step
    double q = 1.0;         // position weight in Q (heading weight is 0)
    double r_v = 0.1;       // input weights in R
    double r_w = 0.05;
    double q_n = 5.0;       // terminal position weight
    double w_o = 0.05;      // obstacle proximity weight
    double w_g = 0.1;       // trap proximity weight
    double w_b = 50.0;      // weight on intrusion into the footprint band
    double eps_d = 0.05;    // floor on penalty distances (m)
    int grid = 11;          // constant-input candidates per axis
    int budget = 2000;      // total rollouts
    int segments = 3;       // pieces in perturbed candidates
    double sigma_v = 0.1;   // perturbation scale
    double sigma_w = 0.15;

    void validate() const {
        if (steps <= 0 || !(dt > 0) || !(q > 0) || !(r_v > 0) || !(r_w > 0) || !(q_n > 0) || w_o < 0 || w_g < 0 || w_b < 0 ||
            !(eps_d > 0) || grid < 2 || budget < grid * grid || segments < 1)
            throw std::invalid_argument("invalid MPC parameters");
    }
};

struct MpcProblem {
    RobotState start;
    Vec2 goal;                       // centre of X_des
    Rect goal_rect;
    Rect bounds;                     // workspace
    double footprint = 0.25;
    std::vector<Rect> obstacle_rects;
    std::vector<Disc> obstacle_discs;
    std::vector<Rect> traps;
};

inline double obstacle_distance(Vec2 p, const MpcProblem& prob) {
    return std::min(min_distance(p, prob.obstacle_rects), min_distance(p, prob.obstacle_discs));
}

struct MpcCostTerms {
    double tracking = 0.0;
    double input = 0.0;
    double obstacle = 0.0;
    double trap = 0.0;
    double intrusion = 0.0;
    double terminal = 0.0;
    double total() const { return tracking + input + obstacle + trap + intrusion + terminal; }
};

/// Running terms over k = 0..H-1 (scaled by dt), intrusion over k = 1..H
/// (scaled by dt), plus the terminal term.
inline MpcCostTerms mpc_cost_terms(const std::vector<RobotState>& traj, const std::vector<ControlInput>& inputs,
                                   const MpcProblem& prob, const MpcParams& params) {
    if (traj.size() != inputs.size() + 1) throw std::invalid_argument("trajectory/input length mismatch");
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const RobotState next = step_unicycle(traj[k], inputs[k], params.dt);
        if (distance(next.position(), traj[k + 1].position()) > 1e-9 ||
            std::abs(wrap_angle(next.theta - traj[k + 1].theta)) > 1e-9)
            throw std::invalid_argument("trajectory inconsistent with inputs");
    }
    MpcCostTerms c;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const Vec2 e = traj[k].position() - prob.goal;
        c.tracking += params.q * dot(e, e) * params.dt;
        c.input += (params.r_v * inputs[k].v * inputs[k].v + params.r_w * inputs[k].w * inputs[k].w) * params.dt;
        c.obstacle += params.w_o / std::max(obstacle_distance(traj[k].position(), prob), params.eps_d) * params.dt;
        c.trap += params.w_g / std::max(min_distance(traj[k].position(), prob.traps), params.eps_d) * params.dt;
        const double band = std::max(0.0, prob.footprint - obstacle_distance(traj[k + 1].position(), prob));
        c.intrusion += params.w_b * band * band * params.dt;
    }
    const Vec2 e = traj.back().position() - prob.goal;
    c.terminal = params.q_n * dot(e, e);
    return c;
}

inline double mpc_cost(const std::vector<RobotState>& traj, const std::vector<ControlInput>& inputs,
                       const MpcProblem& prob, const MpcParams& params) {
    return mpc_cost_terms(traj, inputs, prob, params).total();
}

inline std::vector<RobotState> rollout(const RobotState& start, const std::vector<ControlInput>& inputs, double dt) {
    std::vector<RobotState> traj{start};
    for (const auto& u : inputs) traj.push_back(step_unicycle(traj.back(), u, dt));
    return traj;
}

/// Hard constraints: in bounds, clearance >= footprint along every segment
/// (or, when the start is already closer, never closer than the start), and
/// no state inside a trap rectangle. A start touching an obstacle admits
/// nothing.
inline bool mpc_feasible(const std::vector<RobotState>& traj, const MpcProblem& prob) {
    const double d0 = obstacle_distance(traj.front().position(), prob);
    if (!(d0 > 0.0)) return false;
    const double need = std::min(prob.footprint, d0);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const Vec2 a = traj[k - 1].position(), b = traj[k].position();
        if (!prob.bounds.contains(b)) return false;
        for (const auto& r : prob.traps)
            if (r.contains(b)) return false;
        for (const auto& r : prob.obstacle_rects)
            if (distance(a, b, r) < need) return false;
        for (const auto& d : prob.obstacle_discs)
            if (distance(a, b, d) < need) return false;
    }
    return true;
}

struct MpcSolution {
    bool feasible = false;
    std::vector<ControlInput> inputs;
    std::vector<RobotState> trajectory;
    double cost = kInf;
    bool terminal_satisfied = false;
    int evaluated = 0;
};

inline MpcSolution solve_mpc(const MpcProblem& prob, const MpcParams& params, const InputBounds& bounds,
                             std::uint64_t seed) {
    params.validate();
    if (!prob.bounds.contains(prob.start.position())) throw std::invalid_argument("MPC start out of bounds");
    MpcSolution best;
    auto consider = [&](std::vector<ControlInput> inputs) {
        ++best.evaluated;
        auto traj = rollout(prob.start, inputs, params.dt);
        if (!mpc_feasible(traj, prob)) return;
        const double c = mpc_cost(traj, inputs, prob, params);
        if (c < best.cost) {
            best.feasible = true;
            best.cost = c;
            best.inputs = std::move(inputs);
            best.trajectory = std::move(traj);
        }
    };
    const auto H = static_cast<std::size_t>(params.steps);
    for (int i = 0; i < params.grid; ++i)
        for (int j = 0; j < params.grid; ++j) {
            const ControlInput u{-bounds.v_max + 2.0 * bounds.v_max * i / (params.grid - 1),
                                 -bounds.w_max + 2.0 * bounds.w_max * j / (params.grid - 1)};
            consider(std::vector<ControlInput>(H, u));
        }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nv(0.0, params.sigma_v), nw(0.0, params.sigma_w);
    std::uniform_int_distribution<int> cut(1, params.steps - 1 > 0 ? params.steps - 1 : 1);
    while (best.evaluated < params.budget) {
        std::vector<ControlInput> base = best.feasible ? best.inputs : std::vector<ControlInput>(H, ControlInput{});
        std::vector<int> cuts{0, params.steps};
        for (int s = 1; s < params.segments; ++s) cuts.push_back(cut(rng));
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double dv = nv(rng), dw = nw(rng);
            for (int k = cuts[s]; k < cuts[s + 1]; ++k) {
                auto& u = base[static_cast<std::size_t>(k)];
                u = bounds.clamp({u.v + dv, u.w + dw});
            }
        }
        consider(std::move(base));
    }
    if (best.feasible) best.terminal_satisfied = prob.goal_rect.contains(best.trajectory.back().position());
    return best;
}

/// Flattened plan position: index into prefix ++ suffix of the last reached
/// state. The goal is the next element, wrapping from the suffix end to its
/// start.
inline std::size_t plan_length(const Plan& plan) { return plan.prefix.size() + plan.suffix.size(); }

inline const ProductState& plan_at(const Plan& plan, std::size_t i) {
    return i < plan.prefix.size() ? plan.prefix[i] : plan.suffix.at(i - plan.prefix.size());
}

inline std::size_t next_progress(const Plan& plan, std::size_t progress) {
    return progress + 1 < plan_length(plan) ? progress + 1 : plan.prefix.size();
}

inline RegionId select_goal(const Plan& plan, std::size_t progress) {
    if (progress >= plan_length(plan)) throw std::out_of_range("plan progress out of range");
    return plan_at(plan, next_progress(plan, progress)).region;
}

}  // namespace mrltl
