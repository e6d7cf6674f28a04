#pragma once

// Deterministic tick loop: obstacles by script, sensing, per-robot controller
// stack (plan follower + local replanner, MPC, or MPC + mixed initiative), input
// saturation, integration, event logging.

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mrltl/control/follower.hpp"
#include "mrltl/control/mic.hpp"
#include "mrltl/control/mpc.hpp"
#include "mrltl/ltl/translate.hpp"
#include "mrltl/planner/local_replanner.hpp"
#include "mrltl/planner/product.hpp"
#include "mrltl/scenario.hpp"
#include "mrltl/sim/trace.hpp"
#include "mrltl/sim/world.hpp"

namespace mrltl {

/// Per-robot task machinery built once from the scenario.
struct RobotModel {
    RobotSpec spec;
    ProductAutomaton pba;
    PotentialTable potential;
    Plan plan;

    RobotModel(const RobotSpec& s, const Scenario& sc)
        : spec(s),
          pba(build_product(build_cts(sc.workspace, sc.workspace.region_of(s.pose.position()), sc.connectivity),
                            translate(parse(s.task, sc.props), &sc.props))),
          potential(compute_potential(pba)),
          plan(find_plan(pba)) {}

    /// Blocked-region mask (index id-1) for a Buchi set, memoized.
    const std::vector<char>& blocked(const std::vector<int>& buchi) const {
        auto it = blocked_.find(buchi);
        if (it != blocked_.end()) return it->second;
        std::vector<char> mask(static_cast<std::size_t>(pba.cts().num_regions), 0);
        for (RegionId r : trap_regions(pba, potential, buchi)) mask[static_cast<std::size_t>(r - 1)] = 1;
        return blocked_.emplace(buchi, std::move(mask)).first->second;
    }

private:
    mutable std::map<std::vector<int>, std::vector<char>> blocked_;
};

/// Run-only diagnostics that the trace cannot reproduce.
struct RobotDiagnostics {
    int id = 0;
    long trap_entries = 0;     // region entries with no accepting continuation
    long boundary_clamps = 0;  // commands zeroed to stay in the workspace
    long safety_stops = 0;     // ticks where the stand-off filter zeroed v
    long mpc_solves = 0;
    long mpc_infeasible = 0;
    long escapes = 0;          // local replanner successes
    long resyncs = 0;          // global replans after plan/Buchi mismatch
    long replan_samples = 0;
};

struct RobotRuntime {
    const RobotModel* model = nullptr;
    RobotState state;
    RegionId region = 0;
    std::vector<int> buchi;
    Plan plan;
    std::size_t progress = 0;
    std::deque<ControlInput> escape;  // open-loop inputs, one per tick
    bool escaping = false;
    bool in_episode = false;  // MPC replan episode in progress
    bool human_enabled = false;
    std::optional<HumanInput> human;
    ControlInput u;
    std::optional<double> kappa;
    std::mt19937_64 rng;
};

class Simulation {
public:
    explicit Simulation(Scenario sc) : sc_(std::move(sc)) {
        validate(sc_);
        std::vector<RobotSpec> specs = sc_.robots;
        std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& s : specs) {
            try {
                models_.push_back(std::make_unique<RobotModel>(s, sc_));
            } catch (const InfeasibleTask& e) {
                throw InfeasibleTask("robot " + std::to_string(s.id) + ": " + e.what());
            }
        }
        for (const auto& m : models_) {
            RobotRuntime r;
            r.model = m.get();
            r.state = m->spec.pose;
            r.region = sc_.workspace.region_of(r.state.position());
            r.buchi = m->pba.nba().initial;
            std::sort(r.buchi.begin(), r.buchi.end());
            r.plan = m->plan;
            r.human_enabled = m->spec.mode == Mode::Hil;
            r.rng.seed(detail::sub_seed(sc_.seed, 0x5eedULL, static_cast<std::uint64_t>(m->spec.id)));
            robots_.push_back(std::move(r));
            diag_.push_back({m->spec.id});
        }
        obstacles_ = sc_.obstacles;
        std::sort(obstacles_.begin(), obstacles_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        static_rects_ = sc_.workspace.obstacle_rects();
    }

    const Scenario& scenario() const noexcept { return sc_; }
    long tick() const noexcept { return tick_; }
    double time() const noexcept { return static_cast<double>(tick_) * sc_.params.dt; }
    const std::vector<TraceRow>& trace() const noexcept { return rows_; }
    const std::vector<RobotRuntime>& robots() const noexcept { return robots_; }
    const std::vector<RobotDiagnostics>& diagnostics() const noexcept { return diag_; }
    const std::vector<MovingObstacle>& obstacles() const noexcept { return obstacles_; }
    const RobotModel& model(std::size_t i) const { return *models_.at(i); }

    /// Rows logged by the most recent step.
    std::vector<TraceRow> last_rows() const {
        std::vector<TraceRow> out;
        for (auto it = rows_.rbegin(); it != rows_.rend() && it->tick == tick_ - 1; ++it) out.push_back(*it);
        std::reverse(out.begin(), out.end());
        return out;
    }

    std::vector<RegionId> trap_regions_of(std::size_t i) const {
        const auto& r = robots_.at(i);
        return trap_regions(r.model->pba, r.model->potential, r.buchi);
    }

    /// Enables mixing for a robot (takeover) or disables it (release; hil
    /// robots keep mixing with no human input).
    void set_human_control(int id, bool on) {
        auto& r = by_id(id);
        r.human_enabled = on || r.model->spec.mode == Mode::Hil;
        if (!on) r.human.reset();
    }

    /// Queues a normalized human frame; it takes effect at the next tick.
    void push_human(int id, double v_norm, double w_norm) {
        (void)by_id(id);
        pending_human_[id] = {id, std::clamp(v_norm, -1.0, 1.0), std::clamp(w_norm, -1.0, 1.0), 0.0};
    }

    void run(long ticks) {
        for (long k = 0; k < ticks; ++k) step();
    }

    void step() {
        const double t = time();
        const auto& P = sc_.params;
        std::vector<std::vector<std::string>> events(robots_.size());

        apply_human_frames(t);

        // region bookkeeping at the current state
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            auto& r = robots_[i];
            const RegionId now = sc_.workspace.region_of(r.state.position());
            if (now != r.region) enter_region(r, now, &events[i], &diag_[i]);
            else if (!r.escaping) dwell_step(r, &events[i]);
        }

        // collisions at the current state
        std::vector<Disc> obstacle_discs;
        for (const auto& o : obstacles_) obstacle_discs.push_back(o.disc(t));
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            const Vec2 p = robots_[i].state.position();
            const double fi = robots_[i].model->spec.footprint;
            bool hit = false;
            for (std::size_t j = 0; j < robots_.size(); ++j)
                hit = hit || (j != i && distance(p, robots_[j].state.position()) < fi + robots_[j].model->spec.footprint);
            for (const auto& d : obstacle_discs) hit = hit || distance(p, d.center) < fi + d.radius;
            if (hit) events[i].push_back("collision");
        }

        // views for sensing
        std::vector<SensedObstacle> sensed_obstacles;
        for (const auto& o : obstacles_) sensed_obstacles.push_back({o.id, o.position(t), o.radius});
        std::vector<LocalTrajectory> broadcasts(robots_.size());
        for (std::size_t i = 0; i < robots_.size(); ++i)
            if (robots_[i].model->spec.mode == Mode::Comm) broadcasts[i] = predict(robots_[i], t);
        std::vector<RobotView> views;
        for (std::size_t i = 0; i < robots_.size(); ++i)
            views.push_back({robots_[i].model->spec.id, robots_[i].state, robots_[i].model->spec.footprint,
                             robots_[i].model->spec.mode == Mode::Comm ? &broadcasts[i] : nullptr});

        // conflicts among communicating robots
        std::map<std::pair<int, int>, std::vector<RegionId>> conflicts;  // (high, low) -> regions
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            if (robots_[i].model->spec.mode != Mode::Comm) continue;
            const auto snap = sense(views[i], robots_[i].model->spec.sensing_radius, views, sensed_obstacles, true);
            std::vector<LocalTrajectory> theirs;
            for (const auto& s : snap.robots)
                if (s.broadcast) theirs.push_back(*s.broadcast);
            for (const auto& c : detect_conflicts(broadcasts[i], theirs, sc_.workspace, tick_)) {
                const auto key = std::minmax(c.robot, c.other);
                auto& regs = conflicts[{key.first, key.second}];
                if (std::find(regs.begin(), regs.end(), c.region) == regs.end()) regs.push_back(c.region);
            }
        }
        std::set<std::pair<int, int>> active;
        for (auto& [pair, regs] : conflicts) {
            std::sort(regs.begin(), regs.end());
            active.insert(pair);
            if (!active_conflicts_.contains(pair)) events[index_of(pair.second)].push_back("conflict");
        }
        active_conflicts_ = std::move(active);

        // controls
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            auto& r = robots_[i];
            const auto& spec = r.model->spec;
            const auto snap = sense(views[i], spec.sensing_radius, views, sensed_obstacles, false);
            r.kappa.reset();
            ControlInput u{};
            bool hold_path = false;
            if (spec.mode == Mode::Comm) {
                bool yields = false;
                std::vector<RegionId> claimed;
                for (const auto& [pair, regs] : conflicts)
                    if (pair.second == spec.id) {
                        yields = true;
                        for (RegionId g : regs)
                            if (g != r.region) claimed.push_back(g);
                    }
                if (yields && !r.escaping) run_local_replan(r, snap, claimed, &events[i], &diag_[i]);
                if (r.escaping) {
                    if (!r.escape.empty()) {
                        u = r.escape.front();
                        hold_path = true;
                    } else {
                        finish_escape(r, &events[i]);
                        if (!r.escaping) u = nominal(r);
                    }
                } else if (yields) {
                    u = {};  // local replan failed this tick: dwell and retry
                } else {
                    u = nominal(r);
                }
            } else {
                if (!snap.empty()) {
                    if (!r.in_episode) {
                        r.in_episode = true;
                        events[i].push_back("replan_start");
                    }
                    u = mpc_control(r, snap, &events[i], &diag_[i]);
                } else {
                    if (r.in_episode) {
                        r.in_episode = false;
                        events[i].push_back("replan_done");
                    }
                    u = nominal(r);
                }
            }
            if (r.human_enabled) {
                std::vector<Disc> discs = snap.discs();
                const double k = kappa(
                    mic_distances(r.state.position(), static_rects_, discs, rects_of(trap_regions_of(i))), P.mic);
                r.kappa = k;
                u = mix(u, r.human, k, P.bounds, t, P.mic.stale_after);
            }
            u = P.bounds.clamp(u);
            // stand-off filter against sensed entities
            const Vec2 p = r.state.position();
            const Vec2 next = step_unicycle(r.state, u, P.dt).position();
            bool stop = false;
            for (const auto& s : snap.robots) {
                const Vec2 q = s.state.position();
                stop = stop || (distance(next, q) < spec.footprint + s.radius + P.safety_margin &&
                                distance(next, q) < distance(p, q));
            }
            for (const auto& o : snap.obstacles)
                stop = stop || (distance(next, o.position) < spec.footprint + o.radius + P.safety_margin &&
                                distance(next, o.position) < distance(p, o.position));
            if (stop) {
                ++diag_[i].safety_stops;
                if (hold_path) u = {};
                else u.v = 0.0;
            } else if (hold_path) {
                r.escape.pop_front();
            }
            if (!sc_.workspace.in_bounds(step_unicycle(r.state, u, P.dt).position())) {
                ++diag_[i].boundary_clamps;
                u.v = 0.0;
            }
            r.u = u;
        }

        // log, then integrate
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            const auto& r = robots_[i];
            rows_.push_back(make_row(tick_, t, r.model->spec.id, EntityKind::Robot, r.state, r.u, std::move(events[i]),
                                     r.kappa));
        }
        for (const auto& o : obstacles_) {
            const Vec2 p = o.position(t);
            rows_.push_back(make_row(tick_, t, o.id, EntityKind::Obstacle, {p.x, p.y, 0.0}, {norm(o.velocity(t)), 0.0}));
        }
        for (auto& r : robots_) r.state = step_unicycle(r.state, r.u, P.dt);
        ++tick_;
    }

private:
    RobotRuntime& by_id(int id) {
        for (auto& r : robots_)
            if (r.model->spec.id == id) return r;
        throw std::out_of_range("no robot " + std::to_string(id));
    }

    std::size_t index_of(int id) const {
        for (std::size_t i = 0; i < robots_.size(); ++i)
            if (robots_[i].model->spec.id == id) return i;
        throw std::out_of_range("no robot " + std::to_string(id));
    }

    std::vector<Rect> rects_of(const std::vector<RegionId>& regions) const {
        std::vector<Rect> out;
        for (RegionId g : regions) out.push_back(sc_.workspace.region(g).bounds);
        return out;
    }

    void apply_human_frames(double t) {
        const auto& b = sc_.params.bounds;
        for (const auto& h : sc_.human)
            if (h.from_tick <= tick_ && tick_ < h.to_tick)
                by_id(h.robot).human = HumanInput{h.robot, h.v * b.v_max, h.w * b.w_max, t};
        for (const auto& [id, h] : pending_human_) by_id(id).human = HumanInput{id, h.v * b.v_max, h.w * b.w_max, t};
        pending_human_.clear();
    }

    /// Buchi update on entering region `now`, then plan progress.
    void enter_region(RobotRuntime& r, RegionId now, std::vector<std::string>* ev, RobotDiagnostics* dg) const {
        const auto& pba = r.model->pba;
        r.region = now;
        if (ev) ev->push_back("region_enter:" + std::to_string(now));
        r.buchi = track_buchi(pba.nba(), r.buchi, pba.cts().label(now));
        if (r.model->potential.at(now, r.buchi) == kUnreachable) {
            if (dg) ++dg->trap_entries;
            return;
        }
        if (!r.escaping) advance(r, ev, dg);
    }

    /// Consumes a plan step that stays in the current region.
    void dwell_step(RobotRuntime& r, std::vector<std::string>* ev) const {
        if (r.buchi.empty()) return;
        const std::size_t nxt = next_progress(r.plan, r.progress);
        if (plan_at(r.plan, nxt).region != r.region || plan_at(r.plan, r.progress).region != r.region) return;
        if (r.plan.suffix.size() == 1 && r.progress + 1 == plan_length(r.plan)) return;  // dwell cycle reached
        r.buchi = track_buchi(r.model->pba.nba(), r.buchi, r.model->pba.cts().label(r.region));
        if (r.model->potential.at(r.region, r.buchi) == kUnreachable) return;
        advance(r, ev, nullptr);
    }

    void advance(RobotRuntime& r, std::vector<std::string>* ev, RobotDiagnostics* dg) const {
        const std::size_t nxt = next_progress(r.plan, r.progress);
        const auto& target = plan_at(r.plan, nxt);
        if (target.region != r.region) return;
        if (std::binary_search(r.buchi.begin(), r.buchi.end(), target.buchi)) {
            r.progress = nxt;
            if (r.progress + 1 == plan_length(r.plan) && ev) ev->push_back("suffix_cycle");
            return;
        }
        if (dg) ++dg->resyncs;
        r.plan = find_plan_from(r.model->pba, r.region, r.buchi);
        r.progress = 0;
    }

    /// Goal region of the plan and the first region on the safe route to it.
    RegionId route_target(const RobotRuntime& r) const {
        const RegionId goal = select_goal(r.plan, r.progress);
        const auto route = safe_route(r.model->pba.cts(), r.region, goal, r.model->blocked(r.buchi));
        if (route.empty()) return r.region;
        return route.size() > 1 ? route[1] : route[0];
    }

    ControlInput nominal(const RobotRuntime& r) const {
        if (r.buchi.empty()) return {};
        return track_point(r.state, sc_.workspace.region(route_target(r)).bounds.center(), sc_.params.bounds);
    }

    /// Local trajectory the robot would follow with no interference, sampled
    /// per tick until it leaves the sensing ball (10 s cap).
    LocalTrajectory predict(const RobotRuntime& r, double t) const {
        RobotRuntime c = r;
        LocalTrajectory traj{c.model->spec.id, {{t, c.state.position()}}};
        const Vec2 centre = c.state.position();
        const double R = c.model->spec.sensing_radius;
        const int cap = static_cast<int>(std::lround(10.0 / sc_.params.dt));
        for (int k = 1; k <= cap; ++k) {
            ControlInput u;
            if (c.escaping && !c.escape.empty()) {
                u = c.escape.front();
                c.escape.pop_front();
            } else {
                c.escaping = false;
                u = nominal(c);
            }
            c.state = step_unicycle(c.state, u, sc_.params.dt);
            if (!sc_.workspace.in_bounds(c.state.position())) break;
            traj.samples.push_back({t + k * sc_.params.dt, c.state.position()});
            if (distance(c.state.position(), centre) > R) break;
            const RegionId now = sc_.workspace.region_of(c.state.position());
            if (now != c.region) enter_region(c, now, nullptr, nullptr);
            else if (!c.escaping) dwell_step(c, nullptr);
        }
        return traj;
    }

    void run_local_replan(RobotRuntime& r, const SensorSnapshot& snap, const std::vector<RegionId>& claimed,
                          std::vector<std::string>* ev, RobotDiagnostics* dg) {
        ev->push_back("replan_start");
        const auto& spec = r.model->spec;
        LocalProblem prob;
        prob.start = r.state;
        prob.buchi = r.buchi;
        prob.sensing_radius = spec.sensing_radius;
        prob.footprint = spec.footprint;
        prob.bounds = sc_.params.bounds;
        prob.static_rects = static_rects_;
        prob.conflict_rects = rects_of(claimed);
        prob.discs = snap.discs();
        const auto res = local_trajectory_generation(prob, r.model->pba, r.model->potential, sc_.workspace,
                                                     sc_.params.replan, r.rng);
        dg->replan_samples += res.samples;
        if (!res.ok()) {
            ev->push_back("infeasible");
            return;
        }
        ++dg->escapes;
        const int reps = std::max(1, static_cast<int>(std::lround(sc_.params.replan.tau_s / sc_.params.dt)));
        r.escape.clear();
        for (int n : res.tree.path_to(*res.leaf)) {
            if (n == 0) continue;
            for (int k = 0; k < reps; ++k) r.escape.push_back(res.tree.nodes[static_cast<std::size_t>(n)].u);
        }
        r.escaping = true;
    }

    void finish_escape(RobotRuntime& r, std::vector<std::string>* ev) {
        try {
            r.plan = global_replan(r.state, r.buchi, r.model->pba, sc_.workspace);
            r.progress = 0;
            r.escaping = false;
            ev->push_back("replan_done");
        } catch (const InfeasibleTask&) {
            ev->push_back("infeasible");
        }
    }

    ControlInput mpc_control(RobotRuntime& r, const SensorSnapshot& snap, std::vector<std::string>* ev,
                             RobotDiagnostics* dg) const {
        const auto& spec = r.model->spec;
        const auto& P = sc_.params;
        const RegionId target = route_target(r);
        MpcProblem prob;
        prob.start = r.state;
        prob.goal = sc_.workspace.region(target).bounds.center();
        prob.goal_rect = sc_.workspace.region(target).bounds;
        prob.bounds = sc_.workspace.bounds();
        prob.footprint = spec.footprint;
        prob.obstacle_rects = static_rects_;
        for (const auto& d : snap.discs()) prob.obstacle_discs.push_back({d.center, d.radius + P.sensed_inflation});
        prob.traps = rects_of(trap_regions(r.model->pba, r.model->potential, r.buchi));
        ++dg->mpc_solves;
        const auto sol = solve_mpc(prob, P.mpc, P.bounds,
                                   detail::sub_seed(sc_.seed, static_cast<std::uint64_t>(spec.id),
                                                    static_cast<std::uint64_t>(tick_)));
        if (!sol.feasible) {
            ++dg->mpc_infeasible;
            ev->push_back("infeasible");
            return {};
        }
        return sol.inputs.front();
    }

    Scenario sc_;
    std::vector<std::unique_ptr<RobotModel>> models_;
    std::vector<RobotRuntime> robots_;
    std::vector<RobotDiagnostics> diag_;
    std::vector<MovingObstacle> obstacles_;
    std::vector<Rect> static_rects_;
    std::vector<TraceRow> rows_;
    std::set<std::pair<int, int>> active_conflicts_;
    std::map<int, HumanInput> pending_human_;
    long tick_ = 0;
};

struct RunResult {
    std::vector<TraceRow> trace;
    TraceSummary summary;
    std::vector<RobotDiagnostics> diagnostics;
};

inline RunResult simulate(const Scenario& sc, std::optional<long> ticks = std::nullopt) {
    Simulation sim(sc);
    sim.run(ticks.value_or(sc.ticks));
    return {sim.trace(), summarize(sim.trace(), sc.params.bounds), sim.diagnostics()};
}

inline nlohmann::json to_json(const std::vector<RobotDiagnostics>& d) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& x : d)
        out.push_back({{"id", x.id},
                       {"trap_entries", x.trap_entries},
                       {"boundary_clamps", x.boundary_clamps},
                       {"safety_stops", x.safety_stops},
                       {"mpc_solves", x.mpc_solves},
                       {"mpc_infeasible", x.mpc_infeasible},
                       {"escapes", x.escapes},
                       {"resyncs", x.resyncs},
                       {"replan_samples", x.replan_samples}});
    return out;
}

}  // namespace mrltl
