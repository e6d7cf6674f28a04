#pragma once

// Declarative world description: workspace + labels, robots with tasks and
// controller modes, moving obstacles, parameter blocks, seed, tick budget.

#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrltl/control/mic.hpp"
#include "mrltl/control/mpc.hpp"
#include "mrltl/ltl/formula.hpp"
#include "mrltl/planner/local_replanner.hpp"
#include "mrltl/sim/dynamics.hpp"
#include "mrltl/sim/world.hpp"
#include "mrltl/workspace.hpp"

namespace mrltl {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Comm, NoComm, Hil };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::Comm: return "comm";
        case Mode::NoComm: return "nocomm";
        case Mode::Hil: return "hil";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "comm") return Mode::Comm;
    if (s == "nocomm") return Mode::NoComm;
    if (s == "hil") return Mode::Hil;
    throw ScenarioError("unknown controller mode '" + s + "'");
}

struct RobotSpec {
    int id = 0;
    RobotState pose;
    double sensing_radius = 0.8;
    double footprint = 0.3;
    std::string task;
    Mode mode = Mode::Comm;
};

/// Recorded human frames: one input frame per tick in [from_tick, to_tick),
/// axes normalized to [-1, 1].
struct HumanSegment {
    int robot = 0;
    long from_tick = 0;
    long to_tick = 0;
    double v = 0.0;
    double w = 0.0;
};

struct SimParams {
    double dt = 0.1;
    InputBounds bounds;
    double safety_margin = 0.1;  // extra stand-off for the stop filter (m)
    double sensed_inflation = 0.2;  // added to sensed disc radii in MPC (m)
    ReplanParams replan;
    MpcParams mpc;
    MicParams mic;
};

struct Scenario {
    Workspace workspace{1, 1, 1, 1};
    int connectivity = 4;
    PropositionTable props;
    std::vector<RobotSpec> robots;
    std::vector<MovingObstacle> obstacles;
    std::vector<HumanSegment> human;
    SimParams params;
    std::uint64_t seed = 0;
    long ticks = 0;

    std::size_t labeled_cells() const {
        std::size_t n = 0;
        for (RegionId r = 1; r <= workspace.num_regions(); ++r) n += workspace.region(r).labels != 0;
        return n;
    }

    const RobotSpec& robot(int id) const {
        for (const auto& r : robots)
            if (r.id == id) return r;
        throw std::out_of_range("no robot " + std::to_string(id));
    }
};

namespace detail {

using nlohmann::json;

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* key : keys) ok = ok || k == key;
        if (!ok) throw ScenarioError(where + ": unknown key '" + k + "'");
    }
}

inline Vec2 read_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ScenarioError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline void read_params(const json& j, SimParams& p) {
    reject_unknown(j, {"dt", "v_max", "w_max", "safety_margin", "sensed_inflation", "replan", "mpc", "mic"}, "params");
    read_opt(j, "dt", p.dt);
    read_opt(j, "v_max", p.bounds.v_max);
    read_opt(j, "w_max", p.bounds.w_max);
    read_opt(j, "safety_margin", p.safety_margin);
    read_opt(j, "sensed_inflation", p.sensed_inflation);
    if (j.contains("replan")) {
        const auto& r = j["replan"];
        reject_unknown(r, {"n_max", "eta", "tau_s", "r_safe", "lambda", "steer_grid", "substeps"}, "params.replan");
        read_opt(r, "n_max", p.replan.n_max);
        read_opt(r, "eta", p.replan.eta);
        read_opt(r, "tau_s", p.replan.tau_s);
        read_opt(r, "r_safe", p.replan.r_safe);
        read_opt(r, "lambda", p.replan.lambda);
        read_opt(r, "steer_grid", p.replan.steer_grid);
        read_opt(r, "substeps", p.replan.substeps);
    }
    if (j.contains("mpc")) {
        const auto& m = j["mpc"];
        reject_unknown(m, {"steps", "dt", "q", "r_v", "r_w", "q_n", "w_o", "w_g", "w_b", "eps_d", "grid", "budget", "segments",
                           "sigma_v", "sigma_w"},
                       "params.mpc");
        read_opt(m, "steps", p.mpc.steps);
        read_opt(m, "dt", p.mpc.dt);
        read_opt(m, "q", p.mpc.q);
        read_opt(m, "r_v", p.mpc.r_v);
        read_opt(m, "r_w", p.mpc.r_w);
        read_opt(m, "q_n", p.mpc.q_n);
        read_opt(m, "w_o", p.mpc.w_o);
        read_opt(m, "w_g", p.mpc.w_g);
        read_opt(m, "w_b", p.mpc.w_b);
        read_opt(m, "eps_d", p.mpc.eps_d);
        read_opt(m, "grid", p.mpc.grid);
        read_opt(m, "budget", p.mpc.budget);
        read_opt(m, "segments", p.mpc.segments);
        read_opt(m, "sigma_v", p.mpc.sigma_v);
        read_opt(m, "sigma_w", p.mpc.sigma_w);
    }
    if (j.contains("mic")) {
        const auto& m = j["mic"];
        reject_unknown(m, {"d_s", "eps", "g_mix", "stale_after"}, "params.mic");
        read_opt(m, "d_s", p.mic.d_s);
        read_opt(m, "eps", p.mic.eps);
        read_opt(m, "g_mix", p.mic.g_mix);
        read_opt(m, "stale_after", p.mic.stale_after);
    }
}

/// 1-based line of byte offset `pos` in `text`.
inline std::size_t line_of(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

/// Seed for a per-entity stream derived from the scenario seed.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace detail

/// Semantic checks: tasks parse against declared labels, poses in bounds,
/// outside obstacle cells and mutually collision-free, ids unique, parameter
/// blocks valid.
inline void validate(const Scenario& s) {
    std::set<int> ids;
    for (const auto& r : s.robots) {
        const std::string where = "robot " + std::to_string(r.id);
        if (!ids.insert(r.id).second) throw ScenarioError("duplicate entity id " + std::to_string(r.id));
        if (!(r.sensing_radius > 0) || !(r.footprint > 0)) throw ScenarioError(where + ": radii must be positive");
        if (!s.workspace.in_bounds(r.pose.position())) throw ScenarioError(where + ": initial pose out of bounds");
        if (s.workspace.is_obstacle(s.workspace.region_of(r.pose.position())))
            throw ScenarioError(where + ": initial pose inside an obstacle");
        try {
            (void)parse(r.task, s.props);
        } catch (const UnknownProposition& e) {
            throw ScenarioError(where + ": task names an undeclared label: " + e.what());
        } catch (const ParseError& e) {
            throw ScenarioError(where + ": task does not parse: " + e.what());
        }
    }
    for (std::size_t i = 0; i < s.robots.size(); ++i)
        for (std::size_t j = i + 1; j < s.robots.size(); ++j)
            if (distance(s.robots[i].pose.position(), s.robots[j].pose.position()) <
                s.robots[i].footprint + s.robots[j].footprint)
                throw ScenarioError("robots " + std::to_string(s.robots[i].id) + " and " +
                                    std::to_string(s.robots[j].id) + " start in collision");
    for (const auto& o : s.obstacles) {
        if (!ids.insert(o.id).second) throw ScenarioError("duplicate entity id " + std::to_string(o.id));
        try {
            o.validate(s.workspace);
        } catch (const std::exception& e) {
            throw ScenarioError("obstacle " + std::to_string(o.id) + ": " + e.what());
        }
    }
    for (const auto& h : s.human) {
        bool known = false;
        for (const auto& r : s.robots) known = known || r.id == h.robot;
        if (!known) throw ScenarioError("human input for unknown robot " + std::to_string(h.robot));
        if (h.from_tick < 0 || h.to_tick < h.from_tick) throw ScenarioError("human input: bad tick range");
        if (std::abs(h.v) > 1.0 || std::abs(h.w) > 1.0) throw ScenarioError("human input axes must lie in [-1, 1]");
    }
    if (!(s.params.dt > 0) || !(s.params.bounds.v_max > 0) || !(s.params.bounds.w_max > 0) ||
        s.params.safety_margin < 0 || s.params.sensed_inflation < 0)
        throw ScenarioError("invalid simulation parameters");
    if (s.ticks < 0) throw ScenarioError("ticks must be non-negative");
    try {
        s.params.replan.validate();
        s.params.mpc.validate();
        s.params.mic.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
}

/// `seed` overrides the file's seed (walkers are drawn from it).
inline Scenario scenario_from_string(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("line " + std::to_string(detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                            e.what());
    }
    if (seed && j.is_object()) j["seed"] = *seed;
    Scenario s;
    try {
        detail::reject_unknown(j, {"workspace", "robots", "obstacles", "params", "human_inputs", "seed", "ticks"},
                               "scenario");
        const auto& w = j.at("workspace");
        detail::reject_unknown(w, {"width", "height", "cols", "rows", "connectivity", "labels", "obstacles"},
                               "workspace");
        try {
            s.workspace = Workspace(w.at("width").get<double>(), w.at("height").get<double>(), w.at("cols").get<int>(),
                                    w.at("rows").get<int>());
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("workspace: ") + e.what());
        }
        detail::read_opt(w, "connectivity", s.connectivity);
        if (s.connectivity != 4 && s.connectivity != 8) throw ScenarioError("workspace: connectivity must be 4 or 8");
        auto check_region = [&](int r) {
            if (r < 1 || r > s.workspace.num_regions())
                throw ScenarioError("workspace: region " + std::to_string(r) + " does not exist");
            return r;
        };
        if (w.contains("labels")) {
            for (const auto& [name, regions] : w["labels"].items()) {
                int id = 0;
                try {
                    id = s.props.add(name);
                } catch (const std::exception& e) {
                    throw ScenarioError(std::string("workspace.labels: ") + e.what());
                }
                for (const auto& r : regions) s.workspace.add_label(check_region(r.get<int>()), id);
            }
        }
        if (w.contains("obstacles"))
            for (const auto& r : w["obstacles"]) s.workspace.set_obstacle(check_region(r.get<int>()));

        s.seed = j.value("seed", std::uint64_t{0});
        s.ticks = j.value("ticks", 0L);
        if (j.contains("params")) detail::read_params(j["params"], s.params);

        for (const auto& r : j.value("robots", json::array())) {
            detail::reject_unknown(r, {"id", "pose", "sensing_radius", "footprint", "task", "mode"}, "robot");
            RobotSpec spec;
            spec.id = r.at("id").get<int>();
            const auto& pose = r.at("pose");
            if (!pose.is_array() || pose.size() != 3) throw ScenarioError("robot pose: expected [x, y, theta]");
            spec.pose = {pose[0].get<double>(), pose[1].get<double>(), pose[2].get<double>()};
            detail::read_opt(r, "sensing_radius", spec.sensing_radius);
            detail::read_opt(r, "footprint", spec.footprint);
            spec.task = r.at("task").get<std::string>();
            spec.mode = parse_mode(r.value("mode", std::string("comm")));
            s.robots.push_back(std::move(spec));
        }
        const double horizon = static_cast<double>(s.ticks) * s.params.dt;
        for (const auto& o : j.value("obstacles", json::array())) {
            detail::reject_unknown(o, {"id", "radius", "script", "walker"}, "obstacle");
            const int id = o.at("id").get<int>();
            const double radius = o.value("radius", 0.25);
            if (o.contains("script") == o.contains("walker"))
                throw ScenarioError("obstacle " + std::to_string(id) + ": give exactly one of script or walker");
            if (o.contains("script")) {
                MovingObstacle m{id, radius, {}};
                for (const auto& wp : o["script"]) {
                    if (!wp.is_array() || wp.size() != 3) throw ScenarioError("obstacle script: expected [t, x, y]");
                    m.script.push_back({wp[0].get<double>(), {wp[1].get<double>(), wp[2].get<double>()}});
                }
                s.obstacles.push_back(std::move(m));
            } else {
                const auto& wk = o["walker"];
                detail::reject_unknown(wk, {"speed", "start"}, "obstacle walker");
                std::mt19937_64 rng(detail::sub_seed(s.seed, 0x0b57ac1eULL, static_cast<std::uint64_t>(id)));
                const Vec2 start = detail::read_point(wk.at("start"), "walker start");
                if (!s.workspace.in_bounds(start))
                    throw ScenarioError("obstacle " + std::to_string(id) + ": walker start out of bounds");
                s.obstacles.push_back(random_walker(id, radius, wk.at("speed").get<double>(), start,
                                                    std::max(horizon, 1.0), s.workspace, rng));
            }
        }
        for (const auto& h : j.value("human_inputs", json::array())) {
            detail::reject_unknown(h, {"robot", "from_tick", "to_tick", "v", "w"}, "human_inputs");
            s.human.push_back({h.at("robot").get<int>(), h.at("from_tick").get<long>(), h.at("to_tick").get<long>(),
                               h.value("v", 0.0), h.value("w", 0.0)});
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("schema: ") + e.what());
    }
    validate(s);
    return s;
}

inline Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_string(ss.str(), seed);
}

}  // namespace mrltl
