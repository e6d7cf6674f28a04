#pragma once

// Interactive session: the wire protocol and the state machine that applies
// client messages to a simulation at tick boundaries. No networking here.

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrltl/sim/simulation.hpp"

namespace mrltl {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClientMessage {
    enum class Kind { Takeover, Release, Input, Control } kind = Kind::Control;
    int robot = -1;
    double v = 0.0, w = 0.0;
    std::string cmd;  // pause | resume | step
};

/// Parses one client frame; throws ProtocolError on anything malformed.
inline ClientMessage parse_client_message(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        throw ProtocolError("malformed JSON");
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ProtocolError("missing message type");
    const std::string type = j["type"];
    auto robot = [&] {
        if (!j.contains("robot") || !j["robot"].is_number_integer()) throw ProtocolError(type + ": missing robot id");
        return j["robot"].get<int>();
    };
    auto axis = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number()) throw ProtocolError(type + ": missing " + key);
        const double x = j[key].get<double>();
        if (!std::isfinite(x) || std::abs(x) > 1.0) throw ProtocolError(type + ": " + key + " outside [-1, 1]");
        return x;
    };
    ClientMessage m;
    if (type == "takeover") {
        m.kind = ClientMessage::Kind::Takeover;
        m.robot = robot();
    } else if (type == "release") {
        m.kind = ClientMessage::Kind::Release;
        m.robot = robot();
    } else if (type == "input") {
        m.kind = ClientMessage::Kind::Input;
        m.robot = robot();
        m.v = axis("v");
        m.w = axis("w");
    } else if (type == "control") {
        m.kind = ClientMessage::Kind::Control;
        if (!j.contains("cmd") || !j["cmd"].is_string()) throw ProtocolError("control: missing cmd");
        m.cmd = j["cmd"];
        if (m.cmd != "pause" && m.cmd != "resume" && m.cmd != "step")
            throw ProtocolError("control: unknown cmd '" + m.cmd + "'");
    } else {
        throw ProtocolError("unknown message type '" + type + "'");
    }
    return m;
}

inline std::string error_frame(const std::string& msg) { return nlohmann::json{{"type", "error"}, {"msg", msg}}.dump(); }

class Session {
public:
    explicit Session(Scenario sc) : sim_(std::move(sc)) {}

    const Simulation& simulation() const noexcept { return sim_; }
    bool running() const noexcept { return running_; }
    std::optional<int> holder(int robot) const {
        auto it = takeovers_.find(robot);
        return it == takeovers_.end() ? std::nullopt : std::optional<int>(it->second);
    }
    long inputs_accepted() const noexcept { return inputs_accepted_; }

    /// Applies one client frame; returns the reply frame for that client.
    std::string handle(int client, const std::string& text) {
        ClientMessage m;
        try {
            m = parse_client_message(text);
        } catch (const ProtocolError& e) {
            return error_frame(e.what());
        }
        using K = ClientMessage::Kind;
        if (m.kind != K::Control && !has_robot(m.robot))
            return error_frame("no robot " + std::to_string(m.robot));
        switch (m.kind) {
            case K::Takeover: {
                if (auto h = holder(m.robot); h && *h != client)
                    return error_frame("robot " + std::to_string(m.robot) + " is already under human control");
                takeovers_[m.robot] = client;
                sim_.set_human_control(m.robot, true);
                return ack("takeover", m.robot);
            }
            case K::Release: {
                if (holder(m.robot) != client)
                    return error_frame("robot " + std::to_string(m.robot) + " is not held by this client");
                release(m.robot);
                return ack("release", m.robot);
            }
            case K::Input: {
                if (holder(m.robot) != client)
                    return error_frame("robot " + std::to_string(m.robot) + " is not held by this client");
                sim_.push_human(m.robot, m.v, m.w);
                ++inputs_accepted_;
                return ack("input", m.robot);
            }
            case K::Control: {
                if (m.cmd == "pause") running_ = false;
                else if (m.cmd == "resume") running_ = true;
                else step_requested_ = true;
                return nlohmann::json{{"type", "ack"}, {"of", "control"}, {"cmd", m.cmd}}.dump();
            }
        }
        return error_frame("unhandled message");
    }

    /// Drops every takeover held by a departing client.
    void disconnect(int client) {
        std::vector<int> held;
        for (const auto& [robot, c] : takeovers_)
            if (c == client) held.push_back(robot);
        for (int r : held) release(r);
    }

    /// Steps once if running or a single step was requested; true if stepped.
    bool advance() {
        if (!running_ && !step_requested_) return false;
        step_requested_ = false;
        sim_.step();
        return true;
    }

    std::string scenario_frame() const {
        using nlohmann::json;
        const auto& sc = sim_.scenario();
        const auto& w = sc.workspace;
        json regions = json::array();
        for (RegionId r = 1; r <= w.num_regions(); ++r) {
            const auto& reg = w.region(r);
            json labels = json::array();
            for (std::size_t p = 0; p < sc.props.size(); ++p)
                if (reg.labels & prop_bit(static_cast<int>(p))) labels.push_back(sc.props.name(static_cast<int>(p)));
            regions.push_back({{"id", r},
                               {"name", reg.name},
                               {"bounds", {reg.bounds.x0, reg.bounds.y0, reg.bounds.x1, reg.bounds.y1}},
                               {"labels", labels},
                               {"obstacle", w.is_obstacle(r)}});
        }
        json robots = json::array();
        for (std::size_t i = 0; i < sim_.robots().size(); ++i) {
            const auto& m = sim_.model(i);
            robots.push_back({{"id", m.spec.id},
                              {"task", m.spec.task},
                              {"mode", to_string(m.spec.mode)},
                              {"footprint", m.spec.footprint},
                              {"sensing_radius", m.spec.sensing_radius}});
        }
        return json{{"type", "scenario"},
                    {"width", w.width()},
                    {"height", w.height()},
                    {"cols", w.cols()},
                    {"rows", w.rows()},
                    {"dt", sc.params.dt},
                    {"regions", regions},
                    {"robots", robots},
                    {"trap_regions", trap_json()}}
            .dump();
    }

    std::string state_frame() const {
        using nlohmann::json;
        const auto rows = sim_.last_rows();
        json robots = json::array(), obstacles = json::array(), events = json::array();
        for (const auto& r : rows) {
            if (r.kind == EntityKind::Robot) {
                const auto i = robot_index(r.entity);
                const auto& rt = sim_.robots()[i];
                robots.push_back({{"id", r.entity},
                                  {"x", r.x},
                                  {"y", r.y},
                                  {"theta", r.theta},
                                  {"v", r.v},
                                  {"w", r.w},
                                  {"kappa", r.kappa ? json(*r.kappa) : json(nullptr)},
                                  {"mode", to_string(rt.model->spec.mode)},
                                  {"human", holder(r.entity).has_value()},
                                  {"buchi_progress", {{"index", rt.progress}, {"plan_length", plan_length(rt.plan)}}}});
                for (const auto& e : r.events) events.push_back({{"robot", r.entity}, {"event", e}});
            } else {
                obstacles.push_back({{"id", r.entity}, {"x", r.x}, {"y", r.y}});
            }
        }
        return json{{"type", "state"},
                    {"tick", rows.empty() ? -1 : rows.front().tick},
                    {"time", rows.empty() ? 0.0 : rows.front().time},
                    {"running", running_},
                    {"robots", robots},
                    {"obstacles", obstacles},
                    {"events", events},
                    {"trap_regions", trap_json()}}
            .dump();
    }

private:
    bool has_robot(int id) const {
        for (const auto& r : sim_.robots())
            if (r.model->spec.id == id) return true;
        return false;
    }

    std::size_t robot_index(int id) const {
        for (std::size_t i = 0; i < sim_.robots().size(); ++i)
            if (sim_.robots()[i].model->spec.id == id) return i;
        throw std::out_of_range("no robot " + std::to_string(id));
    }

    nlohmann::json trap_json() const {
        nlohmann::json traps = nlohmann::json::object();
        for (std::size_t i = 0; i < sim_.robots().size(); ++i)
            traps[std::to_string(sim_.robots()[i].model->spec.id)] = sim_.trap_regions_of(i);
        return traps;
    }

    static std::string ack(const char* of, int robot) {
        return nlohmann::json{{"type", "ack"}, {"of", of}, {"robot", robot}}.dump();
    }

    void release(int robot) {
        takeovers_.erase(robot);
        sim_.set_human_control(robot, false);
    }

    Simulation sim_;
    std::map<int, int> takeovers_;  // robot -> client
    bool running_ = false;
    bool step_requested_ = false;
    long inputs_accepted_ = 0;
};

}  // namespace mrltl
