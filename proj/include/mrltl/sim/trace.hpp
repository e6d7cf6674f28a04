#pragma once

// Tick-stamped execution record, its CSV form, and the statistics that can be
// re-derived from it alone.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrltl/geometry.hpp"
#include "mrltl/sim/dynamics.hpp"
#include "mrltl/workspace.hpp"

namespace mrltl {

enum class EntityKind { Robot, Obstacle };

/// Value on the 1e-6 grid used by the CSV, so in-memory and reloaded rows agree.
inline double round6(double x) { return std::round(x * 1e6) / 1e6 + 0.0; }

struct TraceRow {
    long tick = 0;
    double time = 0.0;
    int entity = 0;
    EntityKind kind = EntityKind::Robot;
    double x = 0.0, y = 0.0, theta = 0.0, v = 0.0, w = 0.0;
    std::vector<std::string> events;
    std::optional<double> kappa;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

inline TraceRow make_row(long tick, double time, int entity, EntityKind kind, const RobotState& s, ControlInput u,
                         std::vector<std::string> events = {}, std::optional<double> kappa = std::nullopt) {
    TraceRow r{tick, round6(time), entity, kind, round6(s.x), round6(s.y), round6(s.theta), round6(u.v), round6(u.w),
               std::move(events), std::nullopt};
    if (kappa) r.kappa = round6(*kappa);
    return r;
}

inline constexpr const char* kTraceHeader = "tick,time_s,entity_id,kind,x,y,theta,v,w,event,kappa";

inline void write_row(std::ostream& out, const TraceRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%ld,%.6f,%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,", r.tick, r.time, r.entity,
                  r.kind == EntityKind::Robot ? "robot" : "obstacle", r.x, r.y, r.theta, r.v, r.w);
    out << buf;
    for (std::size_t i = 0; i < r.events.size(); ++i) out << (i ? ";" : "") << r.events[i];
    out << ',';
    if (r.kappa) {
        std::snprintf(buf, sizeof buf, "%.6f", *r.kappa);
        out << buf;
    }
    out << '\n';
}

inline void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << kTraceHeader << '\n';
    for (const auto& r : rows) write_row(out, r);
}

inline std::string trace_to_string(const std::vector<TraceRow>& rows) {
    std::ostringstream ss;
    write_trace(ss, rows);
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

template <class T>
T parse_field(const std::string& s, std::size_t line, const char* what) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("trace line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    return v;
}

}  // namespace detail

inline std::vector<TraceRow> read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("trace: missing or wrong header");
    std::vector<TraceRow> rows;
    for (std::size_t n = 2; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 11) throw std::runtime_error("trace line " + std::to_string(n) + ": expected 11 fields");
        TraceRow r;
        r.tick = detail::parse_field<long>(f[0], n, "tick");
        r.time = detail::parse_field<double>(f[1], n, "time");
        r.entity = detail::parse_field<int>(f[2], n, "entity id");
        if (f[3] == "robot") r.kind = EntityKind::Robot;
        else if (f[3] == "obstacle") r.kind = EntityKind::Obstacle;
        else throw std::runtime_error("trace line " + std::to_string(n) + ": bad kind '" + f[3] + "'");
        r.x = detail::parse_field<double>(f[4], n, "x");
        r.y = detail::parse_field<double>(f[5], n, "y");
        r.theta = detail::parse_field<double>(f[6], n, "theta");
        r.v = detail::parse_field<double>(f[7], n, "v");
        r.w = detail::parse_field<double>(f[8], n, "w");
        if (!f[9].empty()) r.events = detail::split(f[9], ';');
        if (!f[10].empty()) r.kappa = detail::parse_field<double>(f[10], n, "kappa");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<TraceRow> trace_from_string(const std::string& s) {
    std::istringstream in(s);
    return read_trace(in);
}

struct RobotStats {
    int id = 0;
    long suffix_cycles = 0;
    long conflicts = 0;
    long replans = 0;        // replan_start events
    long replans_done = 0;
    long infeasible = 0;
    long collisions = 0;
    long region_entries = 0;
    std::vector<RegionId> visited;  // regions entered, sorted
    double max_abs_v = 0.0;
    double max_abs_w = 0.0;
    long input_violations = 0;

    friend bool operator==(const RobotStats&, const RobotStats&) = default;
};

/// Statistics derivable from the trace alone.
struct TraceSummary {
    long ticks = 0;
    double horizon_s = 0.0;
    std::vector<RobotStats> robots;  // by id
    long collisions = 0;             // collision events over all rows
    double min_robot_distance = kInf;
    double min_obstacle_distance = kInf;

    const RobotStats& robot(int id) const {
        for (const auto& r : robots)
            if (r.id == id) return r;
        throw std::out_of_range("no robot " + std::to_string(id) + " in summary");
    }
    long total(long RobotStats::*field) const {
        long n = 0;
        for (const auto& r : robots) n += r.*field;
        return n;
    }

    friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

inline TraceSummary summarize(const std::vector<TraceRow>& rows, const InputBounds& bounds = {}, double tol = 1e-9) {
    TraceSummary s;
    std::map<int, RobotStats> stats;
    std::map<int, std::set<RegionId>> visited;
    std::set<long> ticks;
    double last_time = 0.0;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].tick == rows[i].tick) ++j;
        ticks.insert(rows[i].tick);
        last_time = std::max(last_time, rows[i].time);
        std::vector<const TraceRow*> robots, obstacles;
        for (std::size_t k = i; k < j; ++k) (rows[k].kind == EntityKind::Robot ? robots : obstacles).push_back(&rows[k]);
        for (std::size_t a = 0; a < robots.size(); ++a) {
            const Vec2 p{robots[a]->x, robots[a]->y};
            for (std::size_t b = a + 1; b < robots.size(); ++b)
                s.min_robot_distance = std::min(s.min_robot_distance, distance(p, Vec2{robots[b]->x, robots[b]->y}));
            for (const auto* o : obstacles)
                s.min_obstacle_distance = std::min(s.min_obstacle_distance, distance(p, Vec2{o->x, o->y}));
        }
        for (const auto* r : robots) {
            auto& st = stats[r->entity];
            st.id = r->entity;
            st.max_abs_v = std::max(st.max_abs_v, std::abs(r->v));
            st.max_abs_w = std::max(st.max_abs_w, std::abs(r->w));
            if (std::abs(r->v) > bounds.v_max + tol || std::abs(r->w) > bounds.w_max + tol) ++st.input_violations;
            for (const auto& e : r->events) {
                if (e == "suffix_cycle") ++st.suffix_cycles;
                else if (e == "conflict") ++st.conflicts;
                else if (e == "replan_start") ++st.replans;
                else if (e == "replan_done") ++st.replans_done;
                else if (e == "infeasible") ++st.infeasible;
                else if (e == "collision") ++st.collisions;
                else if (e.rfind("region_enter:", 0) == 0) {
                    ++st.region_entries;
                    visited[r->entity].insert(std::stoi(e.substr(13)));
                }
            }
        }
        i = j;
    }
    s.ticks = static_cast<long>(ticks.size());
    s.horizon_s = last_time;
    for (auto& [id, st] : stats) {
        st.visited.assign(visited[id].begin(), visited[id].end());
        s.collisions += st.collisions;
        s.robots.push_back(st);
    }
    return s;
}

inline nlohmann::json to_json(const TraceSummary& s) {
    using nlohmann::json;
    auto num = [](double d) { return d == kInf ? json(nullptr) : json(d); };
    json robots = json::array();
    for (const auto& r : s.robots)
        robots.push_back({{"id", r.id},
                          {"suffix_cycles", r.suffix_cycles},
                          {"conflicts", r.conflicts},
                          {"replans", r.replans},
                          {"replans_done", r.replans_done},
                          {"infeasible", r.infeasible},
                          {"collisions", r.collisions},
                          {"region_entries", r.region_entries},
                          {"visited", r.visited},
                          {"max_abs_v", r.max_abs_v},
                          {"max_abs_w", r.max_abs_w},
                          {"input_violations", r.input_violations}});
    return {{"ticks", s.ticks},
            {"horizon_s", s.horizon_s},
            {"robots", robots},
            {"collisions", s.collisions},
            {"min_robot_distance", num(s.min_robot_distance)},
            {"min_obstacle_distance", num(s.min_obstacle_distance)}};
}

}  // namespace mrltl
