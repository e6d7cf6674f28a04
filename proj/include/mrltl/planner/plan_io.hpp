#pragma once

// Line-oriented plan text format:
//
//   robot 0
//   task [] <> R8 && [] <> R20
//   prefix R1:0 R2:0 R3:1
//   suffix R4:1 R3:1
//
// Each state is region:buchi. `robot` and `task` lines are optional.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrltl/planner/product.hpp"

namespace mrltl {

namespace detail {

inline bool parse_int(const std::string& s, int& out) {
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return !s.empty() && ec == std::errc{} && ptr == end;
}

}  // namespace detail

struct PlanRecord {
    int robot = -1;
    std::string task;
    Plan plan;
};

inline void write_plan(std::ostream& os, const PlanRecord& rec) {
    if (rec.robot >= 0) os << "robot " << rec.robot << '\n';
    if (!rec.task.empty()) os << "task " << rec.task << '\n';
    auto states = [&](const char* key, const std::vector<ProductState>& xs) {
        os << key;
        for (const auto& q : xs) os << " R" << q.region << ':' << q.buchi;
        os << '\n';
    };
    states("prefix", rec.plan.prefix);
    states("suffix", rec.plan.suffix);
}

inline std::string plan_to_string(const PlanRecord& rec) {
    std::ostringstream os;
    write_plan(os, rec);
    return os.str();
}

/// Reads one record; stops after the `suffix` line. Throws
/// std::invalid_argument with the offending line number on malformed input.
inline PlanRecord read_plan(std::istream& is) {
    PlanRecord rec;
    std::string line;
    int lineno = 0;
    bool have_prefix = false;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("plan line " + std::to_string(lineno) + ": " + what);
    };
    auto parse_states = [&](std::istringstream& ls) {
        std::vector<ProductState> out;
        std::string tok;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            ProductState q;
            if (tok.size() < 4 || tok[0] != 'R' || colon == std::string::npos ||
                !detail::parse_int(tok.substr(1, colon - 1), q.region) ||
                !detail::parse_int(tok.substr(colon + 1), q.buchi))
                fail("bad state '" + tok + "'");
            out.push_back(q);
        }
        if (out.empty()) fail("no states");
        return out;
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "robot") {
            if (!(ls >> rec.robot) || rec.robot < 0) fail("bad robot id");
        } else if (key == "task") {
            const auto pos = line.find("task") + 4;
            const auto start = line.find_first_not_of(" \t", pos);
            if (start == std::string::npos) fail("empty task");
            rec.task = line.substr(start);
        } else if (key == "prefix") {
            rec.plan.prefix = parse_states(ls);
            have_prefix = true;
        } else if (key == "suffix") {
            if (!have_prefix) fail("suffix before prefix");
            rec.plan.suffix = parse_states(ls);
            return rec;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    throw std::invalid_argument("plan: missing " + std::string(have_prefix ? "suffix" : "prefix") + " line");
}

inline PlanRecord plan_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_plan(is);
}

}  // namespace mrltl
