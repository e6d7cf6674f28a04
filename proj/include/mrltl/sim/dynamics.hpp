#pragma once

// Unicycle kinematics with exact constant-input integration.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mrltl/geometry.hpp"

namespace mrltl {

struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
    friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct ControlInput {
    double v = 0.0;
    double w = 0.0;
    friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct InputBounds {
    double v_max = 0.35;
    double w_max = 0.35;

    bool contains(ControlInput u, double tol = 1e-12) const {
        return std::abs(u.v) <= v_max + tol && std::abs(u.w) <= w_max + tol;
    }
    ControlInput clamp(ControlInput u) const {
        return {std::clamp(u.v, -v_max, v_max), std::clamp(u.w, -w_max, w_max)};
    }
};

class InputOutOfBounds : public std::invalid_argument {
public:
    explicit InputOutOfBounds(ControlInput u)
        : std::invalid_argument("input (" + std::to_string(u.v) + ", " + std::to_string(u.w) +
                                ") outside bounds") {}
};

/// Exact solution of x' = v cos(theta), y' = v sin(theta), theta' = w over dt.
/// The chord form 2 sin(w dt / 2) / w avoids cancellation for small w.
inline RobotState step_unicycle(const RobotState& s, ControlInput u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double dtheta = u.w * dt;
    double chord = u.v * dt;
    if (std::abs(u.w) >= 1e-9) chord = u.v * 2.0 * std::sin(dtheta / 2.0) / u.w;
    const double heading = s.theta + dtheta / 2.0;
    return {s.x + chord * std::cos(heading), s.y + chord * std::sin(heading), wrap_angle(s.theta + dtheta)};
}

inline RobotState step_unicycle(const RobotState& s, ControlInput u, double dt, const InputBounds& bounds) {
    if (!bounds.contains(u)) throw InputOutOfBounds(u);
    return step_unicycle(s, u, dt);
}

}  // namespace mrltl
