#pragma once

// Mixed-initiative blending u = u_r + kappa * u_h with a smooth distance gate.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mrltl/geometry.hpp"
#include "mrltl/sim/dynamics.hpp"

namespace mrltl {

struct MicParams {
    double d_s = 0.4;    // safety distance (m)
    double eps = 0.3;    // buffer (m)
    double g_mix = 0.5;  // weight of the obstacle gate vs the trap gate
    double stale_after = 0.5;  // human input older than this (s) is ignored

    void validate() const {
        if (!(d_s > 0) || !(eps > 0) || !(g_mix >= 0 && g_mix <= 1) || !(stale_after >= 0))
            throw std::invalid_argument("invalid mixed-initiative parameters");
    }
};

/// rho(s) = exp(-1/s) for s > 0, else 0.
inline double rho(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

/// 0 for d <= d_s, 1 for d >= d_s + eps, smooth in between; infinite d gives 1.
inline double gate(double d, double d_s, double eps) {
    if (d <= d_s) return 0.0;
    if (d >= d_s + eps) return 1.0;
    // rho(a) / (rho(a) + rho(b)) in a form that cannot underflow to 0/0
    return 1.0 / (1.0 + std::exp(1.0 / (d - d_s) - 1.0 / (eps + d_s - d)));
}

struct MicDistances {
    double to_obstacles = kInf;
    double to_traps = kInf;
};

inline MicDistances mic_distances(Vec2 p, const std::vector<Rect>& obstacle_rects,
                                  const std::vector<Disc>& obstacle_discs, const std::vector<Rect>& trap_rects) {
    return {std::min(min_distance(p, obstacle_rects), min_distance(p, obstacle_discs)),
            min_distance(p, trap_rects)};
}

inline double kappa(const MicDistances& d, const MicParams& params) {
    return params.g_mix * gate(d.to_obstacles, params.d_s, params.eps) +
           (1.0 - params.g_mix) * gate(d.to_traps, params.d_s, params.eps);
}

struct HumanInput {
    int robot = 0;
    double v = 0.0;
    double w = 0.0;
    double stamp = 0.0;  // seconds
};

/// u_r + kappa * u_h, saturated; stale or absent human input contributes 0.
inline ControlInput mix(ControlInput u_r, const std::optional<HumanInput>& u_h, double k, const InputBounds& bounds,
                        double now = 0.0, double stale_after = kInf) {
    if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("kappa outside [0, 1]");
    ControlInput u = u_r;
    if (u_h && now - u_h->stamp <= stale_after) {
        u.v += k * u_h->v;
        u.w += k * u_h->w;
    }
    return bounds.clamp(u);
}

}  // namespace mrltl
