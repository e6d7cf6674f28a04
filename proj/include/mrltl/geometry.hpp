#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace mrltl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

/// Closed axis-aligned rectangle.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

inline double distance(Vec2 p, const Rect& r) {
    const double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
    const double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
    return std::hypot(dx, dy);
}

/// Distance to the disc's boundary, 0 inside.
inline double distance(Vec2 p, const Disc& d) {
    return std::max(0.0, distance(p, d.center) - d.radius);
}

inline double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(a + t * ab, p);
}

namespace detail {

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline bool segments_intersect(Vec2 p, Vec2 p2, Vec2 q, Vec2 q2) {
    const Vec2 r = p2 - p, s = q2 - q;
    const double d1 = cross(r, q - p), d2 = cross(r, q2 - p);
    const double d3 = cross(s, p - q), d4 = cross(s, p2 - q);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    return (d1 == 0 && on(p, p2, q)) || (d2 == 0 && on(p, p2, q2)) ||
           (d3 == 0 && on(q, q2, p)) || (d4 == 0 && on(q, q2, p2));
}

}  // namespace detail

/// Minimum distance between segment [a, b] and a rectangle (0 if they meet).
inline double distance(Vec2 a, Vec2 b, const Rect& r) {
    if (r.contains(a) || r.contains(b)) return 0.0;
    const Vec2 c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    double best = kInf;
    for (int i = 0; i < 4; ++i) {
        const Vec2 e0 = c[i], e1 = c[(i + 1) % 4];
        if (detail::segments_intersect(a, b, e0, e1)) return 0.0;
        best = std::min({best, segment_point_distance(a, b, e0), segment_point_distance(e0, e1, a),
                         segment_point_distance(e0, e1, b)});
    }
    return best;
}

inline double distance(Vec2 a, Vec2 b, const Disc& d) {
    return std::max(0.0, segment_point_distance(a, b, d.center) - d.radius);
}

template <class Shape>
double min_distance(Vec2 p, const std::vector<Shape>& shapes) {
    double best = kInf;
    for (const auto& s : shapes) best = std::min(best, distance(p, s));
    return best;
}

}  // namespace mrltl
