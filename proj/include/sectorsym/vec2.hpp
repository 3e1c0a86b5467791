#pragma once

#include <cmath>

namespace sectorsym {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
constexpr Vec2 mirror_x1(Vec2 v) { return {v.x, -v.y}; }

/// Unit vector at angle t.
inline Vec2 unit(double t) { return {std::cos(t), std::sin(t)}; }
inline Vec2 rotate(Vec2 v, double t) {
    double c = std::cos(t), s = std::sin(t);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
constexpr double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

}  // namespace sectorsym
