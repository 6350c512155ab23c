#pragma once

#include <cmath>

namespace semidot {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point p) noexcept { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point a, Point b) noexcept = default;
};

inline double norm(Point p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) noexcept { return norm(a - b); }
constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    constexpr Point operator*(Point p) const noexcept
    {
        return {a11 * p.x + a12 * p.y, a21 * p.x + a22 * p.y};
    }
    constexpr Mat2 operator*(Mat2 const& o) const noexcept
    {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    constexpr double det() const noexcept { return a11 * a22 - a12 * a21; }
    constexpr Mat2 inverse() const noexcept
    {
        double const d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
};

} // namespace semidot
