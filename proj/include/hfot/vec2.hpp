#pragma once

#include <cmath>

namespace hfot {

/// Plain 2-vector used for points and directions in the plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double a) const { return {a * x, a * y}; }
  constexpr Vec2 operator/(double a) const { return {x / a, y / a}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Unit vector along `a`; the zero vector maps to itself.
inline Vec2 unit(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec2{};
}

/// (cos t, sin t)
inline Vec2 direction(double t) { return {std::cos(t), std::sin(t)}; }
/// (-sin t, cos t)
inline Vec2 normal_direction(double t) { return {-std::sin(t), std::cos(t)}; }

}  // namespace hfot
