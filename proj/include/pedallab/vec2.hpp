#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace pedallab {

/// Plane vector over an arithmetic scalar. Evaluators are templated on the
/// scalar so that they can run on std::complex<double> for complex-step
/// differentiation; everything stored or reported uses Point2.
template <typename T>
struct Vec2 {
  T x{};
  T y{};

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(const T& s) {
    x *= s;
    y *= s;
    return *this;
  }
};

using Point2 = Vec2<double>;

template <typename T>
constexpr Vec2<T> operator+(Vec2<T> a, const Vec2<T>& b) { return a += b; }
template <typename T>
constexpr Vec2<T> operator-(Vec2<T> a, const Vec2<T>& b) { return a -= b; }
template <typename T>
constexpr Vec2<T> operator-(const Vec2<T>& a) { return {-a.x, -a.y}; }
template <typename T>
constexpr Vec2<T> operator*(Vec2<T> a, const T& s) { return a *= s; }
template <typename T>
constexpr Vec2<T> operator*(const T& s, Vec2<T> a) { return a *= s; }
template <typename T>
constexpr Vec2<T> operator/(const Vec2<T>& a, const T& s) { return {a.x / s, a.y / s}; }

template <typename T>
constexpr bool operator==(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x == b.x && a.y == b.y;
}

template <typename T>
constexpr T dot(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product.
template <typename T>
constexpr T cross(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.y - a.y * b.x; }

/// Counterclockwise quarter turn.
template <typename T>
constexpr Vec2<T> perp(const Vec2<T>& a) { return {-a.y, a.x}; }

template <typename T>
Vec2<T> rotate(const Vec2<T>& a, double angle) {
  const T c = T(std::cos(angle));
  const T s = T(std::sin(angle));
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
inline bool is_finite(const Point2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline Point2 real_part(const Vec2<std::complex<double>>& v) { return {v.x.real(), v.y.real()}; }
inline Point2 imag_part(const Vec2<std::complex<double>>& v) { return {v.x.imag(), v.y.imag()}; }

/// Orthogonal projection of `point` onto the line through `origin` with direction `dir`.
template <typename T>
Vec2<T> project_onto_line(const Vec2<T>& point, const Vec2<T>& origin, const Vec2<T>& dir) {
  const T lambda = dot(point - origin, dir) / dot(dir, dir);
  return origin + dir * lambda;
}

}  // namespace pedallab
