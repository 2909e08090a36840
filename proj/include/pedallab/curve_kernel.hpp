#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pedallab/errors.hpp"
#include "pedallab/vec2.hpp"

namespace pedallab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Axis-aligned ellipse centered at the origin, a >= b > 0.
///
/// Every derived quantity is expressed through c^2 = a^2 - b^2 so the circle
/// (c = 0) needs no special casing anywhere downstream.
class Ellipse {
 public:
  Ellipse(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > 0.0) || a < b) {
      std::ostringstream msg;
      msg << "ellipse requires a >= b > 0 (got a=" << a << ", b=" << b << ")";
      throw InvalidArgument(msg.str());
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c2() const noexcept { return a_ * a_ - b_ * b_; }
  /// sqrt(a^4 - a^2 b^2 + b^4)
  double delta() const noexcept {
    const double a2 = a_ * a_, b2 = b_ * b_;
    return std::sqrt(a2 * a2 - a2 * b2 + b2 * b2);
  }
  double area() const noexcept { return kPi * a_ * b_; }

  /// x^2/a^2 + y^2/b^2 - 1; negative inside.
  double implicit(const Point2& p) const noexcept {
    return (p.x * p.x) / (a_ * a_) + (p.y * p.y) / (b_ * b_) - 1.0;
  }
  bool on_boundary(const Point2& p, double rel_tol = 1e-9) const noexcept {
    return std::abs(implicit(p)) <= rel_tol;
  }
  bool strictly_inside(const Point2& p, double rel_tol = 1e-9) const noexcept {
    return implicit(p) < -rel_tol;
  }
  /// Ellipse-angle parameter of a point (exact for points on the boundary).
  double parameter_of(const Point2& p) const noexcept { return std::atan2(p.y / b_, p.x / a_); }

 private:
  double a_;
  double b_;
};

template <typename T>
Vec2<T> ellipse_point(const Ellipse& e, T t) {
  using std::cos, std::sin;
  return {T(e.a()) * cos(t), T(e.b()) * sin(t)};
}

/// P'(t); never zero since a, b > 0.
template <typename T>
Vec2<T> ellipse_velocity(const Ellipse& e, T t) {
  using std::cos, std::sin;
  return {-T(e.a()) * sin(t), T(e.b()) * cos(t)};
}

template <typename T>
Vec2<T> ellipse_acceleration(const Ellipse& e, T t) {
  return -ellipse_point(e, t);
}

/// Convex curve given by its support function h(t) (signed distance from the
/// origin to the tangent line with outward normal (cos t, sin t)).
struct SupportCurve {
  using Fn = std::function<double(double)>;

  Fn h;
  Fn dh;
  Fn d2h;
  /// Optional; a five-point stencil on d2h is used when empty.
  Fn d3h;

  double third_derivative(double t) const {
    if (d3h) return d3h(t);
    constexpr double step = 1e-3;
    return (d2h(t - 2 * step) - 8 * d2h(t - step) + 8 * d2h(t + step) - d2h(t + 2 * step)) /
           (12 * step);
  }

  /// Radius of curvature h + h'' at normal angle t.
  double radius_of_curvature(double t) const { return h(t) + d2h(t); }

  bool is_convex(std::size_t samples = 1024) const {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
      if (!(radius_of_curvature(t) > 0.0)) return false;
    }
    return true;
  }

  bool is_periodic(double tol = 1e-10, std::size_t samples = 64) const {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
      const double scale = std::max(1.0, std::abs(h(t)));
      if (std::abs(h(t + kTwoPi) - h(t)) > tol * scale) return false;
    }
    return true;
  }
};

/// Curve point with outward normal angle t: (h cos t - h' sin t, h sin t + h' cos t).
inline Point2 support_point(const SupportCurve& s, double t) {
  const double h = s.h(t), dh = s.dh(t);
  const double c = std::cos(t), sn = std::sin(t);
  return {h * c - dh * sn, h * sn + dh * c};
}

/// Derivative of support_point in t: (h + h'') (-sin t, cos t).
inline Point2 support_velocity(const SupportCurve& s, double t) {
  const double rho = s.radius_of_curvature(t);
  return {-rho * std::sin(t), rho * std::cos(t)};
}

/// Circle of radius r centered at (p, q): h = r + p cos t + q sin t.
inline SupportCurve circle_support(double r, Point2 center = {}) {
  const double p = center.x, q = center.y;
  return {
      [=](double t) { return r + p * std::cos(t) + q * std::sin(t); },
      [=](double t) { return -p * std::sin(t) + q * std::cos(t); },
      [=](double t) { return -p * std::cos(t) - q * std::sin(t); },
      [=](double t) { return p * std::sin(t) - q * std::cos(t); },
  };
}

/// h = base + amp cos(k t). Convex iff base > (k^2 - 1) |amp|.
inline SupportCurve cosine_support(double base, double amp, int k) {
  const double w = static_cast<double>(k);
  return {
      [=](double t) { return base + amp * std::cos(w * t); },
      [=](double t) { return -amp * w * std::sin(w * t); },
      [=](double t) { return -amp * w * w * std::cos(w * t); },
      [=](double t) { return amp * w * w * w * std::sin(w * t); },
  };
}

/// Center-based support function of the ellipse, h = sqrt(a^2 cos^2 t + b^2 sin^2 t).
///
/// With g = h^2 = A + B cos 2t the derivatives follow from differentiating
/// h^2 = g repeatedly: 2 h h' = g', 2 h'^2 + 2 h h'' = g'', 6 h' h'' + 2 h h''' = g'''.
inline SupportCurve ellipse_support(const Ellipse& e) {
  const double a2 = e.a() * e.a(), b2 = e.b() * e.b();
  const double mean = 0.5 * (a2 + b2);
  const double amp = 0.5 * (a2 - b2);
  struct Jet {
    double h, dh, d2h, d3h;
  };
  auto jet = [=](double t) {
    const double c2t = std::cos(2 * t), s2t = std::sin(2 * t);
    const double g = mean + amp * c2t;
    const double g1 = -2 * amp * s2t;
    const double g2 = -4 * amp * c2t;
    const double g3 = 8 * amp * s2t;
    Jet j{};
    j.h = std::sqrt(g);
    j.dh = g1 / (2 * j.h);
    j.d2h = (0.5 * g2 - j.dh * j.dh) / j.h;
    j.d3h = (0.5 * g3 - 3 * j.dh * j.d2h) / j.h;
    return j;
  };
  return {
      [=](double t) { return jet(t).h; },
      [=](double t) { return jet(t).dh; },
      [=](double t) { return jet(t).d2h; },
      [=](double t) { return jet(t).d3h; },
  };
}

/// Uniform periodic nodes t_k = start + (k + offset) * 2*pi / count.
struct ParamGrid {
  double start = 0.0;
  std::size_t count = 2048;
  double offset = 0.0;

  ParamGrid() = default;
  ParamGrid(double start_, std::size_t count_, double offset_ = 0.0)
      : start(start_), count(count_), offset(offset_) {
    validate();
  }

  void validate() const {
    if (count < 8) {
      throw InvalidArgument("parameter grid needs at least 8 nodes (got " +
                            std::to_string(count) + ")");
    }
    if (!(offset >= 0.0 && offset < 1.0) || !std::isfinite(start)) {
      throw InvalidArgument("parameter grid offset must lie in [0, 1)");
    }
  }

  double step() const { return kTwoPi / static_cast<double>(count); }
  double node(std::size_t k) const {
    return start + (static_cast<double>(k) + offset) * step();
  }
  std::vector<double> nodes() const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = node(k);
    return out;
  }
  /// Twice as many nodes with the same fractional offset (nodes are not nested
  /// unless offset == 0, but a singular node stays avoided).
  ParamGrid refined() const { return ParamGrid(start, 2 * count, offset); }
};

/// Closed polyline sampled from a parametric evaluator over one period.
struct SampledCurve {
  std::vector<double> params;
  std::vector<Point2> points;
  bool closed = true;
  /// Underlying evaluator, when known; used for local refinement.
  std::function<Point2(double)> evaluator;

  std::size_t size() const noexcept { return points.size(); }

  void validate() const {
    if (params.size() != points.size()) {
      throw InvalidArgument("sampled curve: params and points differ in length");
    }
    for (std::size_t k = 1; k < params.size(); ++k) {
      if (!(params[k] > params[k - 1])) {
        throw InvalidArgument("sampled curve: parameters must be strictly increasing");
      }
    }
    if (!params.empty() && params.back() - params.front() >= kTwoPi) {
      throw InvalidArgument("sampled curve: parameters span more than one period");
    }
  }
};

/// Evaluates f on every grid node. Library errors raised by f are rethrown as
/// EvaluationError naming the offending node.
template <typename F>
SampledCurve sample_curve(F&& f, const ParamGrid& grid) {
  grid.validate();
  SampledCurve out;
  out.params = grid.nodes();
  out.points.reserve(grid.count);
  for (const double t : out.params) {
    Point2 p;
    try {
      p = f(t);
    } catch (const Error& err) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "evaluation failed at t=" << t << ": " << err.what();
      throw EvaluationError(t, msg.str());
    }
    if (!is_finite(p)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "non-finite point at t=" << t;
      throw EvaluationError(t, msg.str());
    }
    out.points.push_back(p);
  }
  if constexpr (std::is_copy_constructible_v<std::decay_t<F>>) {
    out.evaluator = [g = std::decay_t<F>(f)](double t) { return Point2(g(t)); };
  }
  return out;
}

}  // namespace pedallab
