#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include "pedallab/curve_kernel.hpp"
#include "pedallab/errors.hpp"
#include "pedallab/vec2.hpp"

namespace pedallab {

// ---------------------------------------------------------------------------
// Feet of perpendiculars
// ---------------------------------------------------------------------------

/// Which line through P(t) the perpendicular from M is dropped onto.
///
/// Rotated(0) is the pedal and Rotated(pi/2) the contrapedal; Interpolated(mu)
/// is the affine combination (1 - mu) Q_p + mu Q_c, mu unrestricted.
struct FootKind {
  enum class Tag { Pedal, Contrapedal, Rotated, Interpolated };

  Tag tag = Tag::Pedal;
  double param = 0.0;

  static FootKind pedal() { return {Tag::Pedal, 0.0}; }
  static FootKind contrapedal() { return {Tag::Contrapedal, 0.0}; }
  static FootKind rotated(double theta) { return checked({Tag::Rotated, theta}); }
  static FootKind interpolated(double mu) { return checked({Tag::Interpolated, mu}); }

 private:
  static FootKind checked(FootKind k) {
    if (!std::isfinite(k.param)) throw InvalidArgument("foot kind parameter must be finite");
    return k;
  }
};

/// Foot on the line through `point` along `velocity` rotated by the kind's angle.
/// Works for any regular parametrized curve.
template <typename T>
Vec2<T> curve_foot(const FootKind& kind, const Vec2<T>& point, const Vec2<T>& velocity,
                   const Point2& m) {
  const Vec2<T> mt{T(m.x), T(m.y)};
  switch (kind.tag) {
    case FootKind::Tag::Pedal:
      return project_onto_line(mt, point, velocity);
    case FootKind::Tag::Contrapedal:
      return project_onto_line(mt, point, perp(velocity));
    case FootKind::Tag::Rotated:
      return project_onto_line(mt, point, rotate(velocity, kind.param));
    case FootKind::Tag::Interpolated: {
      const T mu = T(kind.param);
      return project_onto_line(mt, point, velocity) * (T(1) - mu) +
             project_onto_line(mt, point, perp(velocity)) * mu;
    }
  }
  return point;
}

/// Closed-form pedal foot of M on the tangent at P(t) = (a cos t, b sin t).
template <typename T>
Vec2<T> ellipse_pedal_foot(const Ellipse& e, const Point2& m, T t) {
  using std::cos, std::sin;
  const T a(e.a()), b(e.b()), x0(m.x), y0(m.y);
  const T c = cos(t), s = sin(t);
  const T den = b * b * c * c + a * a * s * s;
  return {(a * a * x0 * s * s - a * b * y0 * c * s + a * b * b * c) / den,
          (b * b * y0 * c * c - a * b * x0 * c * s + a * a * b * s) / den};
}

/// Closed-form contrapedal foot of M on the normal at P(t).
template <typename T>
Vec2<T> ellipse_contrapedal_foot(const Ellipse& e, const Point2& m, T t) {
  using std::cos, std::sin;
  const T a(e.a()), b(e.b()), c2(e.c2()), x0(m.x), y0(m.y);
  const T c = cos(t), s = sin(t);
  const T den = b * b * c * c + a * a * s * s;
  return {(b * b * x0 * c * c + c * s * (a * b * y0 + a * c2 * s)) / den,
          (a * a * y0 * s * s + c * s * (a * b * x0 - b * c2 * c)) / den};
}

/// Foot point on the ellipse family lines. Pedal/Contrapedal use the closed
/// forms; Rotated projects onto the line along R_theta P'(t).
template <typename T>
Vec2<T> foot_point(const FootKind& kind, const Ellipse& e, const Point2& m, T t) {
  switch (kind.tag) {
    case FootKind::Tag::Pedal:
      return ellipse_pedal_foot(e, m, t);
    case FootKind::Tag::Contrapedal:
      return ellipse_contrapedal_foot(e, m, t);
    case FootKind::Tag::Rotated:
      return curve_foot(kind, ellipse_point(e, t), ellipse_velocity(e, t), m);
    case FootKind::Tag::Interpolated: {
      const T mu(kind.param);
      return ellipse_pedal_foot(e, m, t) * (T(1) - mu) + ellipse_contrapedal_foot(e, m, t) * mu;
    }
  }
  return ellipse_point(e, t);
}

/// Pedal / contrapedal of a support-function curve. Rotated projects onto the
/// theta-rotated tangent through support_point(S, t).
inline Point2 support_foot(const FootKind& kind, const SupportCurve& s, const Point2& m, double t) {
  const double x0 = m.x, y0 = m.y;
  const double c = std::cos(t), sn = std::sin(t);
  switch (kind.tag) {
    case FootKind::Tag::Pedal: {
      const double h = s.h(t);
      return {x0 * sn * sn + (h - y0 * sn) * c, (h - x0 * c) * sn + y0 * c * c};
    }
    case FootKind::Tag::Contrapedal: {
      const double dh = s.dh(t);
      return {x0 * c * c + y0 * c * sn - dh * sn, y0 * sn * sn + x0 * c * sn + dh * c};
    }
    case FootKind::Tag::Rotated:
      return curve_foot(kind, support_point(s, t), Point2{-sn, c}, m);
    case FootKind::Tag::Interpolated: {
      const double mu = kind.param;
      return support_foot(FootKind::pedal(), s, m, t) * (1.0 - mu) +
             support_foot(FootKind::contrapedal(), s, m, t) * mu;
    }
  }
  return support_point(s, t);
}

// ---------------------------------------------------------------------------
// Envelopes of line families
// ---------------------------------------------------------------------------

/// The line normal . X = offset.
struct Line {
  Point2 normal;
  double offset = 0.0;
};

/// One-parameter family of lines with its parameter derivative.
struct LineFamily {
  std::function<Line(double)> eval;
  std::function<Line(double)> deriv;
};

/// Characteristic point of the family at t: solves {n.X = d, n'.X = d'}.
///
/// Throws SingularFamily when |det| < rel_eps * max(|n|, |n'|)^2.
inline Point2 envelope_point(const LineFamily& family, double t, double rel_eps = 1e-12) {
  const Line l = family.eval(t);
  const Line dl = family.deriv(t);
  const double n_len = norm(l.normal);
  if (n_len == 0.0) throw DegenerateLine(t, "line family has a zero normal");
  const double scale = std::max(n_len, norm(dl.normal));
  const double det = cross(l.normal, dl.normal);
  if (!(std::abs(det) >= rel_eps * scale * scale)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "line family is singular at t=" << t << " (det=" << det << ")";
    throw SingularFamily(t, msg.str());
  }
  return {(l.offset * dl.normal.y - l.normal.y * dl.offset) / det,
          (l.normal.x * dl.offset - l.offset * dl.normal.x) / det};
}

/// Lines through gamma(t) perpendicular to gamma(t) - M.
inline LineFamily negative_pedal_family(std::function<Point2(double)> curve,
                                        std::function<Point2(double)> velocity, Point2 m) {
  LineFamily f;
  f.eval = [curve, m](double t) {
    const Point2 p = curve(t);
    const Point2 n = p - m;
    return Line{n, dot(n, p)};
  };
  f.deriv = [curve, velocity, m](double t) {
    const Point2 p = curve(t);
    const Point2 v = velocity(t);
    return Line{v, dot(v, p) + dot(p - m, v)};
  };
  return f;
}

inline LineFamily negative_pedal_family(const Ellipse& e, Point2 m) {
  return negative_pedal_family([e](double t) { return ellipse_point(e, t); },
                               [e](double t) { return ellipse_velocity(e, t); }, m);
}

/// Envelope of lines through P(t) perpendicular to P(t) - M.
inline Point2 negative_pedal_point(const Ellipse& e, const Point2& m, double t) {
  const Point2 p = ellipse_point(e, t);
  if (norm(p - m) <= 1e-12 * e.a()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "P(t) coincides with M at t=" << t;
    throw DegenerateLine(t, msg.str());
  }
  return envelope_point(negative_pedal_family(e, m), t);
}

/// Derivative of a scalar-templated evaluator by the complex step
/// f'(t) = Im f(t + i h) / h, free of subtractive cancellation.
template <typename F>
Point2 complex_step_velocity(const F& f, double t, double h = 1e-30) {
  const auto v = f(std::complex<double>(t, h));
  return imag_part(v) / h;
}

// ---------------------------------------------------------------------------
// Hybrid and pseudo-Talbot curves
// ---------------------------------------------------------------------------

namespace detail {
inline void require_hybrid_domain(const Ellipse& e, const Point2& m) {
  if (e.implicit(m) > 1e-9) {
    std::ostringstream msg;
    msg << "hybrid curve is undefined for M exterior to the ellipse (M=(" << m.x << ", " << m.y
        << "))";
    throw DomainError(msg.str());
  }
}
}  // namespace detail

/// Intersection of the line through P(t) perpendicular to P(t) - M with the
/// line from M to the pedal foot Q_p. Closed form; M inside or on E.
///
/// The denominator is 4(a y0 sin t + b x0 cos t - ab); for M = P(s) it equals
/// 4ab(cos(t - s) - 1), so t = s is excluded.
template <typename T>
Vec2<T> hybrid_point(const Ellipse& e, const Point2& m, T t) {
  using std::cos, std::sin;
  detail::require_hybrid_domain(e, m);
  const double ad = e.a(), bd = e.b();
  const T a(ad), b(bd), c2(e.c2()), x0(m.x), y0(m.y);
  const T den = T(4) * (a * y0 * sin(t) + b * x0 * cos(t) - a * b);
  if (std::abs(std::real(den)) < 1e-9 * 4.0 * ad * bd) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "hybrid curve denominator vanishes at t=" << std::real(t);
    throw SingularParameter(std::real(t), msg.str());
  }
  const T x = -b * (T(3) * a * a + b * b + T(4) * y0 * y0) * cos(t) +
              T(4) * a * b * x0 * cos(T(2) * t) - b * c2 * cos(T(3) * t) +
              T(4) * a * x0 * y0 * sin(t) + T(4) * b * b * y0 * sin(T(2) * t);
  const T y = -a * (a * a + T(3) * b * b + T(4) * x0 * x0) * sin(t) +
              T(4) * a * a * x0 * sin(T(2) * t) - a * c2 * sin(T(3) * t) +
              T(4) * b * x0 * y0 * cos(t) - T(4) * a * b * y0 * cos(T(2) * t);
  return {x / den, y / den};
}

/// Same point as hybrid_point, computed by intersecting the two defining lines.
inline Point2 hybrid_point_oracle(const Ellipse& e, const Point2& m, double t) {
  detail::require_hybrid_domain(e, m);
  const Point2 p = ellipse_point(e, t);
  const Point2 along_pedal = perp(ellipse_velocity(e, t));  // M + u * along_pedal
  const Point2 along_line = perp(m - p);                    // P + v * along_line
  const double det = cross(along_pedal, along_line);
  if (std::abs(det) <= 1e-14 * norm(along_pedal) * std::max(norm(along_line), 1e-300)) {
    throw SingularParameter(t, "hybrid lines are parallel");
  }
  const double u = cross(p - m, along_line) / det;
  return m + along_pedal * u;
}

/// Negative pedal of the hybrid curve for M = P(s), closed form in the curve
/// parameter t. Coefficients k_x, k_y depend on t; s enters only through
/// cos s and sin s.
template <typename T>
Vec2<T> pseudo_talbot_point(const Ellipse& e, double s, T t) {
  using std::cos, std::sin;
  const T a(e.a()), b(e.b());
  const T a2 = a * a, b2 = b * b, a4 = a2 * a2, b4 = b2 * b2;
  const T c2sq = (a2 - b2) * (a2 - b2);
  const T ct = cos(t), st = sin(t);
  const T cu(std::cos(s)), su(std::sin(s));
  const T ct2 = ct * ct, ct4 = ct2 * ct2, st2 = st * st;
  const T kx = T(2) * ct4 - T(3) * ct2;
  const T ky = T(2) * ct4 - ct2;
  const T x = -((kx + T(1)) * a4 - T(2) * (kx + T(1)) * b2 * a2 + kx * b4) * cu / (b2 * a) -
              T(2) * c2sq * st2 * st * ct * su / (b2 * a) +
              ct * (a2 + b2) * (-a2 * st2 - b2 * ct2 + T(2) * b2) / (b2 * a);
  const T y = -T(2) * c2sq * st * ct2 * ct * cu / (a2 * b) -
              ((ky - T(1)) * a4 - T(2) * ky * b2 * a2 + ky * b4) * su / (a2 * b) +
              st * (a2 + b2) * ((a2 - b2) * ct2 + a2) / (a2 * b);
  return {x, y};
}

/// Negative pedal of the hybrid curve with respect to M = P(s), computed by the
/// envelope solver at hybrid parameter t. Traces the same point set as
/// pseudo_talbot_point under a different parametrization.
inline Point2 pseudo_talbot_oracle_point(const Ellipse& e, double s, double t) {
  const Point2 m = ellipse_point(e, s);
  auto hybrid = [e, m](auto u) { return hybrid_point(e, m, u); };
  auto family = negative_pedal_family([hybrid](double u) { return hybrid(u); },
                                      [hybrid](double u) { return complex_step_velocity(hybrid, u); },
                                      m);
  return envelope_point(family, t);
}

// ---------------------------------------------------------------------------
// Evolutoids
// ---------------------------------------------------------------------------

/// Envelope of the lines through P(t) along P'(t) rotated by theta. theta = 0
/// gives the ellipse, theta = pi/2 its evolute.
template <typename T>
Vec2<T> evolutoid_point(const Ellipse& e, double theta, T t) {
  using std::cos, std::sin;
  const T a(e.a()), b(e.b()), c2(e.c2());
  const T ct = cos(t), st = sin(t);
  const T cth(std::cos(theta)), sth(std::sin(theta));
  const T x = a * cth * cth * ct + c2 * sth * sth * ct * ct * ct / a -
              st * sth * cth * (b * b * ct * ct + a * a * st * st) / b;
  const T y = a * sth * cth * ct - c2 * sth * ct * ct * (b * ct * cth - a * sth * st) / (a * b) +
              st * (b * b * cth * cth - c2 * sth * sth) / b;
  return {x, y};
}

/// Classical evolute ((c^2/a) cos^3 t, -(c^2/b) sin^3 t).
template <typename T>
Vec2<T> evolute_point(const Ellipse& e, T t) {
  using std::cos, std::sin;
  const T c = cos(t), s = sin(t);
  return {T(e.c2() / e.a()) * c * c * c, -T(e.c2() / e.b()) * s * s * s};
}

/// theta at which the evolutoid's cusp count changes (0 below, 2 at, 4 above).
inline double evolutoid_critical_angle(const Ellipse& e) {
  return std::atan2(2.0 * e.a() * e.b(), 3.0 * e.c2());
}

/// Support function of the theta-evolutoid, h(t - theta) cos theta + h'(t - theta) sin theta.
/// Its support point at t is the envelope point at parameter t - theta.
inline SupportCurve evolutoid_support(const SupportCurve& s, double theta) {
  if (theta == 0.0) return s;
  const double c = std::cos(theta), sn = std::sin(theta);
  SupportCurve out;
  out.h = [s, c, sn, theta](double t) { return s.h(t - theta) * c + s.dh(t - theta) * sn; };
  out.dh = [s, c, sn, theta](double t) { return s.dh(t - theta) * c + s.d2h(t - theta) * sn; };
  out.d2h = [s, c, sn, theta](double t) {
    return s.d2h(t - theta) * c + s.third_derivative(t - theta) * sn;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Singularity detectors
// ---------------------------------------------------------------------------

/// Speed |f'(t)|: complex step when f accepts std::complex<double>, otherwise
/// a central difference.
template <typename F>
double curve_speed(const F& f, double t) {
  if constexpr (std::is_invocable_v<const F&, std::complex<double>>) {
    return norm(complex_step_velocity(f, t));
  } else {
    constexpr double step = 1e-6;
    const Point2 fp = f(t + step);
    const Point2 fm = f(t - step);
    return norm(fp - fm) / (2 * step);
  }
}

namespace detail {

inline double wrap_to_period(double t, double start) {
  double r = std::fmod(t - start, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (kTwoPi - r < 1e-9) r = 0.0;
  return start + r;
}

inline double cyclic_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

template <typename G>
double golden_section_min(const G& g, double lo, double hi, double t_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  while (hi - lo > t_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Parameters in [start, start + 2*pi) where the speed has a local minimum
/// below tol * (median speed on the grid). Each candidate bracketed by its
/// grid neighbours is refined by golden-section search to 1e-10 in t;
/// candidates closer than 1e-6 are merged.
template <typename F>
std::vector<double> find_cusps(const F& f, const ParamGrid& grid, double tol = 1e-5) {
  grid.validate();
  const std::size_t n = grid.count;
  std::vector<double> speed(n);
  for (std::size_t k = 0; k < n; ++k) speed[k] = curve_speed(f, grid.node(k));
  std::vector<double> sorted = speed;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[n / 2];

  auto speed_at = [&f](double t) { return curve_speed(f, t); };
  std::vector<double> cusps;
  for (std::size_t k = 0; k < n; ++k) {
    const double prev = speed[(k + n - 1) % n];
    const double next = speed[(k + 1) % n];
    if (!(speed[k] <= prev && speed[k] <= next)) continue;
    const double t = grid.node(k);
    const double t_min = detail::golden_section_min(speed_at, t - grid.step(), t + grid.step(), 1e-10);
    if (!(speed_at(t_min) < tol * median)) continue;
    const double wrapped = detail::wrap_to_period(t_min, grid.start);
    const bool duplicate = std::any_of(cusps.begin(), cusps.end(), [&](double c) {
      return detail::cyclic_distance(c, wrapped) < 1e-6;
    });
    if (!duplicate) cusps.push_back(wrapped);
  }
  std::sort(cusps.begin(), cusps.end());
  return cusps;
}

/// A transverse self-crossing with the parameters of both passes.
struct Crossing {
  Point2 point;
  double t_first = 0.0;
  double t_second = 0.0;
  bool refined = false;
};

namespace detail {

// Newton on f(t1) - f(t2) = 0 from the polyline estimate.
inline bool refine_crossing(const std::function<Point2(double)>& f, double& t1, double& t2,
                            double max_move, double scale) {
  const double t1_0 = t1, t2_0 = t2;
  constexpr double step = 1e-6;
  for (int iter = 0; iter < 40; ++iter) {
    const Point2 r = f(t1) - f(t2);
    const Point2 d1 = (f(t1 + step) - f(t1 - step)) / (2 * step);
    const Point2 d2 = (f(t2 + step) - f(t2 - step)) / (2 * step);
    // J = [d1, -d2]
    const double det = cross(d1, -d2);
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double dt1 = (r.x * (-d2.y) - r.y * (-d2.x)) / det;
    const double dt2 = (d1.x * r.y - d1.y * r.x) / det;
    t1 -= dt1;
    t2 -= dt2;
    if (std::abs(t1 - t1_0) > max_move || std::abs(t2 - t2_0) > max_move) return false;
    if (std::abs(dt1) + std::abs(dt2) < 1e-15) break;
  }
  return norm(f(t1) - f(t2)) <= 1e-10 * scale;
}

}  // namespace detail

/// All transverse crossings of the closed polyline with itself (adjacent
/// segments excluded). With an attached evaluator every crossing is refined by
/// Newton iteration on f(t1) = f(t2) and coincident crossings are merged.
inline std::vector<Crossing> find_crossings(const SampledCurve& c) {
  c.validate();
  const std::size_t n = c.size();
  std::vector<Crossing> out;
  if (n < 4) return out;

  struct Box {
    double x0, x1, y0, y1;
  };
  std::vector<Box> boxes(n);
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = c.points[i];
    const Point2& q = c.points[(i + 1) % n];
    boxes[i] = {std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y)};
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double scale = std::max(std::hypot(xmax - xmin, ymax - ymin), 1e-300);
  const double period = kTwoPi;
  auto seg_param = [&](std::size_t i, double frac) {
    const double t0 = c.params[i];
    const double t1 = (i + 1 < n) ? c.params[i + 1] : c.params[0] + period;
    return t0 + frac * (t1 - t0);
  };
  const double max_step = period / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = c.points[i];
    const Point2 r = c.points[(i + 1) % n] - p;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Box& a = boxes[i];
      const Box& b = boxes[j];
      if (a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0) continue;
      const Point2 q = c.points[j];
      const Point2 w = c.points[(j + 1) % n] - q;
      const double den = cross(r, w);
      if (den == 0.0) continue;
      const double s = cross(q - p, w) / den;
      const double u = cross(q - p, r) / den;
      if (s < 0.0 || s >= 1.0 || u < 0.0 || u >= 1.0) continue;
      Crossing x{p + r * s, seg_param(i, s), seg_param(j, u), false};
      if (c.evaluator) {
        double t1 = x.t_first, t2 = x.t_second;
        if (detail::refine_crossing(c.evaluator, t1, t2, 2 * max_step, scale)) {
          x.point = c.evaluator(t1);
          x.t_first = t1;
          x.t_second = t2;
          x.refined = true;
        }
      }
      out.push_back(x);
    }
  }

  if (c.evaluator) {
    std::vector<Crossing> merged;
    for (const Crossing& x : out) {
      const bool dup = std::any_of(merged.begin(), merged.end(), [&](const Crossing& y) {
        return x.refined && y.refined && distance(x.point, y.point) <= 1e-8 * scale;
      });
      if (!dup) merged.push_back(x);
    }
    out = std::move(merged);
  }
  return out;
}

inline std::vector<Point2> self_intersections(const SampledCurve& c) {
  std::vector<Point2> pts;
  for (const Crossing& x : find_crossings(c)) pts.push_back(x.point);
  return pts;
}

}  // namespace pedallab
