#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pedallab/curve_kernel.hpp"
#include "pedallab/detail/fft.hpp"
#include "pedallab/errors.hpp"
#include "pedallab/vec2.hpp"

namespace pedallab {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline void require_uniform_period(const SampledCurve& c) {
  c.validate();
  const std::size_t n = c.size();
  if (n < 8) throw InvalidArgument("quadrature needs at least 8 samples");
  const double step = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs((c.params[k] - c.params[k - 1]) - step) > 1e-9 * step) {
      throw InvalidArgument("quadrature needs a uniform grid spanning one 2*pi period");
    }
  }
}

struct Derivatives {
  std::vector<double> x, y, dx, dy;
};

inline Derivatives spectral_derivatives(const SampledCurve& c) {
  Derivatives d;
  d.x.reserve(c.size());
  d.y.reserve(c.size());
  for (const Point2& p : c.points) {
    d.x.push_back(p.x);
    d.y.push_back(p.y);
  }
  d.dx = spectral_derivative(d.x);
  d.dy = spectral_derivative(d.y);
  return d;
}

}  // namespace detail

/// Signed area (1/2) * integral of (x dy - y dx) over the closed sampled curve.
///
/// Derivatives are taken spectrally (trigonometric interpolation) so the
/// periodic trapezoid sum converges geometrically for analytic curves; the
/// shoelace of the polyline would only be second order.
inline double signed_area_quadrature(const SampledCurve& c) {
  detail::require_uniform_period(c);
  const auto d = detail::spectral_derivatives(c);
  const std::size_t n = c.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += d.x[k] * d.dy[k] - d.y[k] * d.dx[k];
  return 0.5 * sum * (kTwoPi / static_cast<double>(n));
}

/// Value at the requested grid plus its N -> 2N refinement difference.
struct QuadratureResult {
  double value = 0.0;
  double refined_value = 0.0;
  bool converged = false;

  double delta() const { return std::abs(refined_value - value); }
};

/// Samples f on `grid` and on `grid.refined()`; converged when the two areas
/// agree to rel_tol * max(|area|, abs_floor).
template <typename F>
QuadratureResult converged_area(F&& f, const ParamGrid& grid, double rel_tol = 1e-9,
                                double abs_floor = 1e-12) {
  QuadratureResult r;
  r.value = signed_area_quadrature(sample_curve(f, grid));
  r.refined_value = signed_area_quadrature(sample_curve(f, grid.refined()));
  r.converged = r.delta() <= rel_tol * std::max(std::abs(r.refined_value), abs_floor);
  return r;
}

/// Polyline length of the closed sampled curve.
inline double perimeter_quadrature(const SampledCurve& c) {
  c.validate();
  const std::size_t n = c.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += distance(c.points[k], c.points[(k + 1) % n]);
  return sum;
}

/// Richardson extrapolation (4 L_N - L_{N/2}) / 3 of the polyline length,
/// with L_{N/2} taken over every other sample. Needs an even sample count.
inline double perimeter_extrapolated(const SampledCurve& c) {
  c.validate();
  const std::size_t n = c.size();
  if (n < 16 || n % 2 != 0) {
    throw InvalidArgument("perimeter extrapolation needs an even sample count >= 16");
  }
  const double fine = perimeter_quadrature(c);
  double coarse = 0.0;
  for (std::size_t k = 0; k < n; k += 2) coarse += distance(c.points[k], c.points[(k + 2) % n]);
  return (4.0 * fine - coarse) / 3.0;
}

/// Per-sample curvature and arc-length weights from spectral derivatives.
struct CurvatureSamples {
  std::vector<Point2> points;
  std::vector<double> curvatures;
  std::vector<double> arc_steps;
};

inline CurvatureSamples curvature_samples(const SampledCurve& c) {
  detail::require_uniform_period(c);
  const auto d = detail::spectral_derivatives(c);
  const std::vector<double> ddx = detail::spectral_derivative(d.dx);
  const std::vector<double> ddy = detail::spectral_derivative(d.dy);
  const double h = kTwoPi / static_cast<double>(c.size());
  CurvatureSamples out;
  out.points = c.points;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double speed = std::hypot(d.dx[k], d.dy[k]);
    out.curvatures.push_back((d.dx[k] * ddy[k] - d.dy[k] * ddx[k]) / (speed * speed * speed));
    out.arc_steps.push_back(speed * h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polygons
// ---------------------------------------------------------------------------

struct Polygon {
  std::vector<Point2> vertices;

  Polygon() = default;
  explicit Polygon(std::vector<Point2> v) : vertices(std::move(v)) {
    if (vertices.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  }
  std::size_t size() const noexcept { return vertices.size(); }
  const Point2& operator[](std::size_t i) const { return vertices[i % vertices.size()]; }
};

/// Shoelace; positive for counterclockwise vertex order.
inline double polygon_signed_area(const Polygon& p) {
  const std::size_t n = p.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cross(p[i], p[i + 1]);
  return 0.5 * sum;
}

/// Internal angles; reflex vertices come out above pi. Orientation is taken
/// from the sign of the shoelace area so clockwise input works too.
inline std::vector<double> internal_angles(const Polygon& p) {
  const std::size_t n = p.size();
  const double orientation = polygon_signed_area(p) >= 0.0 ? 1.0 : -1.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 in = p[i] - p[i + n - 1];
    const Point2 outgoing = p[i + 1] - p[i];
    const double turn = std::atan2(cross(in, outgoing), dot(in, outgoing));
    out[i] = kPi - orientation * turn;
  }
  return out;
}

/// K = sum sin(2 theta_i) P_i / sum sin(2 theta_i).
inline Point2 curvature_centroid_polygon(const Polygon& p) {
  const auto angles = internal_angles(p);
  double weight = 0.0;
  Point2 acc{};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = std::sin(2.0 * angles[i]);
    weight += w;
    acc += p[i] * w;
  }
  if (!(std::abs(weight) > 1e-12 * static_cast<double>(p.size()))) {
    throw ZeroTotalWeight("sum of sin(2 theta_i) vanishes; curvature centroid undefined");
  }
  return acc / weight;
}

/// Feet of the perpendiculars from M onto each side line, in side order.
inline Polygon pedal_polygon(const Polygon& p, const Point2& m) {
  std::vector<Point2> feet;
  feet.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2 side = p[i + 1] - p[i];
    if (norm(side) == 0.0) throw InvalidArgument("pedal polygon: zero-length side");
    feet.push_back(project_onto_line(m, p[i], side));
  }
  return Polygon(std::move(feet));
}

inline Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c) {
  const Point2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double scale = std::max({dot(ab, ab), dot(ac, ac), 1e-300});
  if (std::abs(d) <= 1e-14 * scale) throw CollinearVertices("triangle vertices are collinear");
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  return a + Point2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

inline Point2 circumcenter(const Polygon& p) {
  if (p.size() != 3) throw InvalidArgument("circumcenter needs exactly 3 vertices");
  return circumcenter(p[0], p[1], p[2]);
}

// ---------------------------------------------------------------------------
// Support-function integrals
// ---------------------------------------------------------------------------

struct SupportAreas {
  double area = 0.0;          ///< (1/2) integral (h^2 - h'^2)
  double evolute_area = 0.0;  ///< (1/2) integral (h'^2 - h''^2)
};

namespace detail {

inline SupportAreas support_areas_at(const SupportCurve& s, std::size_t n) {
  double a = 0.0, ev = 0.0;
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k);
    const double v = s.h(t), d1 = s.dh(t), d2 = s.d2h(t);
    a += v * v - d1 * d1;
    ev += d1 * d1 - d2 * d2;
  }
  return {0.5 * a * h, 0.5 * ev * h};
}

// (integral h cos t, integral h sin t)
inline Point2 first_harmonics(const SupportCurve& s, std::size_t n = 2048) {
  Point2 acc{};
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k);
    acc += Point2{std::cos(t), std::sin(t)} * s.h(t);
  }
  return acc * h;
}

inline double integral_of_square(const SupportCurve::Fn& f, std::size_t n = 2048) {
  double acc = 0.0;
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = f(h * static_cast<double>(k));
    acc += v * v;
  }
  return acc * h;
}

}  // namespace detail

/// Area of the support curve and of its evolute by periodic trapezoid on n
/// nodes, cross-checked against 2n nodes.
inline SupportAreas support_areas(const SupportCurve& s, std::size_t n = 2048) {
  const SupportAreas coarse = detail::support_areas_at(s, n);
  const SupportAreas fine = detail::support_areas_at(s, 2 * n);
  const double scale = std::max({std::abs(fine.area), std::abs(fine.evolute_area), 1e-300});
  if (std::abs(coarse.area - fine.area) > 1e-9 * scale ||
      std::abs(coarse.evolute_area - fine.evolute_area) > 1e-9 * scale) {
    throw ConvergenceError("support-function area integrals did not converge");
  }
  return coarse;
}

/// Length as the integral of |h + h''| (periodic trapezoid).
inline double support_perimeter(const SupportCurve& s, std::size_t n = 4096) {
  double acc = 0.0;
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) acc += std::abs(s.radius_of_curvature(h * static_cast<double>(k)));
  return acc * h;
}

/// Largest theta for which the theta-evolutoid has no cusps, so that its
/// length is exactly L cos theta: tan theta < 1 / max |rho'/rho| with
/// rho = h + h''. Returns pi/2 when rho is constant.
inline double evolutoid_perimeter_bound(const SupportCurve& s, std::size_t n = 4096) {
  double worst = 0.0;
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k);
    const double rho = s.radius_of_curvature(t);
    if (!(rho > 0.0)) throw DomainError("perimeter bound needs a strictly convex curve");
    worst = std::max(worst, std::abs((s.dh(t) + s.third_derivative(t)) / rho));
  }
  return worst == 0.0 ? kPi / 2 : std::atan(1.0 / worst);
}

/// K = ((1/pi) integral h cos t, (1/pi) integral h sin t).
inline Point2 curvature_centroid_support(const SupportCurve& s) {
  return detail::first_harmonics(s) / kPi;
}

/// A(P_M) = (pi/2)|M|^2 - M . (integral h cos, integral h sin) + (1/2) integral h^2.
inline double support_pedal_area(const SupportCurve& s, const Point2& m) {
  const Point2 harm = detail::first_harmonics(s);
  return 0.5 * kPi * dot(m, m) - dot(m, harm) + 0.5 * detail::integral_of_square(s.h);
}

/// Same as support_pedal_area with h'^2 in place of h^2.
inline double support_contrapedal_area(const SupportCurve& s, const Point2& m) {
  const Point2 harm = detail::first_harmonics(s);
  return 0.5 * kPi * dot(m, m) - dot(m, harm) + 0.5 * detail::integral_of_square(s.dh);
}

/// K = sum kappa P ds / sum kappa ds.
inline Point2 curvature_centroid_samples(const std::vector<Point2>& points,
                                         const std::vector<double>& curvatures,
                                         const std::vector<double>& arc_steps) {
  if (points.size() != curvatures.size() || points.size() != arc_steps.size()) {
    throw InvalidArgument("curvature centroid: sample lists differ in length");
  }
  double total = 0.0;
  Point2 acc{};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double w = curvatures[k] * arc_steps[k];
    total += w;
    acc += points[k] * w;
  }
  if (!(std::abs(total) > 1e-9)) {
    throw ZeroRotationIndex("total curvature vanishes; curvature centroid undefined");
  }
  return acc / total;
}

inline Point2 curvature_centroid_samples(const CurvatureSamples& s) {
  return curvature_centroid_samples(s.points, s.curvatures, s.arc_steps);
}

// ---------------------------------------------------------------------------
// Closed-form areas for the ellipse families
// ---------------------------------------------------------------------------

struct AreaFamily {
  enum class Tag {
    Ellipse,
    Pedal,
    Contrapedal,
    Rotated,
    Interpolated,
    Evolutoid,
    Hybrid,
    PseudoTalbot,
    NegativePedal,
  };

  Tag tag = Tag::Pedal;
  double param = 0.0;

  static AreaFamily ellipse() { return {Tag::Ellipse, 0.0}; }
  static AreaFamily pedal() { return {Tag::Pedal, 0.0}; }
  static AreaFamily contrapedal() { return {Tag::Contrapedal, 0.0}; }
  static AreaFamily rotated(double theta) { return {Tag::Rotated, theta}; }
  static AreaFamily interpolated(double mu) { return {Tag::Interpolated, mu}; }
  static AreaFamily evolutoid(double theta) { return {Tag::Evolutoid, theta}; }
  static AreaFamily hybrid() { return {Tag::Hybrid, 0.0}; }
  static AreaFamily pseudo_talbot() { return {Tag::PseudoTalbot, 0.0}; }
  static AreaFamily negative_pedal() { return {Tag::NegativePedal, 0.0}; }

  bool requires_boundary_point() const { return tag == Tag::PseudoTalbot; }
  bool has_parameter() const {
    return tag == Tag::Rotated || tag == Tag::Interpolated || tag == Tag::Evolutoid;
  }

  std::string name() const {
    switch (tag) {
      case Tag::Ellipse: return "ellipse";
      case Tag::Pedal: return "pedal";
      case Tag::Contrapedal: return "contrapedal";
      case Tag::Rotated: return "rotated";
      case Tag::Interpolated: return "interpolated";
      case Tag::Evolutoid: return "evolutoid";
      case Tag::Hybrid: return "hybrid";
      case Tag::PseudoTalbot: return "pseudo_talbot";
      case Tag::NegativePedal: return "negative_pedal";
    }
    return "unknown";
  }

  static std::optional<Tag> parse_tag(const std::string& s) {
    for (Tag t : {Tag::Ellipse, Tag::Pedal, Tag::Contrapedal, Tag::Rotated, Tag::Interpolated,
                  Tag::Evolutoid, Tag::Hybrid, Tag::PseudoTalbot, Tag::NegativePedal}) {
      if (AreaFamily{t, 0.0}.name() == s) return t;
    }
    return std::nullopt;
  }
};

inline double pedal_area(const Ellipse& e, const Point2& m) {
  const double a = e.a(), b = e.b();
  return 0.5 * kPi * (a * a + b * b + dot(m, m));
}

inline double contrapedal_area(const Ellipse& e, const Point2& m) {
  const double a = e.a(), b = e.b();
  return 0.5 * kPi * (a * a + b * b - 2 * a * b + dot(m, m));
}

inline double rotated_pedal_area(const Ellipse& e, const Point2& m, double theta) {
  const double a = e.a(), b = e.b(), s = std::sin(theta);
  return 0.5 * kPi * (a * a + b * b - 2 * a * b * s * s + dot(m, m));
}

/// A_mu = (1 - 2 mu) [(1 - mu) A_p - mu A_c] + mu (1 - mu) A.
/// Reduces to A_p at mu = 0, A_c at mu = 1 and A / 4 at mu = 1/2.
inline double interpolated_area_identity(double mu, double pedal, double contrapedal,
                                         double base) {
  return (1.0 - 2.0 * mu) * ((1.0 - mu) * pedal - mu * contrapedal) + mu * (1.0 - mu) * base;
}

/// The identity with the leading factor written as (2 mu - 1). Gives -A_p at
/// mu = 0 and disagrees with quadrature except at mu = 1/2; reported only.
inline double interpolated_area_opposite_sign_form(double mu, double pedal, double contrapedal,
                                                   double base) {
  return (2.0 * mu - 1.0) * ((1.0 - mu) * pedal - mu * contrapedal) + mu * (1.0 - mu) * base;
}

/// S(C) cos^2 theta + S(evolute) sin^2 theta with both terms from support_areas.
inline double evolutoid_area(const Ellipse& e, double theta) {
  const SupportAreas s = support_areas(ellipse_support(e));
  const double c = std::cos(theta), sn = std::sin(theta);
  return s.area * c * c + s.evolute_area * sn * sn;
}

/// pi a b cos^2 theta - (3 c^2 / (8 a b)) sin^2 theta. Lacks the pi and one
/// factor c^2 in the second term, so it does not match quadrature for
/// theta != 0; kept for comparison reports.
inline double evolutoid_area_reduced_form(const Ellipse& e, double theta) {
  const double a = e.a(), b = e.b(), c = std::cos(theta), s = std::sin(theta);
  return kPi * a * b * c * c - 3.0 * e.c2() / (8.0 * a * b) * s * s;
}

/// Exact evolute area -3 pi c^4 / (8ab), negative for the increasing-t traversal.
inline double ellipse_evolute_area(const Ellipse& e) {
  return -3.0 * kPi * e.c2() * e.c2() / (8.0 * e.a() * e.b());
}

/// pi (3a^4 + 2a^2b^2 + 3b^4) / (2ab) = pi (3 delta^2 + 5 a^2 b^2) / (2ab).
inline double hybrid_area(const Ellipse& e) {
  const double a2 = e.a() * e.a(), b2 = e.b() * e.b();
  return kPi * (3 * a2 * a2 + 2 * a2 * b2 + 3 * b2 * b2) / (2 * e.a() * e.b());
}

/// pi (3a^4 + 2a^2b^2 + 3b^4)(a^2 - 2ab - b^2)(a^2 + 2ab - b^2) / (8 a^3 b^3).
inline double pseudo_talbot_area(const Ellipse& e) {
  const double a = e.a(), b = e.b(), a2 = a * a, b2 = b * b;
  return kPi * (3 * a2 * a2 + 2 * a2 * b2 + 3 * b2 * b2) * (a2 - 2 * a * b - b2) *
         (a2 + 2 * a * b - b2) / (8 * a2 * a * b2 * b);
}

/// Closed-form area of a family member. Hybrid and PseudoTalbot need M on the
/// ellipse (1e-9 on the implicit equation); Ellipse and Evolutoid ignore M.
inline double closed_form_area(const AreaFamily& fam, const Ellipse& e, const Point2& m) {
  auto need_boundary = [&] {
    if (!e.on_boundary(m)) {
      std::ostringstream msg;
      msg << fam.name() << " closed form holds only for M on the ellipse";
      throw DomainError(msg.str());
    }
  };
  switch (fam.tag) {
    case AreaFamily::Tag::Ellipse:
      return e.area();
    case AreaFamily::Tag::Pedal:
      return pedal_area(e, m);
    case AreaFamily::Tag::Contrapedal:
      return contrapedal_area(e, m);
    case AreaFamily::Tag::Rotated:
      return rotated_pedal_area(e, m, fam.param);
    case AreaFamily::Tag::Interpolated:
      return interpolated_area_identity(fam.param, pedal_area(e, m), contrapedal_area(e, m),
                                        e.area());
    case AreaFamily::Tag::Evolutoid:
      return evolutoid_area(e, fam.param);
    case AreaFamily::Tag::Hybrid:
      need_boundary();
      return hybrid_area(e);
    case AreaFamily::Tag::PseudoTalbot:
      need_boundary();
      return pseudo_talbot_area(e);
    case AreaFamily::Tag::NegativePedal:
      throw DomainError("negative pedal area has no closed form");
  }
  throw DomainError("unknown family");
}

}  // namespace pedallab
