#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pedallab/area_centroid.hpp"
#include "pedallab/curve_kernel.hpp"
#include "pedallab/errors.hpp"
#include "pedallab/pedal_family.hpp"
#include "pedallab/vec2.hpp"

namespace pedallab {

/// Where the pedal point M is swept. Sampling is uniform in angle from `phase`.
struct LocusSpec {
  enum class Kind { ConcentricCircle, EllipseBoundary, FixedList };

  Kind kind = Kind::ConcentricCircle;
  double radius = 1.0;
  std::vector<Point2> points;
  std::size_t count = 64;
  double phase = 0.0;

  static LocusSpec concentric_circle(double r, std::size_t count, double phase = 0.0) {
    LocusSpec l{Kind::ConcentricCircle, r, {}, count, phase};
    l.validate();
    return l;
  }
  static LocusSpec ellipse_boundary(std::size_t count, double phase = 0.0) {
    LocusSpec l{Kind::EllipseBoundary, 0.0, {}, count, phase};
    l.validate();
    return l;
  }
  static LocusSpec fixed_list(std::vector<Point2> pts) {
    const std::size_t n = pts.size();
    LocusSpec l{Kind::FixedList, 0.0, std::move(pts), n, 0.0};
    l.validate();
    return l;
  }

  void validate() const {
    if (count < 4) throw InvalidArgument("locus needs at least 4 samples");
    if (kind == Kind::ConcentricCircle && !(radius > 0.0)) {
      throw InvalidArgument("concentric circle locus needs r > 0");
    }
    if (kind == Kind::FixedList && points.size() != count) {
      throw InvalidArgument("fixed locus count must equal the number of points");
    }
  }

  std::string name() const {
    switch (kind) {
      case Kind::ConcentricCircle: return "circle";
      case Kind::EllipseBoundary: return "ellipse";
      case Kind::FixedList: return "list";
    }
    return "unknown";
  }
};

struct LocusPoint {
  Point2 m;
  /// Ellipse parameter when M lies on the boundary.
  std::optional<double> s;
};

inline std::vector<LocusPoint> locus_points(const Ellipse& e, const LocusSpec& locus) {
  locus.validate();
  std::vector<LocusPoint> out;
  out.reserve(locus.count);
  for (std::size_t k = 0; k < locus.count; ++k) {
    const double angle = locus.phase + kTwoPi * static_cast<double>(k) / static_cast<double>(locus.count);
    switch (locus.kind) {
      case LocusSpec::Kind::ConcentricCircle:
        out.push_back({{locus.radius * std::cos(angle), locus.radius * std::sin(angle)}, std::nullopt});
        break;
      case LocusSpec::Kind::EllipseBoundary:
        out.push_back({ellipse_point(e, angle), angle});
        break;
      case LocusSpec::Kind::FixedList: {
        const Point2 m = locus.points[k];
        out.push_back({m, e.on_boundary(m) ? std::optional<double>(e.parameter_of(m)) : std::nullopt});
        break;
      }
    }
  }
  return out;
}

/// Point evaluator t -> curve point for a family member with pedal point M.
inline std::function<Point2(double)> family_curve(const AreaFamily& fam, const Ellipse& e,
                                                  const Point2& m) {
  using Tag = AreaFamily::Tag;
  switch (fam.tag) {
    case Tag::Ellipse:
      return [e](double t) { return ellipse_point(e, t); };
    case Tag::Pedal:
      return [e, m](double t) { return foot_point(FootKind::pedal(), e, m, t); };
    case Tag::Contrapedal:
      return [e, m](double t) { return foot_point(FootKind::contrapedal(), e, m, t); };
    case Tag::Rotated: {
      const FootKind k = FootKind::rotated(fam.param);
      return [e, m, k](double t) { return foot_point(k, e, m, t); };
    }
    case Tag::Interpolated: {
      const FootKind k = FootKind::interpolated(fam.param);
      return [e, m, k](double t) { return foot_point(k, e, m, t); };
    }
    case Tag::Evolutoid: {
      const double theta = fam.param;
      return [e, theta](double t) { return evolutoid_point(e, theta, t); };
    }
    case Tag::Hybrid:
      detail::require_hybrid_domain(e, m);
      return [e, m](double t) { return hybrid_point(e, m, t); };
    case Tag::PseudoTalbot: {
      if (!e.on_boundary(m)) throw DomainError("pseudo-Talbot curve needs M on the ellipse");
      const double s = e.parameter_of(m);
      return [e, s](double t) { return pseudo_talbot_point(e, s, t); };
    }
    case Tag::NegativePedal:
      return [e, m](double t) { return negative_pedal_point(e, m, t); };
  }
  throw DomainError("unknown family");
}

/// Families whose evaluator is singular at t = s when M = P(s).
inline bool singular_at_boundary_parameter(const AreaFamily& fam) {
  return fam.tag == AreaFamily::Tag::Hybrid || fam.tag == AreaFamily::Tag::NegativePedal;
}

struct ScanSample {
  Point2 m;
  double area_quadrature = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> area_closed_form;
  double refinement_delta = std::numeric_limits<double>::quiet_NaN();
  /// "ok", or the failure message for this sample.
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct InvarianceReport {
  AreaFamily family;
  LocusSpec locus;
  std::size_t grid_count = 0;
  std::vector<ScanSample> samples;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double max_abs_dev = std::numeric_limits<double>::quiet_NaN();
  double max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  /// Mean closed-form value, when the family has one at these M.
  std::optional<double> reference;
  /// max |quadrature - closed form| / |closed form| over samples with both.
  std::optional<double> max_closed_form_rel_err;
  std::size_t failed = 0;
};

/// Recomputes the aggregate fields from the samples.
inline void summarize(InvarianceReport& r) {
  r.failed = 0;
  r.mean = r.max_abs_dev = r.max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  r.reference.reset();
  r.max_closed_form_rel_err.reset();
  double sum = 0.0;
  double ref_sum = 0.0;
  std::size_t n_ok = 0, n_ref = 0;
  for (const ScanSample& s : r.samples) {
    if (!s.ok()) {
      ++r.failed;
      continue;
    }
    sum += s.area_quadrature;
    ++n_ok;
    if (s.area_closed_form) {
      ref_sum += *s.area_closed_form;
      ++n_ref;
    }
  }
  if (n_ok > 0) {
    r.mean = sum / static_cast<double>(n_ok);
    double max_abs = 0.0;
    for (const ScanSample& s : r.samples) {
      if (s.ok()) max_abs = std::max(max_abs, std::abs(s.area_quadrature - r.mean));
    }
    r.max_abs_dev = max_abs;
    r.max_rel_dev = max_abs / std::abs(r.mean);
  }
  if (n_ref > 0) {
    r.reference = ref_sum / static_cast<double>(n_ref);
    double worst = 0.0;
    for (const ScanSample& s : r.samples) {
      if (s.ok() && s.area_closed_form) {
        worst = std::max(worst, std::abs(s.area_quadrature - *s.area_closed_form) /
                                    std::abs(*s.area_closed_form));
      }
    }
    r.max_closed_form_rel_err = worst;
  }
}

/// Sweeps M over the locus: quadrature area (N -> 2N checked) and closed form
/// per sample, aggregated in locus order. A failing sample is recorded and
/// skipped in the statistics.
inline InvarianceReport scan(const Ellipse& e, const AreaFamily& fam, const LocusSpec& locus,
                             const ParamGrid& grid = ParamGrid{}) {
  grid.validate();
  if (fam.requires_boundary_point() && locus.kind == LocusSpec::Kind::ConcentricCircle) {
    throw DomainError(fam.name() + " scans need M on the ellipse");
  }
  InvarianceReport report;
  report.family = fam;
  report.locus = locus;
  report.grid_count = grid.count;

  for (const LocusPoint& lp : locus_points(e, locus)) {
    ScanSample sample;
    sample.m = lp.m;
    try {
      ParamGrid g = grid;
      if (lp.s && singular_at_boundary_parameter(fam)) g = ParamGrid(*lp.s, grid.count, 0.5);
      const QuadratureResult q = converged_area(family_curve(fam, e, lp.m), g);
      sample.area_quadrature = q.value;
      sample.refinement_delta = q.delta();
      if (!q.converged) sample.status = "quadrature did not converge under N -> 2N refinement";
      if (fam.tag != AreaFamily::Tag::NegativePedal) {
        try {
          sample.area_closed_form = closed_form_area(fam, e, lp.m);
        } catch (const DomainError&) {
          // no closed form at this M
        }
      }
    } catch (const Error& err) {
      sample.status = err.what();
    }
    report.samples.push_back(sample);
  }

  summarize(report);
  return report;
}

struct IdentityReport {
  std::string identity_name;
  std::vector<double> residuals;
  double max_residual = 0.0;

  void add(double r) {
    residuals.push_back(std::abs(r));
    max_residual = std::max(max_residual, std::abs(r));
  }
};

namespace detail {
template <typename F>
double quadrature_area(F&& f, std::size_t n) {
  return signed_area_quadrature(sample_curve(std::forward<F>(f), ParamGrid(0.0, n)));
}
}  // namespace detail

/// Residuals |lhs - rhs| of the area identities for the ellipse, each via
/// closed forms and independently via quadrature on n nodes.
///
///   A_p - A_c = A
///   A_p - A_theta = A sin^2 theta           (per theta x M)
///   A_mu = (1 - 2mu)[(1 - mu)A_p - mu A_c] + mu(1 - mu)A   (per mu x M)
inline std::vector<IdentityReport> identity_suite(const Ellipse& e, const std::vector<Point2>& ms,
                                                  const std::vector<double>& thetas,
                                                  const std::vector<double>& mus,
                                                  std::size_t n = 2048) {
  IdentityReport diff_cf{"pedal_minus_contrapedal.closed_form", {}, 0.0};
  IdentityReport diff_q{"pedal_minus_contrapedal.quadrature", {}, 0.0};
  IdentityReport rot_cf{"pedal_minus_rotated.closed_form", {}, 0.0};
  IdentityReport rot_q{"pedal_minus_rotated.quadrature", {}, 0.0};
  IdentityReport mu_cf{"interpolated.closed_form", {}, 0.0};
  IdentityReport mu_q{"interpolated.quadrature", {}, 0.0};

  const double area_q = detail::quadrature_area(family_curve(AreaFamily::ellipse(), e, {}), n);
  for (const Point2& m : ms) {
    const double ap = pedal_area(e, m), ac = contrapedal_area(e, m);
    const double ap_q = detail::quadrature_area(family_curve(AreaFamily::pedal(), e, m), n);
    const double ac_q = detail::quadrature_area(family_curve(AreaFamily::contrapedal(), e, m), n);
    diff_cf.add(ap - ac - e.area());
    diff_q.add(ap_q - ac_q - area_q);
    for (double theta : thetas) {
      const double s2 = std::sin(theta) * std::sin(theta);
      rot_cf.add(ap - rotated_pedal_area(e, m, theta) - e.area() * s2);
      const double at_q = detail::quadrature_area(family_curve(AreaFamily::rotated(theta), e, m), n);
      rot_q.add(ap_q - at_q - area_q * s2);
    }
    for (double mu : mus) {
      const double amu_q =
          detail::quadrature_area(family_curve(AreaFamily::interpolated(mu), e, m), n);
      mu_cf.add(closed_form_area(AreaFamily::interpolated(mu), e, m) - amu_q);
      mu_q.add(interpolated_area_identity(mu, ap_q, ac_q, area_q) - amu_q);
    }
  }
  return {diff_cf, diff_q, rot_cf, rot_q, mu_cf, mu_q};
}

/// Same identities for an arbitrary convex support curve. The closed-form
/// route uses the first-harmonic integrals of h; the quadrature route samples
/// the curves. The rotated identity compares against the pedal of the
/// theta-evolutoid.
inline std::vector<IdentityReport> identity_suite(const SupportCurve& curve,
                                                  const std::vector<Point2>& ms,
                                                  const std::vector<double>& thetas,
                                                  const std::vector<double>& mus,
                                                  std::size_t n = 2048) {
  IdentityReport diff_cf{"pedal_minus_contrapedal.closed_form", {}, 0.0};
  IdentityReport diff_q{"pedal_minus_contrapedal.quadrature", {}, 0.0};
  IdentityReport rot_cf{"pedal_minus_rotated.closed_form", {}, 0.0};
  IdentityReport rot_q{"pedal_minus_rotated.quadrature", {}, 0.0};
  IdentityReport mu_q{"interpolated.quadrature", {}, 0.0};

  const double area_cf = support_areas(curve).area;
  const double area_q = detail::quadrature_area([&](double t) { return support_point(curve, t); }, n);
  auto foot_area = [&](const FootKind& k, const SupportCurve& s, const Point2& m) {
    return detail::quadrature_area([&](double t) { return support_foot(k, s, m, t); }, n);
  };
  for (const Point2& m : ms) {
    const double ap = support_pedal_area(curve, m);
    const double ac = support_contrapedal_area(curve, m);
    const double ap_q = foot_area(FootKind::pedal(), curve, m);
    const double ac_q = foot_area(FootKind::contrapedal(), curve, m);
    diff_cf.add(ap - ac - area_cf);
    diff_q.add(ap_q - ac_q - area_q);
    for (double theta : thetas) {
      const double s2 = std::sin(theta) * std::sin(theta);
      const SupportCurve rotated = evolutoid_support(curve, theta);
      rot_cf.add(ap - support_pedal_area(rotated, m) - area_cf * s2);
      rot_q.add(ap_q - foot_area(FootKind::pedal(), rotated, m) - area_q * s2);
    }
    for (double mu : mus) {
      const double amu_q = foot_area(FootKind::interpolated(mu), curve, m);
      mu_q.add(interpolated_area_identity(mu, ap_q, ac_q, area_q) - amu_q);
    }
  }
  return {diff_cf, diff_q, rot_cf, rot_q, mu_q};
}

/// Outcome of checking that the contrapedal's two self-crossings away from M
/// sit at (x_m, 0) and (0, y_m).
struct ConjectureReport {
  enum class Status { Checked, DegenerateM };

  Status status = Status::Checked;
  Point2 m;
  std::vector<Point2> crossings;
  double distance_to_x_axis_point = std::numeric_limits<double>::infinity();
  double distance_to_y_axis_point = std::numeric_limits<double>::infinity();

  bool holds(double tol = 1e-4) const {
    return status == Status::Checked && distance_to_x_axis_point < tol &&
           distance_to_y_axis_point < tol;
  }
};

inline ConjectureReport conjecture_check_contrapedal(const Ellipse& e, const Point2& m,
                                                     const ParamGrid& grid = ParamGrid(0.0, 4096, 0.5)) {
  ConjectureReport r;
  r.m = m;
  const double tiny = 1e-12 * e.a();
  if (std::abs(m.x) <= tiny || std::abs(m.y) <= tiny) {
    r.status = ConjectureReport::Status::DegenerateM;
    return r;
  }
  const SampledCurve c = sample_curve(family_curve(AreaFamily::contrapedal(), e, m), grid);
  r.crossings = self_intersections(c);
  const Point2 on_x{m.x, 0.0}, on_y{0.0, m.y};
  for (const Point2& p : r.crossings) {
    r.distance_to_x_axis_point = std::min(r.distance_to_x_axis_point, distance(p, on_x));
    r.distance_to_y_axis_point = std::min(r.distance_to_y_axis_point, distance(p, on_y));
  }
  return r;
}

}  // namespace pedallab
