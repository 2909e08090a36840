#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pedallab/pedal_family.hpp"

using namespace pedallab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = oracle::pi;

void check_close(const Point2& p, const Point2& q, double tol) {
  INFO("p = (" << p.x << ", " << p.y << "), q = (" << q.x << ", " << q.y << ")");
  CHECK(distance(p, q) <= tol);
}

double min_distance(const Point2& p, const std::vector<Point2>& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& q : cloud) best = std::min(best, distance(p, q));
  return best;
}

}  // namespace

TEST_CASE("pedal and contrapedal feet match orthogonal projection") {
  const double a = GENERATE(2.0, 3.0, 1.0);
  const double b = a == 1.0 ? 1.0 : 1.0;
  const Ellipse e(a, b);
  const double mx = GENERATE(take(4, random(-3.0, 3.0)));
  const double my = GENERATE(take(3, random(-3.0, 3.0)));
  const double t = GENERATE(take(4, random(0.0, 6.28)));
  const Point2 m{mx, my};
  const Point2 p = oracle::ellipse(a, b, t);
  const Point2 d = oracle::ellipse_tangent(a, b, t);

  check_close(foot_point(FootKind::pedal(), e, m, t), oracle::project(m, p, d), 1e-12);
  check_close(foot_point(FootKind::contrapedal(), e, m, t), oracle::project(m, p, {-d.y, d.x}), 1e-12);
  check_close(foot_point(FootKind::rotated(0.0), e, m, t), oracle::project(m, p, d), 1e-12);
  check_close(foot_point(FootKind::rotated(pi / 2), e, m, t), oracle::project(m, p, {-d.y, d.x}), 1e-12);

  const double th = 0.7;
  const Point2 dr{d.x * std::cos(th) - d.y * std::sin(th), d.x * std::sin(th) + d.y * std::cos(th)};
  check_close(foot_point(FootKind::rotated(th), e, m, t), oracle::project(m, p, dr), 1e-12);

  const double mu = 0.3;
  const Point2 qp = oracle::project(m, p, d), qc = oracle::project(m, p, {-d.y, d.x});
  check_close(foot_point(FootKind::interpolated(mu), e, m, t),
              {(1 - mu) * qp.x + mu * qc.x, (1 - mu) * qp.y + mu * qc.y}, 1e-12);
  check_close(foot_point(FootKind::interpolated(0.0), e, m, t), qp, 1e-12);
  check_close(foot_point(FootKind::interpolated(1.0), e, m, t), qc, 1e-12);
}

TEST_CASE("foot kinds reject non-finite parameters") {
  CHECK_THROWS_AS(FootKind::rotated(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(FootKind::interpolated(INFINITY), InvalidArgument);
}

TEST_CASE("feet on a support curve match projection onto its tangent and normal") {
  const SupportCurve s = GENERATE(cosine_support(10, 1, 3), ellipse_support(Ellipse(2, 1)));
  const double t = GENERATE(take(6, random(0.0, 6.28)));
  const Point2 m{0.7, -1.3};
  const Point2 p = support_point(s, t);
  const Point2 tangent{-std::sin(t), std::cos(t)};
  const Point2 normal{std::cos(t), std::sin(t)};
  check_close(support_foot(FootKind::pedal(), s, m, t), oracle::project(m, p, tangent), 1e-12);
  check_close(support_foot(FootKind::contrapedal(), s, m, t), oracle::project(m, p, normal), 1e-12);
  check_close(support_foot(FootKind::rotated(pi / 2), s, m, t), oracle::project(m, p, normal), 1e-12);
  const Point2 q = support_foot(FootKind::interpolated(0.5), s, m, t);
  const Point2 mid = (oracle::project(m, p, tangent) + oracle::project(m, p, normal)) * 0.5;
  check_close(q, mid, 1e-12);
}

TEST_CASE("foot of a point already on the line is the point itself") {
  const Ellipse e(2, 1);
  const double t = 0.9;
  const Point2 on_tangent = ellipse_point(e, t) + ellipse_velocity(e, t) * 0.37;
  check_close(foot_point(FootKind::pedal(), e, on_tangent, t), on_tangent, 1e-13);
}

TEST_CASE("envelope of the tangent lines of a circle is the circle") {
  LineFamily f;
  f.eval = [](double t) { return Line{{std::cos(t), std::sin(t)}, 2.0}; };
  f.deriv = [](double t) { return Line{{-std::sin(t), std::cos(t)}, 0.0}; };
  for (double t : {0.0, 0.4, 2.0, 5.1}) check_close(envelope_point(f, t), {2 * std::cos(t), 2 * std::sin(t)}, 1e-14);
}

TEST_CASE("envelope solver flags degenerate and singular families") {
  LineFamily zero;
  zero.eval = [](double) { return Line{{0, 0}, 1.0}; };
  zero.deriv = [](double) { return Line{{1, 0}, 0.0}; };
  CHECK_THROWS_AS(envelope_point(zero, 0.3), DegenerateLine);

  LineFamily parallel;
  parallel.eval = [](double t) { return Line{{1, 0}, t}; };
  parallel.deriv = [](double) { return Line{{0, 0}, 1.0}; };
  try {
    envelope_point(parallel, 0.25);
    FAIL("expected SingularFamily");
  } catch (const SingularFamily& err) {
    CHECK(err.parameter() == 0.25);
  }
}

TEST_CASE("negative pedal point lies on its line and is tangent to it") {
  const Ellipse e(2, 1);
  const Point2 m = GENERATE(Point2{0.3, 0.2}, Point2{-0.5, 0.4}, Point2{1.0, -0.2});
  const double t = GENERATE(take(5, random(0.0, 6.28)));
  const Point2 p = ellipse_point(e, t);
  const Point2 x = negative_pedal_point(e, m, t);
  const Point2 n = p - m;
  CHECK_THAT(dot(x - p, n), WithinAbs(0.0, 1e-10 * std::max(1.0, norm(x))));
  // the pedal of the envelope with respect to M recovers P
  check_close(oracle::project(m, x, perp(n)), p, 1e-10 * std::max(1.0, norm(x)));
  // tangency: the envelope moves along its line
  const double h = 1e-6;
  const Point2 v = negative_pedal_point(e, m, t + h) - negative_pedal_point(e, m, t - h);
  CHECK(std::abs(dot(v, n)) <= 1e-6 * norm(v) * norm(n) + 1e-12);
}

TEST_CASE("negative pedal of a circle about its center is the circle") {
  const Ellipse circle(1.5, 1.5);
  for (double t : {0.0, 1.0, 3.0, 4.5}) check_close(negative_pedal_point(circle, {0, 0}, t), ellipse_point(circle, t), 1e-13);
}

TEST_CASE("negative pedal singular and degenerate parameters") {
  const Ellipse e(2, 1);
  // normal (0,-1) and its derivative (0,1) are parallel at t = 0
  CHECK_THROWS_AS(negative_pedal_point(e, {2, 1}, 0.0), SingularFamily);
  CHECK_THROWS_AS(negative_pedal_point(e, ellipse_point(e, 0.8), 0.8), DegenerateLine);
}

TEST_CASE("complex step velocity matches the analytic derivative") {
  const Ellipse e(2, 1);
  for (double t : {0.1, 1.7, 4.0}) {
    const Point2 v = complex_step_velocity([&](auto u) { return ellipse_point(e, u); }, t);
    check_close(v, ellipse_velocity(e, t), 1e-15);
  }
}

TEST_CASE("hybrid closed form equals the two-line intersection") {
  const Ellipse e(2, 1);
  const double r = GENERATE(take(3, random(0.0, 0.95)));
  const double phi = GENERATE(take(3, random(0.0, 6.28)));
  const double t = GENERATE(take(4, random(0.0, 6.28)));
  const Point2 m{2 * r * std::cos(phi), r * std::sin(phi)};
  const Point2 p = oracle::ellipse(2, 1, t);
  const Point2 d = oracle::ellipse_tangent(2, 1, t);
  const Point2 foot = oracle::project(m, p, d);
  const Point2 ref = oracle::intersect(m, foot - m, p, perp(p - m));
  const Point2 x = hybrid_point(e, m, t);
  check_close(x, ref, 1e-9 * std::max(1.0, norm(ref)));
  check_close(hybrid_point_oracle(e, m, t), ref, 1e-9 * std::max(1.0, norm(ref)));
}

TEST_CASE("hybrid domain and singular parameter") {
  const Ellipse e(2, 1);
  CHECK_THROWS_AS(hybrid_point(e, Point2{3, 0}, 0.5), DomainError);
  const double s = 1.1;
  try {
    hybrid_point(e, ellipse_point(e, s), s);
    FAIL("expected SingularParameter");
  } catch (const SingularParameter& err) {
    CHECK(err.parameter() == s);
  }
  CHECK_NOTHROW(hybrid_point(e, ellipse_point(e, s), s + 0.01));
}

TEST_CASE("pseudo-Talbot closed form traces the negative pedal of the hybrid") {
  const Ellipse e(2, 1);
  const double s = GENERATE(0.3, 2.0, 4.4);
  const std::size_t n = 4096;
  const double step = 2 * pi / n;
  std::vector<Point2> formula_pts;
  for (std::size_t k = 0; k < n; ++k) formula_pts.push_back(pseudo_talbot_point(e, s, k * step));
  for (std::size_t k = 0; k < 40; ++k) {
    const Point2 q = pseudo_talbot_oracle_point(e, s, s + 2 * pi * (k + 0.5) / 40);
    // near a cusp two branches run close together, so refine around every
    // sample in the neighbourhood and keep the best
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (distance(q, formula_pts[j]) > 0.05) continue;
      const double t = detail::golden_section_min(
          [&](double u) { return distance(q, pseudo_talbot_point(e, s, u)); }, (j - 1.0) * step,
          (j + 1.0) * step, 1e-13);
      gap = std::min(gap, distance(q, pseudo_talbot_point(e, s, t)));
    }
    CHECK(gap < 1e-8);
  }
}

TEST_CASE("feet of M on the pseudo-Talbot tangents lie on the hybrid curve") {
  const Ellipse e(2, 1);
  const double s = GENERATE(0.3, 4.4);
  const Point2 m = ellipse_point(e, s);
  auto hybrid = [&](double u) { return hybrid_point(e, m, u); };
  const std::size_t n = 8192;
  std::vector<double> us;
  std::vector<Point2> hs;
  for (std::size_t k = 0; k < n; ++k) {
    us.push_back(s + 2 * pi * (k + 0.5) / n);
    hs.push_back(hybrid(us.back()));
  }
  for (int j = 0; j < 64; ++j) {
    const double t = 2 * pi * (j + 0.25) / 64;
    const Point2 v = complex_step_velocity([&](auto u) { return pseudo_talbot_point(e, s, u); }, t);
    const Point2 f = oracle::project(m, pseudo_talbot_point(e, s, t), v);
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (distance(f, hs[k]) < distance(f, hs[best])) best = k;
    }
    const double h = 2 * pi / n;
    const double lo = std::max(us[best] - h, s + 1e-4), hi = std::min(us[best] + h, s + 2 * pi - 1e-4);
    const double u = detail::golden_section_min([&](double x) { return distance(f, hybrid(x)); }, lo, hi, 1e-14);
    CHECK(distance(f, hybrid(u)) < 1e-7);
  }
}

TEST_CASE("evolutoid endpoints and envelope property") {
  const Ellipse e(2, 1);
  for (double t : {0.2, 1.3, 3.9}) {
    check_close(evolutoid_point(e, 0.0, t), ellipse_point(e, t), 1e-14);
    check_close(evolutoid_point(e, pi / 2, t), evolute_point(e, t), 1e-13);
  }
  const double theta = GENERATE(0.2, 0.7, 1.2, 2.5);
  const double t = GENERATE(take(4, random(0.0, 6.28)));
  const Point2 p = ellipse_point(e, t);
  const Point2 dir = rotate(ellipse_velocity(e, t), theta);
  const Point2 x = evolutoid_point(e, theta, t);
  CHECK_THAT(cross(x - p, dir), WithinAbs(0.0, 1e-12));
  const Point2 v = complex_step_velocity([&](auto u) { return evolutoid_point(e, theta, u); }, t);
  CHECK_THAT(cross(v, dir), WithinAbs(0.0, 1e-12 * std::max(1.0, norm(v))));
}

TEST_CASE("evolutoid support function matches the ellipse evolutoid") {
  const Ellipse e(2, 1);
  const double theta = GENERATE(0.3, 1.0);
  const SupportCurve s = evolutoid_support(ellipse_support(e), theta);
  for (double t : {0.1, 2.0, 4.0}) {
    // ellipse parameter whose outward normal has angle t - theta
    const double u = t - theta;
    const double phi = std::atan2(std::sin(u), 2 * std::cos(u));
    check_close(support_point(s, t), evolutoid_point(e, theta, phi), 1e-12);
  }
  CHECK(evolutoid_support(ellipse_support(e), 0.0).h(0.3) == ellipse_support(e).h(0.3));
}

TEST_CASE("evolutoid cusp counts around the critical angle") {
  const Ellipse e(2, 1);
  const double th0 = evolutoid_critical_angle(e);
  CHECK_THAT(th0, WithinRel(std::atan(4.0 / 9.0), 1e-15));
  auto cusps = [&](double theta) {
    return find_cusps([&](auto t) { return evolutoid_point(e, theta, t); }, ParamGrid(0, 2048));
  };
  CHECK(cusps(0.0).empty());
  CHECK(cusps(0.3).empty());
  CHECK(cusps(0.6).size() == 4);
  CHECK(cusps(pi - th0).size() == 2);
  CHECK(cusps(2.9).empty());

  const auto at = cusps(th0);
  REQUIRE(at.size() == 2);
  CHECK_THAT(at[0], WithinAbs(3 * pi / 4, 1e-6));
  CHECK_THAT(at[1], WithinAbs(7 * pi / 4, 1e-6));

  const auto ev = cusps(pi / 2);
  REQUIRE(ev.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK_THAT(ev[k], WithinAbs(k * pi / 2, 1e-6));
}

TEST_CASE("cusp finder works without a complex overload") {
  const Ellipse e(2, 1);
  auto evolute_real = [&](double t) { return evolute_point(e, t); };
  const auto c = find_cusps(evolute_real, ParamGrid(0, 1024));
  REQUIRE(c.size() == 4);
  CHECK_THAT(c[1], WithinAbs(pi / 2, 1e-5));
  CHECK(find_cusps([&](double t) { return ellipse_point(e, t); }, ParamGrid(0, 512)).empty());
}

TEST_CASE("negative pedal for M on the ellipse is a three-cusped curve") {
  const Ellipse e(2, 1);
  const double s = GENERATE(0.7, 2.5, 4.0);
  const Point2 m = ellipse_point(e, s);
  const auto c = find_cusps([&](double t) { return negative_pedal_point(e, m, t); }, ParamGrid(s, 2048, 0.5));
  REQUIRE(c.size() == 3);
  CHECK_THAT(c[1] - c[0], WithinAbs(2 * pi / 3, 1e-6));
  CHECK_THAT(c[2] - c[1], WithinAbs(2 * pi / 3, 1e-6));
}

TEST_CASE("negative pedal with M at a vertex hides one cusp at t = s") {
  // the cusps sit 2*pi/3 apart; for M = (a, 0) one of them is the excluded parameter
  const Ellipse e(2, 1);
  const auto c = find_cusps([&](double t) { return negative_pedal_point(e, {2, 0}, t); }, ParamGrid(0, 2048, 0.5));
  REQUIRE(c.size() == 2);
  CHECK_THAT(c[0], WithinAbs(2 * pi / 3, 1e-6));
  CHECK_THAT(c[1], WithinAbs(4 * pi / 3, 1e-6));
}

TEST_CASE("self-crossings of simple and figure-eight curves") {
  const Ellipse e(2, 1);
  CHECK(self_intersections(sample_curve([&](double t) { return ellipse_point(e, t); }, ParamGrid(0, 256))).empty());

  auto gerono = [](double t) { return Point2{std::cos(t), std::sin(t) * std::cos(t)}; };
  const auto xs = find_crossings(sample_curve(gerono, ParamGrid(0, 256, 0.25)));
  REQUIRE(xs.size() == 1);
  CHECK(xs[0].refined);
  check_close(xs[0].point, {0, 0}, 1e-12);
  CHECK_THAT(std::abs(xs[0].t_second - xs[0].t_first), WithinAbs(pi, 1e-9));
}

TEST_CASE("refined contrapedal crossings agree with a brute-force polyline search") {
  const Ellipse e(2, 1);
  const Point2 m{0.6, 0.45};
  auto f = [&](double t) { return foot_point(FootKind::contrapedal(), e, m, t); };
  const SampledCurve c = sample_curve(f, ParamGrid(0, 2048, 0.37));
  const auto refined = self_intersections(c);
  const auto brute = oracle::polyline_crossings(c.points);
  // the brute-force search reports M once per pair of passes through it
  REQUIRE(refined.size() == 3);
  CHECK(brute.size() >= 3);
  for (const Point2& p : brute) CHECK(min_distance(p, refined) < 1e-3);
  for (const Point2& p : refined) CHECK(min_distance(p, brute) < 1e-3);
}
