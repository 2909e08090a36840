#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pedallab/pedallab.hpp"

namespace pedallab::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kIoError = 2,
  kComputeError = 3,
  kUsage = 64,  // EX_USAGE
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json, Svg };

/// Non-ellipse test curve for identities and centroid: h = 10 + cos 3t.
enum class CurveKind { Ellipse, RoundedTriangle };

inline constexpr double kDefaultTolerance = 1e-6;
inline constexpr double kConjectureTolerance = 1e-4;

struct RunConfig {
  std::string subcommand;
  double a = 2.0;
  double b = 1.0;
  Point2 m{1.0, 0.5};
  /// Every --m given, in order (identities takes several).
  std::vector<Point2> ms;
  AreaFamily family = AreaFamily::pedal();
  std::optional<double> s;
  std::size_t n = 2048;
  std::optional<double> offset;
  Format format = Format::Csv;
  std::string output = "-";
  LocusSpec::Kind locus = LocusSpec::Kind::EllipseBoundary;
  double r = 1.0;
  std::size_t count = 64;
  double phase = 0.0;
  std::optional<double> tol;
  std::vector<Point2> vertices;
  std::vector<double> thetas;
  std::vector<double> mus;
  CurveKind curve = CurveKind::Ellipse;

  bool help = false;
  std::string help_text;

  Ellipse ellipse() const { return Ellipse(a, b); }

  /// Pedal point: P(s) when --s is given, otherwise --m.
  Point2 pedal_point() const { return s ? ellipse_point(ellipse(), *s) : m; }

  /// --tol, then PEDALLAB_TOL, then `fallback`.
  double threshold(double fallback = kDefaultTolerance) const {
    if (tol) return *tol;
    if (const char* env = std::getenv("PEDALLAB_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && *end == '\0' && v > 0.0) return v;
      throw UsageError("PEDALLAB_TOL: expected a positive number, got '" + std::string(env) + "'");
    }
    return fallback;
  }

  /// Curve grid. Families singular at t = s start at s with a half-step offset.
  ParamGrid grid() const {
    const bool shift = s && singular_at_boundary_parameter(family);
    return ParamGrid(shift ? *s : 0.0, n, offset.value_or(shift ? 0.5 : 0.0));
  }
};

namespace detail {

inline std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline Point2 parse_point(const std::string& text, const std::string& flag) {
  const auto v = parse_reals(text, flag);
  if (v.size() != 2) throw UsageError(flag + ": expected x,y (got '" + text + "')");
  return {v[0], v[1]};
}

inline std::vector<Point2> parse_points(const std::string& text, const std::string& flag) {
  std::vector<Point2> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_point(item, flag));
  return out;
}

}  // namespace detail

/// Parses argv (argv[0] is the program name). Throws UsageError naming the
/// offending flag.
inline RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Pedal, contrapedal and related curves of an ellipse: sampling, areas, invariance scans"};
  app.name("pedallab");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::vector<std::string> m_text;
  std::string family = "pedal", format = "csv", locus = "ellipse", curve = "ellipse";
  std::string vertices, thetas, mus;
  std::optional<double> theta, mu, s, offset, tol;
  std::size_t n = cfg.n, count = cfg.count;

  app.add_option("--a", cfg.a, "semi-major axis")->capture_default_str();
  app.add_option("--b", cfg.b, "semi-minor axis")->capture_default_str();
  app.add_option("--m", m_text, "pedal point x,y (repeat for identities)");
  app.add_option("--family", family, "curve family")
      ->check(CLI::IsMember({"ellipse", "pedal", "contrapedal", "rotated", "interpolated",
                             "evolutoid", "hybrid", "pseudo_talbot", "negative_pedal"}))
      ->capture_default_str();
  app.add_option("--theta", theta, "rotation angle for rotated / evolutoid");
  app.add_option("--mu", mu, "weight for interpolated");
  app.add_option("--s", s, "place M at the ellipse point of parameter s");
  app.add_option("--n", n, "grid size")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 24));
  app.add_option("--offset", offset, "grid offset in steps, [0, 1)");
  app.add_option("--format", format, "curve output format")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  app.add_option("--output,-o", cfg.output, "output path, - for stdout")->capture_default_str();
  app.add_option("--locus", locus, "scan locus")
      ->check(CLI::IsMember({"circle", "ellipse"}))
      ->capture_default_str();
  app.add_option("--r", cfg.r, "circle locus radius")->capture_default_str();
  app.add_option("--count", count, "locus samples")->check(CLI::Range(std::size_t{4}, std::size_t{1} << 20));
  app.add_option("--phase", cfg.phase, "locus start angle")->capture_default_str();
  app.add_option("--tol", tol, "pass/fail threshold (default 1e-6, or PEDALLAB_TOL)");
  app.add_option("--vertices", vertices, "polygon x,y;x,y;...");
  app.add_option("--thetas", thetas, "identities: comma-separated angles");
  app.add_option("--mus", mus, "identities: comma-separated weights");
  app.add_option("--curve", curve, "identities / centroid curve")
      ->check(CLI::IsMember({"ellipse", "rounded_triangle"}))
      ->capture_default_str();

  for (const char* name : {"sample", "area", "scan", "identities", "centroid", "polygon", "conjecture"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("sample")->description("sample a curve to csv, json or svg");
  app.get_subcommand("area")->description("signed area by quadrature and closed form");
  app.get_subcommand("scan")->description("area invariance over a locus of M");
  app.get_subcommand("identities")->description("residuals of the area identities");
  app.get_subcommand("centroid")->description("curvature centroid");
  app.get_subcommand("polygon")->description("pedal polygon areas and centers");
  app.get_subcommand("conjecture")->description("contrapedal self-crossings vs (x_m, 0), (0, y_m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::ParseError& err) {
    throw UsageError(err.what());
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!std::isfinite(cfg.a) || !std::isfinite(cfg.b) || !(cfg.b > 0.0)) {
    throw UsageError("--b: expected 0 < b (got b=" + std::to_string(cfg.b) + ")");
  }
  if (cfg.a < cfg.b) {
    throw UsageError("--a: a >= b required (got a=" + std::to_string(cfg.a) +
                     ", b=" + std::to_string(cfg.b) + "); swap the axes instead");
  }
  cfg.n = n;
  cfg.count = count;
  for (const auto& t : m_text) cfg.ms.push_back(detail::parse_point(t, "--m"));
  if (!cfg.ms.empty()) cfg.m = cfg.ms.front();
  cfg.s = s;
  if (offset && !(*offset >= 0.0 && *offset < 1.0)) throw UsageError("--offset: must lie in [0, 1)");
  cfg.offset = offset;
  if (tol && !(*tol > 0.0)) throw UsageError("--tol: must be positive");
  cfg.tol = tol;

  const auto tag = *AreaFamily::parse_tag(family);
  if (tag == AreaFamily::Tag::Rotated || tag == AreaFamily::Tag::Evolutoid) {
    if (!theta) throw UsageError("--theta: required for family " + family);
    cfg.family = {tag, *theta};
  } else if (tag == AreaFamily::Tag::Interpolated) {
    if (!mu) throw UsageError("--mu: required for family interpolated");
    cfg.family = {tag, *mu};
  } else {
    cfg.family = {tag, 0.0};
  }

  cfg.format = format == "json" ? Format::Json : format == "svg" ? Format::Svg : Format::Csv;
  cfg.locus = locus == "circle" ? LocusSpec::Kind::ConcentricCircle : LocusSpec::Kind::EllipseBoundary;
  if (cfg.locus == LocusSpec::Kind::ConcentricCircle && !(cfg.r > 0.0)) {
    throw UsageError("--r: circle radius must be positive");
  }
  cfg.curve = curve == "rounded_triangle" ? CurveKind::RoundedTriangle : CurveKind::Ellipse;
  if (!vertices.empty()) cfg.vertices = detail::parse_points(vertices, "--vertices");
  if (!thetas.empty()) cfg.thetas = detail::parse_reals(thetas, "--thetas");
  if (!mus.empty()) cfg.mus = detail::parse_reals(mus, "--mus");

  if (cfg.subcommand == "polygon" && cfg.vertices.size() < 3) {
    throw UsageError("--vertices: polygon needs at least 3 vertices");
  }
  return cfg;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline json family_params(const RunConfig& cfg) {
  json p = json::object();
  switch (cfg.family.tag) {
    case AreaFamily::Tag::Rotated:
    case AreaFamily::Tag::Evolutoid:
      p["theta"] = cfg.family.param;
      break;
    case AreaFamily::Tag::Interpolated:
      p["mu"] = cfg.family.param;
      break;
    default:
      break;
  }
  if (cfg.s) p["s"] = *cfg.s;
  return p;
}

inline json point_json(const Point2& p) { return json::array({p.x, p.y}); }

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string render_csv(const SampledCurve& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,x,y\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    os << c.params[k] << ',' << c.points[k].x << ',' << c.points[k].y << '\n';
  }
  return os.str();
}

inline std::string render_json(const SampledCurve& c, const RunConfig& cfg) {
  json doc;
  doc["meta"] = {{"family", cfg.family.name()},
                 {"a", cfg.a},
                 {"b", cfg.b},
                 {"m", point_json(cfg.pedal_point())},
                 {"params", family_params(cfg)}};
  json pts = json::array();
  for (std::size_t k = 0; k < c.size(); ++k) {
    pts.push_back(json::array({c.params[k], c.points[k].x, c.points[k].y}));
  }
  doc["points"] = std::move(pts);
  return doc.dump(1) + "\n";
}

/// One closed path, y flipped so the picture has the usual orientation.
inline std::string render_svg(const SampledCurve& c) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (const Point2& p : c.points) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, -p.y);
    hi_y = std::max(hi_y, -p.y);
  }
  const double w = hi_x - lo_x, h = hi_y - lo_y;
  const double extent = std::max({w, h, 1e-12});
  const double mx = 0.05 * (w > 0 ? w : extent), my = 0.05 * (h > 0 ? h : extent);

  std::ostringstream os;
  os << std::setprecision(17);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << lo_x - mx << ' ' << lo_y - my << ' '
     << w + 2 * mx << ' ' << h + 2 * my << "\">\n"
     << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << 0.003 * extent << "\" d=\"";
  for (std::size_t k = 0; k < c.size(); ++k) {
    os << (k == 0 ? "M " : " L ") << c.points[k].x << ' ' << (c.points[k].y == 0.0 ? 0.0 : -c.points[k].y);
  }
  os << " Z\"/>\n</svg>\n";
  return os.str();
}

inline std::string render_curve(const SampledCurve& c, const RunConfig& cfg) {
  switch (cfg.format) {
    case Format::Csv: return render_csv(c);
    case Format::Json: return render_json(c, cfg);
    case Format::Svg: return render_svg(c);
  }
  return {};
}

inline void write_curve(const SampledCurve& c, const RunConfig& cfg, std::ostream& out = std::cout) {
  write_text(cfg.output, render_curve(c, cfg), out);
}

inline bool report_passes(const InvarianceReport& r, double threshold) {
  return r.failed == 0 && std::isfinite(r.max_rel_dev) && r.max_rel_dev < threshold;
}

inline json report_json(const InvarianceReport& r, double threshold) {
  json samples = json::array();
  for (const ScanSample& s : r.samples) {
    samples.push_back({{"m", point_json(s.m)},
                       {"area_quadrature", s.area_quadrature},
                       {"area_closed_form", optional_json(s.area_closed_form)},
                       {"refinement_delta", s.refinement_delta},
                       {"status", s.status}});
  }
  json locus = {{"kind", r.locus.name()}, {"count", r.locus.count}, {"phase", r.locus.phase}};
  if (r.locus.kind == LocusSpec::Kind::ConcentricCircle) locus["r"] = r.locus.radius;
  return {{"family", {{"name", r.family.name()}, {"param", r.family.param}}},
          {"locus", locus},
          {"grid_count", r.grid_count},
          {"samples", samples},
          {"mean", r.mean},
          {"max_abs_dev", r.max_abs_dev},
          {"max_rel_dev", r.max_rel_dev},
          {"reference", optional_json(r.reference)},
          {"max_closed_form_rel_err", optional_json(r.max_closed_form_rel_err)},
          {"failed", r.failed},
          {"threshold", threshold},
          {"pass", report_passes(r, threshold)}};
}

inline bool identities_pass(const std::vector<IdentityReport>& reports, double threshold) {
  return std::all_of(reports.begin(), reports.end(),
                     [&](const IdentityReport& r) { return r.max_residual < threshold; });
}

inline json identities_json(const std::vector<IdentityReport>& reports, double threshold) {
  json list = json::array();
  for (const IdentityReport& r : reports) {
    list.push_back({{"identity", r.identity_name},
                    {"residuals", r.residuals},
                    {"max_residual", r.max_residual}});
  }
  return {{"identities", list}, {"threshold", threshold}, {"pass", identities_pass(reports, threshold)}};
}

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

inline SupportCurve rounded_triangle() { return cosine_support(10.0, 1.0, 3); }

inline int run_sample(const RunConfig& cfg, std::ostream& out) {
  const Ellipse e = cfg.ellipse();
  write_curve(sample_curve(family_curve(cfg.family, e, cfg.pedal_point()), cfg.grid()), cfg, out);
  return kOk;
}

inline int run_area(const RunConfig& cfg, std::ostream& out) {
  const Ellipse e = cfg.ellipse();
  const Point2 m = cfg.pedal_point();
  const QuadratureResult q = converged_area(family_curve(cfg.family, e, m), cfg.grid());
  std::optional<double> closed;
  try {
    closed = closed_form_area(cfg.family, e, m);
  } catch (const DomainError&) {
  }
  json doc = {{"family", cfg.family.name()},
              {"a", cfg.a},
              {"b", cfg.b},
              {"m", point_json(m)},
              {"params", family_params(cfg)},
              {"n", cfg.n},
              {"area_quadrature", q.value},
              {"area_refined", q.refined_value},
              {"refinement_delta", q.delta()},
              {"converged", q.converged},
              {"area_closed_form", optional_json(closed)}};
  write_text(cfg.output, doc.dump(2) + "\n", out);
  return q.converged ? kOk : kCheckFailed;
}

inline int run_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Ellipse e = cfg.ellipse();
  const double threshold = cfg.threshold();
  const LocusSpec locus = cfg.locus == LocusSpec::Kind::ConcentricCircle
                              ? LocusSpec::concentric_circle(cfg.r, cfg.count, cfg.phase)
                              : LocusSpec::ellipse_boundary(cfg.count, cfg.phase);
  const InvarianceReport r = scan(e, cfg.family, locus, ParamGrid(0.0, cfg.n, cfg.offset.value_or(0.0)));
  write_text(cfg.output, report_json(r, threshold).dump(2) + "\n", out);
  err << r.family.name() << " over " << locus.name() << ": mean " << std::setprecision(17) << r.mean
      << ", max_rel_dev " << sci(r.max_rel_dev) << ", failed " << r.failed << '\n';
  return report_passes(r, threshold) ? kOk : kCheckFailed;
}

inline int run_identities(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const double threshold = cfg.threshold();
  std::vector<Point2> ms = cfg.ms;
  if (ms.empty()) ms = {{0.3, 0.2}, {1.5, -0.4}, {-2.0, 1.0}};
  std::vector<double> thetas = cfg.thetas;
  if (thetas.empty()) thetas = {0.0, kPi / 6, kPi / 4, kPi / 3, kPi / 2};
  std::vector<double> mus = cfg.mus;
  if (mus.empty()) mus = {-0.5, 0.0, 0.25, 0.5, 1.0, 1.5};
  const auto reports = cfg.curve == CurveKind::Ellipse
                           ? identity_suite(cfg.ellipse(), ms, thetas, mus, cfg.n)
                           : identity_suite(rounded_triangle(), ms, thetas, mus, cfg.n);
  write_text(cfg.output, identities_json(reports, threshold).dump(2) + "\n", out);
  for (const auto& r : reports) err << r.identity_name << ": " << sci(r.max_residual) << '\n';
  return identities_pass(reports, threshold) ? kOk : kCheckFailed;
}

inline int run_centroid(const RunConfig& cfg, std::ostream& out) {
  json doc;
  if (!cfg.vertices.empty()) {
    const Polygon p(cfg.vertices);
    doc = {{"curve", "polygon"}, {"k", point_json(curvature_centroid_polygon(p))}};
  } else if (cfg.curve == CurveKind::RoundedTriangle) {
    doc = {{"curve", "rounded_triangle"}, {"k", point_json(curvature_centroid_support(rounded_triangle()))}};
  } else {
    const Ellipse e = cfg.ellipse();
    const SampledCurve c = sample_curve([&](double t) { return ellipse_point(e, t); }, cfg.grid());
    doc = {{"curve", "ellipse"},
           {"a", cfg.a},
           {"b", cfg.b},
           {"k", point_json(curvature_centroid_support(ellipse_support(e)))},
           {"k_from_samples", point_json(curvature_centroid_samples(curvature_samples(c)))}};
  }
  write_text(cfg.output, doc.dump(2) + "\n", out);
  return kOk;
}

inline int run_polygon(const RunConfig& cfg, std::ostream& out) {
  const Polygon p(cfg.vertices);
  json doc = {{"vertices", json::array()},
              {"m", point_json(cfg.m)},
              {"area", polygon_signed_area(p)},
              {"pedal_area", polygon_signed_area(pedal_polygon(p, cfg.m))},
              {"curvature_centroid", point_json(curvature_centroid_polygon(p))}};
  for (const Point2& v : cfg.vertices) doc["vertices"].push_back(point_json(v));
  if (cfg.vertices.size() == 3) doc["circumcenter"] = point_json(circumcenter(p));
  write_text(cfg.output, doc.dump(2) + "\n", out);
  return kOk;
}

inline int run_conjecture(const RunConfig& cfg, std::ostream& out) {
  const double threshold = cfg.threshold(kConjectureTolerance);
  const ParamGrid grid(0.0, cfg.n, cfg.offset.value_or(0.5));
  const ConjectureReport r = conjecture_check_contrapedal(cfg.ellipse(), cfg.m, grid);
  json crossings = json::array();
  for (const Point2& p : r.crossings) crossings.push_back(point_json(p));
  const bool degenerate = r.status == ConjectureReport::Status::DegenerateM;
  json doc = {{"m", point_json(r.m)},
              {"status", degenerate ? "degenerate_m" : "checked"},
              {"crossings", crossings},
              {"distance_to_x_axis_point", degenerate ? json(nullptr) : json(r.distance_to_x_axis_point)},
              {"distance_to_y_axis_point", degenerate ? json(nullptr) : json(r.distance_to_y_axis_point)},
              {"threshold", threshold},
              {"holds", r.holds(threshold)}};
  write_text(cfg.output, doc.dump(2) + "\n", out);
  if (degenerate) return kOk;
  return r.holds(threshold) ? kOk : kCheckFailed;
}

/// Full command: parse, dispatch, map errors to exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = parse_args(argc, argv);
    if (cfg.help) {
      out << cfg.help_text;
      return kOk;
    }
    const std::string& cmd = cfg.subcommand;
    if (cmd == "sample") return run_sample(cfg, out);
    if (cmd == "area") return run_area(cfg, out);
    if (cmd == "scan") return run_scan(cfg, out, err);
    if (cmd == "identities") return run_identities(cfg, out, err);
    if (cmd == "centroid") return run_centroid(cfg, out);
    if (cmd == "polygon") return run_polygon(cfg, out);
    if (cmd == "conjecture") return run_conjecture(cfg, out);
    throw UsageError("unknown subcommand " + cmd);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kComputeError;
  }
}

}  // namespace pedallab::cli
