#pragma once

// Command-line front end. `parse_command_line` turns argv into a RunConfig
// and `run` executes it; both are usable from tests without a process.
//
// Exit codes: 0 success, 1 input error, 2 verification failure or
// degenerate frame (a structured error record is written to the output).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frenetlab/catalog.hpp"
#include "frenetlab/classify.hpp"
#include "frenetlab/curve.hpp"
#include "frenetlab/direction.hpp"
#include "frenetlab/errors.hpp"
#include "frenetlab/expression.hpp"
#include "frenetlab/indicatrix.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::size_t kDefaultCount = 401;

// Fixed verification thresholds reported with every JSON summary.
inline constexpr double kUnitSphereTol = 1e-9;
inline constexpr double kIndicatrixApparatusTol = 1e-4;
inline constexpr double kIndicatrixSystemTol = 1e-3;
inline constexpr double kAlignmentTol = 1e-4;

using Json = nlohmann::ordered_json;

enum class Command { frenet, indicatrix, direction, classify, verify, reproduce };
enum class OutputFormat { csv, json, svg };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::frenet: return "frenet";
    case Command::indicatrix: return "indicatrix";
    case Command::direction: return "direction";
    case Command::classify: return "classify";
    case Command::verify: return "verify";
    case Command::reproduce: return "reproduce";
  }
  return "unknown";
}

inline std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "unknown";
}

struct GridSpec {
  double start = 0.0;
  double end = 1.0;
  std::size_t count = kDefaultCount;
};

/// Parses "start:end:count"; pi is accepted inside start and end
/// ("0:2*pi:401").
inline GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw DomainError("grid must be start:end:count, got '" + text + "'");
  }
  auto number = [&](const std::string& s) {
    const Curve3 c = parse_curve_expression(s + ",0,0");
    return c(0.0).x();
  };
  GridSpec g;
  try {
    g.start = number(text.substr(0, a));
    g.end = number(text.substr(a + 1, b - a - 1));
  } catch (const ParseError& e) {
    throw DomainError(std::string("bad grid bound: ") + e.what());
  }
  const std::string count = text.substr(b + 1);
  char* end = nullptr;
  const long n = std::strtol(count.c_str(), &end, 10);
  if (count.empty() || *end != '\0' || n < 3) {
    throw DomainError("grid count must be an integer >= 3, got '" + count + "'");
  }
  g.count = static_cast<std::size_t>(n);
  return g;
}

struct RunConfig {
  Command command = Command::frenet;
  std::string curve;
  std::optional<GridSpec> grid;
  std::optional<DirectionKind> kind;
  double tolerance = kDefaultClassifyTol;
  std::optional<OutputFormat> format;
  std::string output_path;
  bool bridge_inflections = false;
  std::string target;   // reproduce: ex7.1 | ex7.2
  std::string outdir = ".";
};

/// Default tolerance, overridden by FRENETLAB_TOL.
inline double default_tolerance() {
  if (const char* env = std::getenv("FRENETLAB_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("FRENETLAB_TOL must be a positive number, got '") + env + "'");
    }
    return v;
  }
  return kDefaultClassifyTol;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return std::string(buf) == "-0.0000" ? "0.0000" : buf;
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Three orthographic projections (XY, XZ, YZ) side by side. Each panel maps
/// the padded bounds (5% margin) of its two coordinates into a fixed square
/// with equal scaling on both axes; non-finite points are skipped.
inline std::string render_svg(const std::vector<Vec3>& points, const std::string& title) {
  constexpr double kPanel = 300.0, kGap = 20.0, kHeader = 30.0;
  const std::array<std::array<int, 2>, 3> axes{{{0, 1}, {0, 2}, {1, 2}}};
  const std::array<const char*, 3> labels{"XY", "XZ", "YZ"};
  std::ostringstream svg;
  const double width = 3 * kPanel + 4 * kGap;
  const double height = kPanel + kHeader + kGap;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt_fixed(width) << " "
      << fmt_fixed(height) << "\" width=\"" << fmt_fixed(width) << "\" height=\""
      << fmt_fixed(height) << "\">\n";
  svg << "  <title>" << title << "</title>\n";
  for (std::size_t p = 0; p < 3; ++p) {
    const int u = axes[p][0], v = axes[p][1];
    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (const Vec3& q : points) {
      if (!q.allFinite()) continue;
      lo[0] = std::min(lo[0], q[u]);
      hi[0] = std::max(hi[0], q[u]);
      lo[1] = std::min(lo[1], q[v]);
      hi[1] = std::max(hi[1], q[v]);
    }
    double span = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    if (!(span > 0.0) || !std::isfinite(span)) span = 1.0;
    const double pad = 0.05 * span;
    const double scale = kPanel / (span + 2.0 * pad);
    const double cu = 0.5 * (lo[0] + hi[0]), cv = 0.5 * (lo[1] + hi[1]);
    const double ox = kGap + p * (kPanel + kGap), oy = kHeader;
    svg << "  <g id=\"" << labels[p] << "\">\n";
    svg << "    <rect x=\"" << fmt_fixed(ox) << "\" y=\"" << fmt_fixed(oy) << "\" width=\""
        << fmt_fixed(kPanel) << "\" height=\"" << fmt_fixed(kPanel)
        << "\" fill=\"none\" stroke=\"#999999\"/>\n";
    svg << "    <text x=\"" << fmt_fixed(ox) << "\" y=\"" << fmt_fixed(oy - 8.0)
        << "\" font-family=\"monospace\" font-size=\"14\">" << labels[p] << "</text>\n";
    svg << "    <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const Vec3& q : points) {
      if (!q.allFinite()) continue;
      const double x = ox + 0.5 * kPanel + (q[u] - cu) * scale;
      const double y = oy + 0.5 * kPanel - (q[v] - cv) * scale;
      svg << (first ? "" : " ") << fmt_fixed(x) << "," << fmt_fixed(y);
      first = false;
    }
    svg << "\"/>\n  </g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline const char* kFrameHeader = "param,px,py,pz,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau";

inline void csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    os << (first ? "" : ",") << fmt17(v);
    first = false;
  }
  os << "\n";
}

// ---------------------------------------------------------------------------
// JSON encoders
// ---------------------------------------------------------------------------

inline Json to_json(const DirectionKind& k) {
  return Json{{"family", to_string(k.family)}, {"theta", k.theta}, {"phase", k.phase}};
}

inline Json to_json(const ClassReport& r) {
  Json scores = Json::object();
  for (const auto& [name, v] : r.scores) scores[name] = finite_or_null(v);
  return Json{{"is_general_helix", to_string(r.is_general_helix)},
              {"is_slant_helix", to_string(r.is_slant_helix)},
              {"is_spherical", to_string(r.is_spherical)},
              {"is_circle_on_sphere", to_string(r.is_circle_on_sphere)},
              {"is_spherical_helix", to_string(r.is_spherical_helix)},
              {"is_spherical_slant_helix", to_string(r.is_spherical_slant_helix)},
              {"is_straight_line", r.is_straight_line},
              {"scores", scores},
              {"tolerance", r.tolerance},
              {"sphere", {{"center", {r.sphere.center.x(), r.sphere.center.y(), r.sphere.center.z()}},
                          {"radius", r.sphere.radius},
                          {"residual", r.sphere.residual}}}};
}

inline Json to_json(const TheoremCheck& c) {
  return Json{{"id", c.id},
              {"statement", c.statement},
              {"expected", to_string(c.expected)},
              {"observed", to_string(c.observed)},
              {"status", to_string(c.status)}};
}

inline Json to_json(const ResidualReport& r) {
  return Json{{"checked_system", to_string(r.checked)},
              {"system", {r.system[0], r.system[1], r.system[2]}},
              {"decomposition", r.decomposition},
              {"min_alignment", r.min_alignment},
              {"kappa_mismatch", r.kappa_mismatch},
              {"tau_mismatch", r.tau_mismatch},
              {"signed_kappa_mismatch", r.signed_kappa_mismatch},
              {"checked_nodes", r.checked_nodes}};
}

inline Json to_json(const ReferenceMatch& m) {
  return Json{{"sup_error", m.sup_error},
              {"component_error", {m.component_error[0], m.component_error[1], m.component_error[2]}},
              {"fitted_phase", m.fitted_phase},
              {"nominal_phase", m.nominal_phase},
              {"offset", {m.offset.x(), m.offset.y(), m.offset.z()}}};
}

inline Json to_json(const GridSpec& g) {
  return Json{{"start", g.start}, {"end", g.end}, {"count", g.count}};
}

inline Json tolerances_json(double tol) {
  return Json{{"classification", tol},
              {"residual", tol},
              {"alignment", kAlignmentTol},
              {"unit_sphere", kUnitSphereTol},
              {"indicatrix_apparatus", kIndicatrixApparatusTol},
              {"indicatrix_system", kIndicatrixSystemTol},
              {"epsilon_kappa", kEpsKappa}};
}

inline Json config_json(const RunConfig& c, const std::optional<GridSpec>& grid) {
  Json j{{"command", to_string(c.command)}};
  if (c.command == Command::reproduce) {
    j["target"] = c.target;
  } else {
    j["curve"] = c.curve;
    j["grid"] = grid ? to_json(*grid) : Json(nullptr);
    j["kind"] = c.kind ? to_json(*c.kind) : Json(nullptr);
    j["format"] = c.format ? Json(to_string(*c.format)) : Json(nullptr);
    j["bridge_inflections"] = c.bridge_inflections;
  }
  j["tolerances"] = tolerances_json(c.tolerance);
  return j;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct IndicatrixCheck {
  double unit_sphere = 0.0;      // max |‖α_T‖ - 1|
  double kappa_mismatch = 0.0;   // max ||κ_T closed| - κ measured|
  double tau_mismatch = 0.0;     // max ||τ_T closed| - |τ measured||
  double system_residual = 0.0;  // max indicatrix Frenet-system residual
  std::size_t checked_nodes = 0;

  [[nodiscard]] bool passes() const {
    return unit_sphere <= kUnitSphereTol && kappa_mismatch <= kIndicatrixApparatusTol &&
           tau_mismatch <= kIndicatrixApparatusTol && system_residual <= kIndicatrixSystemTol;
  }
};

/// Compares the closed-form indicatrix apparatus with the curvature measured
/// directly on the spherical curve T(t), at every node not bridged across an
/// inflection.
inline IndicatrixCheck check_indicatrix(const IndicatrixData& data) {
  IndicatrixCheck c;
  const Curve3 tangent = unit_tangent_curve(data.curve());
  for (std::size_t i = 0; i < data.nodes().size(); ++i) {
    const DonorPoint& p = data.node(i);
    c.unit_sphere = std::max(c.unit_sphere, std::abs(p.frame.T.norm() - 1.0));
    if (p.bridged) continue;
    const FrenetApparatus m = frenet_apparatus(tangent, p.t);
    c.kappa_mismatch = std::max(c.kappa_mismatch, std::abs(std::abs(p.kappa_T) - m.kappa));
    c.tau_mismatch = std::max(c.tau_mismatch, std::abs(std::abs(p.tau_T) - std::abs(m.tau)));
    const auto r = indicatrix_system_residuals(data, p.t);
    c.system_residual = std::max({c.system_residual, r[0], r[1], r[2]});
    ++c.checked_nodes;
  }
  return c;
}

inline Json to_json(const IndicatrixCheck& c) {
  return Json{{"unit_sphere", c.unit_sphere},
              {"kappa_mismatch", c.kappa_mismatch},
              {"tau_mismatch", c.tau_mismatch},
              {"system_residual", c.system_residual},
              {"checked_nodes", c.checked_nodes},
              {"pass", c.passes()}};
}

struct RoundTrip {
  double kappa_error = 0.0;
  double tau_error = 0.0;
};

/// Recovers (κ_T, τ_T) from β's measured curvatures and compares with the
/// donor closed forms; square-root branches are compared in magnitude.
inline RoundTrip round_trip(const DirectionCurve& dc) {
  const IndicatrixData& data = *dc.donor;
  const auto [kT, tT] =
      recover_donor_curvatures(dc.kind, dc.s_values(), dc.signed_kappa(), dc.tau());
  RoundTrip r;
  const bool kappa_mag = dc.kind.family == DirectionFamily::evolute;
  const bool tau_mag = dc.kind.family == DirectionFamily::mannheim;
  for (std::size_t i = 0; i < kT.size(); ++i) {
    const DonorPoint& p = data.node(i);
    const double ek = kappa_mag ? std::abs(kT[i] - std::abs(p.kappa_T)) : std::abs(kT[i] - p.kappa_T);
    const double et = tau_mag ? std::abs(tT[i] - std::abs(p.tau_T)) : std::abs(tT[i] - p.tau_T);
    r.kappa_error = std::max(r.kappa_error, ek);
    r.tau_error = std::max(r.tau_error, et);
  }
  return r;
}

struct PairingResult {
  Json json;
  bool pass = true;
};

/// Full check of one direction kind on a regular donor grid: system
/// residuals, curvature predictions, inverse maps, corollaries,
/// classification of α, α_T and β, and the class correspondences.
inline PairingResult verify_pairing(const DirectionKind& kind,
                                    const std::shared_ptr<const IndicatrixData>& data,
                                    const ClassReport& alpha, const ClassReport& indicatrix,
                                    double tol) {
  PairingResult out;
  Json& j = out.json;
  j["kind"] = to_json(kind);
  const DirectionCurve dc = integrate_direction_curve(kind, data);
  const Grid& grid = data->grid();
  std::size_t nonregular = 0;
  for (const auto& s : dc.samples) nonregular += s.regular ? 0 : 1;
  j["nonregular_nodes"] = nonregular;
  j["max_kappa"] = dc.max_kappa();

  ClassReport beta;
  bool classified = false;
  try {
    beta = classify(*dc.curve, grid, tol);
    classified = true;
    j["beta_classes"] = to_json(beta);
  } catch (const DegenerateError& e) {
    j["beta_classes"] = Json{{"error", e.what()}};
    out.pass = false;
  }

  if (nonregular == 0) {
    const ResidualReport r = residual_check(kind.family, dc, *data);
    const bool ok = r.passes(tol, kAlignmentTol);
    j["residuals"] = to_json(r);
    j["residuals"]["pass"] = ok;
    out.pass = out.pass && ok;

    const RoundTrip rt = round_trip(dc);
    const bool rt_ok = rt.kappa_error <= tol && rt.tau_error <= tol;
    j["round_trip"] = {{"kappa_error", rt.kappa_error}, {"tau_error", rt.tau_error}, {"pass", rt_ok}};
    out.pass = out.pass && rt_ok;

    const CorollaryReport c = corollary_check(dc);
    const bool c_ok = c.ratio_residual <= tol && c.sigma_residual <= tol;
    j["corollary"] = {{"ratio_residual", c.ratio_residual},
                      {"sigma_residual", c.sigma_residual},
                      {"pass", c_ok}};
    out.pass = out.pass && c_ok;
  } else if (classified && beta.is_straight_line) {
    j["residuals"] = Json{{"status", "degenerate"}, {"reason", "direction curve is a straight line"}};
  } else {
    j["residuals"] = Json{{"status", "degenerate"},
                          {"reason", "direction curve has nodes without a Frenet frame"}};
    out.pass = false;
  }

  if (classified) {
    Json checks = Json::array();
    const auto report = correspondence_report(kind.family, alpha, indicatrix, beta);
    for (const auto& c : report) checks.push_back(to_json(c));
    j["correspondences"] = checks;
    out.pass = out.pass && all_pass_or_na(report);
  }
  j["pass"] = out.pass;
  return out;
}

struct VerifyResult {
  Json results;
  Json checks;
  bool pass = true;
};

inline VerifyResult verify_curve(const Curve3& curve, const Grid& grid,
                                 const std::vector<DirectionKind>& kinds, double tol) {
  VerifyResult v;
  auto data = std::make_shared<const IndicatrixData>(curve, grid);
  const IndicatrixCheck ic = check_indicatrix(*data);
  const ClassReport alpha = classify(curve, grid, tol);
  const ClassReport indicatrix = classify(unit_tangent_curve(curve), grid, tol);
  v.results["curve_classes"] = to_json(alpha);
  v.results["indicatrix_classes"] = to_json(indicatrix);
  v.checks["indicatrix"] = to_json(ic);
  v.pass = ic.passes();
  Json pairings = Json::array();
  for (const auto& k : kinds) {
    PairingResult p = verify_pairing(k, data, alpha, indicatrix, tol);
    v.pass = v.pass && p.pass;
    pairings.push_back(std::move(p.json));
  }
  v.checks["pairings"] = pairings;
  v.checks["pass"] = v.pass;
  return v;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct ResolvedCurve {
  std::optional<CatalogEntry> entry;
  std::shared_ptr<const Curve3> curve;
  GridSpec grid;
};

inline ResolvedCurve resolve_curve(const RunConfig& c) {
  ResolvedCurve r;
  if (c.curve.empty()) throw DomainError("--curve is required");
  r.entry = find_entry(c.curve);
  if (r.entry) {
    r.grid = c.grid.value_or(GridSpec{r.entry->regular_domain.lo, r.entry->regular_domain.hi,
                                      kDefaultCount});
    r.curve = std::make_shared<const Curve3>(r.entry->curve);
    return r;
  }
  r.grid = c.grid.value_or(GridSpec{});
  if (!(r.grid.start < r.grid.end)) throw DomainError("grid start must be below grid end");
  try {
    r.curve = std::make_shared<const Curve3>(
        parse_curve_expression(c.curve, {r.grid.start, r.grid.end}));
  } catch (const ParseError& e) {
    std::string ids;
    for (const auto& id : catalog_ids()) ids += (ids.empty() ? "" : ", ") + id;
    throw DomainError("'" + c.curve + "' is neither a catalog id (" + ids +
                      ") nor a valid expression: " + e.what());
  }
  return r;
}

inline Json error_record(const std::string& type, const DegenerateError& e) {
  Json j{{"type", type}, {"message", e.what()}};
  j["node"] = e.node() ? Json(*e.node()) : Json(nullptr);
  return j;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

inline void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << "\n"; }

inline Json envelope(const RunConfig& c, const std::optional<GridSpec>& grid, Json results,
                     Json checks) {
  return Json{{"config", config_json(c, grid)},
              {"results", std::move(results)},
              {"checks", std::move(checks)},
              {"version", kVersion}};
}

inline Grid make_grid(const GridSpec& g) { return Grid(g.start, g.end, g.count); }

inline int run_frenet(const RunConfig& c, const ResolvedCurve& rc, std::ostream& os) {
  const Grid grid = make_grid(rc.grid);
  std::vector<FrenetApparatus> frames;
  std::vector<Vec3> points;
  double orthonormality = 0.0, system = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double t = grid.node(i);
    try {
      frames.push_back(frenet_apparatus(*rc.curve, t));
    } catch (const DegenerateFrameError& e) {
      throw DegenerateFrameError("curvature vanishes", i);
    }
    const auto& f = frames.back();
    points.push_back((*rc.curve)(t));
    orthonormality = std::max({orthonormality, std::abs(f.T.dot(f.N)), std::abs(f.T.dot(f.B)),
                               std::abs(f.N.dot(f.B)), std::abs(f.T.norm() - 1.0),
                               std::abs(f.N.norm() - 1.0), std::abs(f.B.norm() - 1.0),
                               (f.T.cross(f.N) - f.B).cwiseAbs().maxCoeff()});
    const auto r = frenet_system_residuals(*rc.curve, t);
    system = std::max({system, r[0], r[1], r[2]});
  }
  const OutputFormat fmt = c.format.value_or(OutputFormat::csv);
  if (fmt == OutputFormat::svg) {
    os << render_svg(points, c.curve);
  } else if (fmt == OutputFormat::csv) {
    os << kFrameHeader << "\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      const Vec3& p = points[i];
      csv_row(os, {f.t, p.x(), p.y(), p.z(), f.T.x(), f.T.y(), f.T.z(), f.N.x(), f.N.y(), f.N.z(),
                   f.B.x(), f.B.y(), f.B.z(), f.kappa, f.tau});
    }
  } else {
    Json samples = Json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      samples.push_back({{"param", f.t},
                         {"point", {points[i].x(), points[i].y(), points[i].z()}},
                         {"T", {f.T.x(), f.T.y(), f.T.z()}},
                         {"N", {f.N.x(), f.N.y(), f.N.z()}},
                         {"B", {f.B.x(), f.B.y(), f.B.z()}},
                         {"kappa", f.kappa},
                         {"tau", f.tau}});
    }
    write_json(os, envelope(c, rc.grid, Json{{"samples", samples}},
                            Json{{"orthonormality", orthonormality},
                                 {"frenet_system_residual", system}}));
  }
  return 0;
}

inline int run_indicatrix(const RunConfig& c, const ResolvedCurve& rc, std::ostream& os) {
  const auto policy = c.bridge_inflections ? InflectionPolicy::bridge : InflectionPolicy::reject;
  const IndicatrixData data(*rc.curve, make_grid(rc.grid), policy);
  const OutputFormat fmt = c.format.value_or(OutputFormat::csv);
  std::vector<Vec3> points;
  for (const auto& p : data.nodes()) points.push_back(p.frame.T);
  if (fmt == OutputFormat::svg) {
    os << render_svg(points, c.curve + " tangent indicatrix");
  } else if (fmt == OutputFormat::csv) {
    os << "param,s_T,px,py,pz,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau\n";
    for (std::size_t i = 0; i < data.nodes().size(); ++i) {
      const DonorPoint& p = data.node(i);
      csv_row(os, {p.t, data.arclength()[i], p.frame.T.x(), p.frame.T.y(), p.frame.T.z(),
                   p.T_T.x(), p.T_T.y(), p.T_T.z(), p.N_T.x(), p.N_T.y(), p.N_T.z(), p.B_T.x(),
                   p.B_T.y(), p.B_T.z(), p.kappa_T, p.tau_T});
    }
  } else {
    Json samples = Json::array();
    for (std::size_t i = 0; i < data.nodes().size(); ++i) {
      const DonorPoint& p = data.node(i);
      samples.push_back({{"param", p.t},
                         {"s_T", data.arclength()[i]},
                         {"point", {p.frame.T.x(), p.frame.T.y(), p.frame.T.z()}},
                         {"T_T", {p.T_T.x(), p.T_T.y(), p.T_T.z()}},
                         {"N_T", {p.N_T.x(), p.N_T.y(), p.N_T.z()}},
                         {"B_T", {p.B_T.x(), p.B_T.y(), p.B_T.z()}},
                         {"kappa_T", finite_or_null(p.kappa_T)},
                         {"tau_T", finite_or_null(p.tau_T)},
                         {"f", finite_or_null(p.f)},
                         {"sigma", finite_or_null(p.sigma)},
                         {"bridged", p.bridged}});
    }
    write_json(os, envelope(c, rc.grid, Json{{"samples", samples}},
                            Json{{"indicatrix", to_json(check_indicatrix(data))}}));
  }
  return 0;
}

inline int run_direction(const RunConfig& c, const ResolvedCurve& rc, std::ostream& os) {
  if (!c.kind) throw DomainError("direction requires --kind");
  const auto policy = c.bridge_inflections ? InflectionPolicy::bridge : InflectionPolicy::reject;
  auto data = std::make_shared<const IndicatrixData>(*rc.curve, make_grid(rc.grid), policy);
  const DirectionCurve dc = integrate_direction_curve(*c.kind, data);
  const OutputFormat fmt = c.format.value_or(OutputFormat::csv);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (fmt == OutputFormat::svg) {
    os << render_svg(dc.points(), c.curve + " " + to_string(c.kind->family) + "-direction curve");
  } else if (fmt == OutputFormat::csv) {
    os << kFrameHeader << ",kappa_pred,tau_pred\n";
    for (const auto& s : dc.samples) {
      const FrenetApparatus f = s.regular ? s.frame : FrenetApparatus{};
      const double m = s.regular ? 1.0 : nan;
      csv_row(os, {s.t, s.point.x(), s.point.y(), s.point.z(), m * f.T.x(), m * f.T.y(),
                   m * f.T.z(), m * f.N.x(), m * f.N.y(), m * f.N.z(), m * f.B.x(), m * f.B.y(),
                   m * f.B.z(), s.kappa, s.tau, s.predicted_kappa, s.predicted_tau});
    }
  } else {
    Json samples = Json::array();
    for (const auto& s : dc.samples) {
      samples.push_back({{"param", s.t},
                         {"s_T", s.s_T},
                         {"point", {s.point.x(), s.point.y(), s.point.z()}},
                         {"coefficients", {s.coefficients.x, s.coefficients.y, s.coefficients.z}},
                         {"regular", s.regular},
                         {"kappa", finite_or_null(s.kappa)},
                         {"signed_kappa", finite_or_null(s.signed_kappa)},
                         {"tau", finite_or_null(s.tau)},
                         {"kappa_pred", finite_or_null(s.predicted_kappa)},
                         {"tau_pred", finite_or_null(s.predicted_tau)}});
    }
    Json checks = Json::object();
    if (dc.all_regular()) checks["residuals"] = to_json(residual_check(dc));
    write_json(os, envelope(c, rc.grid, Json{{"samples", samples}}, checks));
  }
  return 0;
}

inline int run_classify(const RunConfig& c, const ResolvedCurve& rc, std::ostream& os) {
  if (c.format && *c.format != OutputFormat::json) {
    throw DomainError("classify writes JSON only");
  }
  const ClassReport r = classify(*rc.curve, make_grid(rc.grid), c.tolerance);
  write_json(os, envelope(c, rc.grid, to_json(r), Json::object()));
  return 0;
}

inline std::vector<DirectionKind> verify_kinds(const RunConfig& c, const ResolvedCurve& rc,
                                               const IndicatrixData& data) {
  if (c.kind) return {*c.kind};
  std::vector<DirectionKind> kinds;
  for (auto fam : {DirectionFamily::evolute, DirectionFamily::bertrand, DirectionFamily::mannheim}) {
    if (rc.entry) {
      kinds.push_back(pairing_kind(*rc.entry, fam, data));
    } else {
      kinds.push_back(fam == DirectionFamily::bertrand ? DirectionKind::bertrand(std::numbers::pi / 3.0)
                                                       : DirectionKind{fam, 0.0, 0.0});
    }
  }
  return kinds;
}

inline int run_verify(const RunConfig& c, const ResolvedCurve& rc, std::ostream& os) {
  if (c.format && *c.format != OutputFormat::json) throw DomainError("verify writes JSON only");
  const Grid grid = make_grid(rc.grid);
  const IndicatrixData probe(*rc.curve, grid);
  const VerifyResult v = verify_curve(*rc.curve, grid, verify_kinds(c, rc, probe), c.tolerance);
  write_json(os, envelope(c, rc.grid, v.results, v.checks));
  return v.pass ? 0 : 2;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path.string() + "'");
  f << content;
}

/// Figure reproduction: the curve, its indicatrix and the three direction
/// curves on the figure domain as SVG, plus a JSON summary with the
/// closed-form comparisons and the theorem checks (on the regular domain).
inline int run_reproduce(const RunConfig& c, std::ostream& os) {
  const auto entry = find_entry(c.target);
  if (!entry || !entry->has_references()) {
    throw DomainError("reproduce target must be ex7.1 or ex7.2, got '" + c.target + "'");
  }
  const std::filesystem::path dir(c.outdir);
  std::filesystem::create_directories(dir);
  const ReferenceConstants& k = *entry->figure_constants;
  const GridSpec figure{entry->figure_domain.lo, entry->figure_domain.hi, kDefaultCount};
  const Grid grid = make_grid(figure);
  const auto policy = entry->needs_bridge ? InflectionPolicy::bridge : InflectionPolicy::reject;
  auto data = std::make_shared<const IndicatrixData>(entry->curve, grid, policy);

  Json results = Json::object();
  Json files = Json::array();
  bool pass = true;
  const std::string stem = entry->id;
  auto emit = [&](const std::string& name, const std::vector<Vec3>& pts, const std::string& title) {
    const std::string file = stem + "_" + name + ".svg";
    write_file(dir / file, render_svg(pts, title));
    files.push_back({{"file", file}, {"points", pts.size()}});
  };

  std::vector<Vec3> alpha, indicatrix;
  for (const auto& p : data->nodes()) {
    alpha.push_back(entry->curve(p.t));
    indicatrix.push_back(p.frame.T);
  }
  emit("curve", alpha, stem + " given curve");
  emit("indicatrix", indicatrix, stem + " tangent indicatrix");

  // Reference indicatrix against T at the nodes, in the reference parameter.
  double indicatrix_error = 0.0;
  for (std::size_t i = 0; i < data->nodes().size(); ++i) {
    const double u = entry->reference_parameter == ReferenceParameter::indicatrix_arclength
                         ? data->arclength()[i]
                         : data->node(i).t;
    indicatrix_error = std::max(indicatrix_error,
                                (entry->reference_indicatrix(u) - indicatrix[i]).cwiseAbs().maxCoeff());
  }
  const double match_tol = entry->reference_parameter == ReferenceParameter::indicatrix_arclength
                               ? 1e-5
                               : 1e-4;
  results["indicatrix_reference_error"] = indicatrix_error;
  pass = pass && indicatrix_error <= match_tol;

  Json matches = Json::object();
  for (auto fam : {DirectionFamily::evolute, DirectionFamily::bertrand, DirectionFamily::mannheim}) {
    const DirectionCurve dc = integrate_direction_curve(figure_kind(fam, k), data);
    emit(to_string(fam), dc.points(), stem + " " + to_string(fam) + "-direction curve");
    const auto params = entry->reference_parameter == ReferenceParameter::indicatrix_arclength
                            ? dc.s_values()
                            : dc.params();
    const auto pts = dc.points();
    const ReferenceMatch m = match_reference(*entry, fam, k, params, pts);
    Json mj = to_json(m);
    mj["tolerance"] = match_tol;
    mj["pass"] = m.sup_error <= match_tol;
    pass = pass && m.sup_error <= match_tol;
    matches[to_string(fam)] = mj;
  }
  results["reference_matches"] = matches;
  results["files"] = files;

  const GridSpec window{entry->regular_domain.lo, entry->regular_domain.hi, kDefaultCount};
  const Grid wgrid = make_grid(window);
  const IndicatrixData wdata(entry->curve, wgrid);
  std::vector<DirectionKind> kinds;
  for (auto fam : {DirectionFamily::evolute, DirectionFamily::bertrand, DirectionFamily::mannheim}) {
    kinds.push_back(pairing_kind(*entry, fam, wdata));
  }
  const VerifyResult v = verify_curve(entry->curve, wgrid, kinds, c.tolerance);
  pass = pass && v.pass;
  results["theorem_domain"] = to_json(window);
  results["curve_classes"] = v.results["curve_classes"];
  results["indicatrix_classes"] = v.results["indicatrix_classes"];
  Json checks = v.checks;
  checks["pass"] = pass;

  Json cfg = config_json(c, std::nullopt);
  cfg["figure_domain"] = to_json(figure);
  cfg["constants"] = {{"theta", k.theta}, {"theta1", k.theta1}, {"theta2", k.theta2},
                      {"c", k.c}};
  cfg["bridge_inflections"] = entry->needs_bridge;
  const Json summary{{"config", cfg}, {"results", results}, {"checks", checks}, {"version", kVersion}};
  write_file(dir / (stem + "_summary.json"), summary.dump(2) + "\n");
  os << (pass ? "ok" : "FAILED") << ": " << stem << " -> " << (dir / (stem + "_summary.json")).string()
     << "\n";
  return pass ? 0 : 2;
}

/// Executes a configuration. Normal output goes to the configured file or
/// `out`; diagnostics go to `err`.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::optional<GridSpec> grid;
  std::string type;
  try {
    if (c.command == Command::reproduce) return run_reproduce(c, out);
    const ResolvedCurve rc = resolve_curve(c);
    grid = rc.grid;
    Output output(c.output_path, out);
    std::ostream& os = output.stream();
    switch (c.command) {
      case Command::frenet: return run_frenet(c, rc, os);
      case Command::indicatrix: return run_indicatrix(c, rc, os);
      case Command::direction: return run_direction(c, rc, os);
      case Command::classify: return run_classify(c, rc, os);
      case Command::verify: return run_verify(c, rc, os);
      case Command::reproduce: break;
    }
    return 0;
  } catch (const DegenerateError& e) {
    const std::string kind = dynamic_cast<const DegenerateFrameError*>(&e)   ? "DegenerateFrameError"
                             : dynamic_cast<const DegenerateSpeedError*>(&e) ? "DegenerateSpeedError"
                                                                             : "DegenerateError";
    const Json record{{"config", config_json(c, grid)},
                      {"results", nullptr},
                      {"checks", Json{{"error", error_record(kind, e)}}},
                      {"version", kVersion}};
    try {
      Output output(c.command == Command::reproduce ? std::string() : c.output_path, out);
      write_json(output.stream(), record);
    } catch (const Error&) {
      write_json(out, record);
    }
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// Parses argv into `config`. Returns an exit code when the program should
/// stop (help requested or usage error), std::nullopt to continue.
inline std::optional<int> parse_command_line(int argc, const char* const* argv, RunConfig& config,
                                             std::ostream& out = std::cout,
                                             std::ostream& err = std::cerr) {
  CLI::App app{"Frenet apparatus, tangent indicatrices and direction curves of space curves",
               "frenetlab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string grid_text, kind_text, format_text;
  double theta = 0.0, phase = 0.0;
  std::optional<double> tol;

  auto common = [&](CLI::App* sub, bool with_kind) {
    sub->add_option("--curve", config.curve, "catalog id or expression \"x(t), y(t), z(t)\"")
        ->required();
    sub->add_option("--grid", grid_text, "start:end:count, count >= 3");
    sub->add_option("--tol", tol, "tolerance (default 1e-3 or FRENETLAB_TOL)");
    sub->add_option("--format", format_text, "csv | json | svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--output,-o", config.output_path, "output file (default stdout)");
    sub->add_flag("--bridge-inflections", config.bridge_inflections,
                  "carry an oriented frame across isolated zero-curvature points");
    if (with_kind) {
      sub->add_option("--kind", kind_text, "evolute | bertrand | mannheim")
          ->check(CLI::IsMember({"evolute", "bertrand", "mannheim"}));
      sub->add_option("--theta", theta, "Bertrand angle (radians)");
      sub->add_option("--phase", phase, "integration constant of the coefficient angle");
    }
  };
  auto* frenet = app.add_subcommand("frenet", "sampled Frenet apparatus");
  common(frenet, false);
  auto* indicatrix = app.add_subcommand("indicatrix", "tangent indicatrix and its apparatus");
  common(indicatrix, false);
  auto* direction = app.add_subcommand("direction", "direction curve of the tangent indicatrix");
  common(direction, true);
  direction->get_option("--kind")->required();
  auto* classify_cmd = app.add_subcommand("classify", "helix / slant helix / sphere classes");
  common(classify_cmd, false);
  auto* verify = app.add_subcommand("verify", "residual, inverse-map and theorem checks");
  common(verify, true);
  auto* reproduce = app.add_subcommand("reproduce", "figures and checks of a worked example");
  reproduce->add_option("target", config.target, "ex7.1 | ex7.2")
      ->required()
      ->check(CLI::IsMember({"ex7.1", "ex7.2"}));
  reproduce->add_option("--outdir", config.outdir, "directory for SVG and JSON files");
  reproduce->add_option("--tol", tol, "tolerance (default 1e-3 or FRENETLAB_TOL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  const std::vector<std::pair<CLI::App*, Command>> commands{
      {frenet, Command::frenet},       {indicatrix, Command::indicatrix},
      {direction, Command::direction}, {classify_cmd, Command::classify},
      {verify, Command::verify},       {reproduce, Command::reproduce}};
  for (const auto& [sub, cmd] : commands) {
    if (sub->parsed()) config.command = cmd;
  }
  try {
    config.tolerance = tol ? *tol : default_tolerance();
    if (!(config.tolerance > 0.0) || !std::isfinite(config.tolerance)) {
      throw DomainError("--tol must be positive");
    }
    if (!grid_text.empty()) config.grid = parse_grid(grid_text);
    if (!format_text.empty()) {
      config.format = format_text == "csv"    ? OutputFormat::csv
                      : format_text == "json" ? OutputFormat::json
                                              : OutputFormat::svg;
    }
    if (!kind_text.empty()) {
      config.kind = DirectionKind{parse_direction_family(kind_text), theta, phase};
      config.kind->validate();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return std::nullopt;
}

}  // namespace frenetlab::cli
