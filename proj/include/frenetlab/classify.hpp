#pragma once

// Curve classes (general helix, slant helix, spherical curve, circle on a
// sphere, straight line) decided from sampled curvature profiles, and the
// biconditionals relating the classes of a curve, its tangent indicatrix and
// its direction curves.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "frenetlab/curve.hpp"
#include "frenetlab/direction.hpp"
#include "frenetlab/errors.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab {

inline constexpr double kDefaultClassifyTol = 1e-3;

enum class Verdict { no, yes, degenerate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::no: return "false";
    case Verdict::yes: return "true";
    case Verdict::degenerate: return "degenerate";
  }
  return "degenerate";
}

inline Verdict verdict(bool b) { return b ? Verdict::yes : Verdict::no; }

inline Verdict both(Verdict a, Verdict b) {
  if (a == Verdict::no || b == Verdict::no) return Verdict::no;
  if (a == Verdict::degenerate || b == Verdict::degenerate) return Verdict::degenerate;
  return Verdict::yes;
}

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double residual = 0.0;  // max ||p - c| - r|
};

/// Least-squares sphere through the points from the linear system
/// 2⟨p, c⟩ + d = |p|², r² = d + |c|². Coplanar circles have a family of
/// exact spheres; the minimum-norm solution is returned.
inline SphereFit fit_sphere(const std::vector<Vec3>& points) {
  if (points.size() < 4) throw DomainError("sphere fit needs at least 4 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& p = points[static_cast<std::size_t>(i)];
    A.row(i) << 2.0 * p.x(), 2.0 * p.y(), 2.0 * p.z(), 1.0;
    b(i) = p.squaredNorm();
  }
  const Eigen::Vector4d x = A.completeOrthogonalDecomposition().solve(b);
  SphereFit fit;
  fit.center = x.head<3>();
  fit.radius = std::sqrt(std::max(0.0, x(3) + fit.center.squaredNorm()));
  for (const Vec3& p : points) {
    fit.residual = std::max(fit.residual, std::abs((p - fit.center).norm() - fit.radius));
  }
  return fit;
}

struct ClassReport {
  Verdict is_general_helix = Verdict::degenerate;
  Verdict is_slant_helix = Verdict::degenerate;
  Verdict is_spherical = Verdict::no;
  Verdict is_circle_on_sphere = Verdict::degenerate;
  Verdict is_spherical_helix = Verdict::degenerate;
  Verdict is_spherical_slant_helix = Verdict::degenerate;
  bool is_straight_line = false;
  std::map<std::string, double> scores;
  double tolerance = kDefaultClassifyTol;
  SphereFit sphere;
  double max_kappa = 0.0;
};

/// f and σ are dimensionless, so a function counts as constant when either
/// its relative score or its absolute spread is within tolerance; the latter
/// covers functions that vanish identically up to sampling noise.
inline bool is_constant_dimensionless(std::span<const double> samples, double tol,
                                      double* relative_out = nullptr,
                                      double* spread_out = nullptr) {
  const double rel = constancy_score(samples);
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(samples.size()));
  if (relative_out) *relative_out = rel;
  if (spread_out) *spread_out = sd;
  return rel <= tol || sd <= tol;
}

/// Classifies the curve from samples on `grid`. A straight line (every
/// sampled curvature ≤ eps_kappa) gets degenerate curvature-based flags;
/// curvature vanishing at only some nodes is an error.
inline ClassReport classify(const Curve3& curve, const Grid& grid,
                            double tol = kDefaultClassifyTol,
                            double eps_kappa = kEpsKappa) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tolerance must be positive");
  ClassReport r;
  r.tolerance = tol;
  std::vector<Vec3> points;
  std::vector<double> kappa(grid.count());
  points.reserve(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double t = grid.node(i);
    points.push_back(curve(t));
    try {
      kappa[i] = curvature_magnitude(curve, t);
    } catch (const DegenerateSpeedError&) {
      throw DegenerateSpeedError("zero speed while classifying", i);
    }
    r.max_kappa = std::max(r.max_kappa, kappa[i]);
  }
  r.sphere = fit_sphere(points);
  r.is_spherical = verdict(r.sphere.radius > 0.0 && r.sphere.residual <= tol * r.sphere.radius);
  r.scores["sphere_residual"] = r.sphere.radius > 0.0 ? r.sphere.residual / r.sphere.radius
                                                      : r.sphere.residual;
  r.scores["max_kappa"] = r.max_kappa;

  if (r.max_kappa <= eps_kappa) {
    r.is_straight_line = true;
    return r;
  }
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] > eps_kappa)) {
      throw DegenerateFrameError("curvature vanishes on a curve that is not a line", i);
    }
  }
  const CurvatureProfile p = curvature_profile(curve, grid, eps_kappa);
  double rel = 0.0, sd = 0.0;
  r.is_general_helix = verdict(is_constant_dimensionless(p.f, tol, &rel, &sd));
  r.scores["f"] = rel;
  r.scores["f_spread"] = sd;
  r.is_slant_helix = verdict(is_constant_dimensionless(p.sigma, tol, &rel, &sd));
  r.scores["sigma"] = rel;
  r.scores["sigma_spread"] = sd;
  const double kappa_score = constancy_score(p.kappa);
  double max_tau = 0.0;
  for (double t : p.tau) max_tau = std::max(max_tau, std::abs(t));
  r.scores["kappa"] = kappa_score;
  r.scores["max_abs_tau"] = max_tau;
  r.is_circle_on_sphere =
      both(r.is_spherical, verdict(kappa_score <= tol && max_tau <= tol));
  r.is_spherical_helix = both(r.is_spherical, r.is_general_helix);
  r.is_spherical_slant_helix = both(r.is_spherical, r.is_slant_helix);
  return r;
}

// ---------------------------------------------------------------------------
// Correspondences
// ---------------------------------------------------------------------------

enum class CheckStatus { pass, fail, not_applicable };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

struct TheoremCheck {
  std::string id;
  std::string statement;
  Verdict expected = Verdict::degenerate;  // left-hand side
  Verdict observed = Verdict::degenerate;  // right-hand side
  CheckStatus status = CheckStatus::not_applicable;
};

inline TheoremCheck biconditional(std::string id, std::string statement, Verdict lhs,
                                  Verdict rhs) {
  TheoremCheck c{std::move(id), std::move(statement), lhs, rhs, CheckStatus::not_applicable};
  if (lhs != Verdict::degenerate && rhs != Verdict::degenerate) {
    c.status = lhs == rhs ? CheckStatus::pass : CheckStatus::fail;
  }
  return c;
}

/// Evaluates the biconditionals that apply to a direction curve of the
/// given family. `curve` classifies α, `indicatrix` its tangent indicatrix α_T
/// and `beta` the direction curve.
inline std::vector<TheoremCheck> correspondence_report(DirectionFamily family,
                                                       const ClassReport& curve,
                                                       const ClassReport& indicatrix,
                                                       const ClassReport& beta) {
  const Verdict beta_line = verdict(beta.is_straight_line);
  const Verdict alpha_line = verdict(curve.is_straight_line);
  std::vector<TheoremCheck> out;
  switch (family) {
    case DirectionFamily::evolute:
      out.push_back(biconditional("evolute.indicatrix_circle_iff_helix", "indicatrix is a circle on the sphere <=> beta is a helix",
                                  indicatrix.is_circle_on_sphere, beta.is_general_helix));
      out.push_back(biconditional("evolute.indicatrix_spherical_helix_iff_slant_helix", "indicatrix is a spherical helix <=> beta is a slant helix",
                                  indicatrix.is_spherical_helix, beta.is_slant_helix));
      out.push_back(biconditional("evolute.helix_iff_helix", "curve is a helix <=> beta is a helix",
                                  curve.is_general_helix, beta.is_general_helix));
      out.push_back(biconditional("evolute.slant_helix_iff_slant_helix", "curve is a slant helix <=> beta is a slant helix",
                                  curve.is_slant_helix, beta.is_slant_helix));
      break;
    case DirectionFamily::bertrand:
      out.push_back(biconditional("bertrand.indicatrix_spherical_helix_iff_helix", "indicatrix is a spherical helix <=> beta is a helix",
                                  indicatrix.is_spherical_helix, beta.is_general_helix));
      out.push_back(biconditional("bertrand.indicatrix_spherical_slant_helix_iff_slant_helix",
                                  "indicatrix is a spherical slant helix <=> beta is a slant helix",
                                  indicatrix.is_spherical_slant_helix, beta.is_slant_helix));
      out.push_back(biconditional("bertrand.slant_helix_iff_helix", "curve is a slant helix <=> beta is a helix",
                                  curve.is_slant_helix, beta.is_general_helix));
      break;
    case DirectionFamily::mannheim:
      out.push_back(biconditional("mannheim.indicatrix_spherical_helix_iff_slant_helix", "indicatrix is a spherical helix <=> beta is a slant helix",
                                  indicatrix.is_spherical_helix, beta.is_slant_helix));
      out.push_back(biconditional("mannheim.indicatrix_circle_iff_line",
                                  "indicatrix is a circle on the sphere <=> beta is a straight line",
                                  indicatrix.is_circle_on_sphere, beta_line));
      out.push_back(biconditional("mannheim.line_iff_helix", "curve is a straight line <=> beta is a helix",
                                  alpha_line, beta.is_general_helix));
      out.push_back(biconditional("mannheim.slant_helix_iff_slant_helix", "curve is a slant helix <=> beta is a slant helix",
                                  curve.is_slant_helix, beta.is_slant_helix));
      break;
  }
  return out;
}

inline bool all_pass_or_na(const std::vector<TheoremCheck>& checks) {
  return std::none_of(checks.begin(), checks.end(),
                      [](const TheoremCheck& c) { return c.status == CheckStatus::fail; });
}

}  // namespace frenetlab
