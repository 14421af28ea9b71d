#pragma once

// Direction curves of the tangent indicatrix: integral curves β of
// X = x T_T + y N_T + z B_T, x² + y² + z² = 1, whose principal normal is
// T_T (evolute-direction), N_T (Bertrand-direction) or B_T
// (Mannheim-direction).
//
// Everything is indexed by the donor curve's own parameter t; the arc length
// of β equals s_T, read from the IndicatrixData tables.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frenetlab/curve.hpp"
#include "frenetlab/errors.hpp"
#include "frenetlab/indicatrix.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab {

enum class DirectionFamily { evolute, bertrand, mannheim };

inline std::string to_string(DirectionFamily family) {
  switch (family) {
    case DirectionFamily::evolute: return "evolute";
    case DirectionFamily::bertrand: return "bertrand";
    case DirectionFamily::mannheim: return "mannheim";
  }
  return "unknown";
}

inline DirectionFamily parse_direction_family(const std::string& name) {
  if (name == "evolute") return DirectionFamily::evolute;
  if (name == "bertrand") return DirectionFamily::bertrand;
  if (name == "mannheim") return DirectionFamily::mannheim;
  throw DomainError("unknown direction kind '" + name + "'");
}

/// `theta` is the constant angle of the Bertrand kind. `phase` is the
/// integration constant added to ∫τ_T ds_T (evolute) or ∫κ_T ds_T (Mannheim).
struct DirectionKind {
  DirectionFamily family = DirectionFamily::bertrand;
  double theta = 0.0;
  double phase = 0.0;

  static DirectionKind evolute(double phase = 0.0) {
    return {DirectionFamily::evolute, 0.0, phase};
  }
  static DirectionKind bertrand(double theta) {
    return {DirectionFamily::bertrand, theta, 0.0};
  }
  static DirectionKind mannheim(double phase = 0.0) {
    return {DirectionFamily::mannheim, 0.0, phase};
  }

  void validate() const {
    if (!std::isfinite(theta) || !std::isfinite(phase)) {
      throw DomainError("direction kind angles must be finite");
    }
  }

  /// Index of the indicatrix frame vector (0 T_T, 1 N_T, 2 B_T) that the
  /// principal normal of β coincides with.
  [[nodiscard]] int normal_index() const noexcept {
    switch (family) {
      case DirectionFamily::evolute: return 0;
      case DirectionFamily::bertrand: return 1;
      case DirectionFamily::mannheim: return 2;
    }
    return 0;
  }
};

struct DirectionCoefficients {
  double s_T = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] Vec3 vector() const { return {x, y, z}; }
};

struct CurvaturePair {
  double kappa = 0.0;
  double tau = 0.0;
};

namespace detail {

inline void require_on_grid(const IndicatrixData& data, double t) {
  const Grid& g = data.grid();
  if (!g.contains(t, 1e-12 * (g.end() - g.start()))) {
    throw DomainError("parameter " + std::to_string(t) +
                      " outside the tabulated range");
  }
}

/// Angle argument of the closed-form coefficients: phase + ∫τ_T ds_T for the
/// evolute kind, phase + ∫κ_T ds_T for the Mannheim kind.
inline double coefficient_angle(const DirectionKind& kind, const IndicatrixData& data,
                                double t) {
  switch (kind.family) {
    case DirectionFamily::evolute: return kind.phase + data.torsion_integral_at(t);
    case DirectionFamily::mannheim: return kind.phase + data.curvature_integral_at(t);
    case DirectionFamily::bertrand: return kind.theta;
  }
  return 0.0;
}

inline Vec3 coefficient_vector(const DirectionKind& kind, double angle) {
  switch (kind.family) {
    case DirectionFamily::evolute: return {0.0, std::sin(angle), std::cos(angle)};
    case DirectionFamily::bertrand: return {std::cos(angle), 0.0, std::sin(angle)};
    case DirectionFamily::mannheim: return {std::sin(angle), std::cos(angle), 0.0};
  }
  return Vec3::Zero();
}

inline Vec3 coefficients_unchecked(const DirectionKind& kind, const IndicatrixData& data,
                                   double t) {
  return coefficient_vector(kind, coefficient_angle(kind, data, t));
}

inline Vec3 field(const Vec3& c, const DonorPoint& p) {
  return c.x() * p.T_T + c.y() * p.N_T + c.z() * p.B_T;
}

/// dβ/dt = X ds_T/dt.
inline Vec3 velocity(const DirectionKind& kind, const IndicatrixData& data, double t) {
  const DonorPoint p = data.at(t);
  return field(coefficients_unchecked(kind, data, t), p) * p.arclength_rate;
}

inline CurvaturePair predicted(const DirectionKind& kind, const DonorPoint& p,
                               double angle) {
  const double k = p.kappa_T;
  const double tau = p.tau_T;
  switch (kind.family) {
    case DirectionFamily::evolute: return {-k * std::sin(angle), k * std::cos(angle)};
    case DirectionFamily::bertrand:
      return {k * std::cos(angle) - tau * std::sin(angle),
              k * std::sin(angle) + tau * std::cos(angle)};
    case DirectionFamily::mannheim: return {tau * std::cos(angle), tau * std::sin(angle)};
  }
  return {};
}

/// d(x, y, z)/ds_T of the closed forms.
inline Vec3 coefficient_rates(const DirectionKind& kind, const DonorPoint& p,
                              double angle) {
  switch (kind.family) {
    case DirectionFamily::evolute:
      return {0.0, p.tau_T * std::cos(angle), -p.tau_T * std::sin(angle)};
    case DirectionFamily::bertrand: return Vec3::Zero();
    case DirectionFamily::mannheim:
      return {p.kappa_T * std::cos(angle), -p.kappa_T * std::sin(angle), 0.0};
  }
  return Vec3::Zero();
}

/// σ = (κτ' - τκ')/(κ²+τ²)^{3/2}, derivatives over the sample abscissae.
/// Equal to κ²/(κ²+τ²)^{3/2} (τ/κ)' wherever κ ≠ 0.
inline std::vector<double> sigma_from_samples(std::span<const double> s,
                                              std::span<const double> kappa,
                                              std::span<const double> tau) {
  const auto dk = differentiate_samples(s, kappa);
  const auto dt = differentiate_samples(s, tau);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = std::hypot(kappa[i], tau[i]);
    out[i] = (kappa[i] * dt[i] - tau[i] * dk[i]) / (w * w * w);
  }
  return out;
}

}  // namespace detail

inline DirectionCoefficients coefficients(const DirectionKind& kind,
                                          const IndicatrixData& data, double t) {
  kind.validate();
  detail::require_on_grid(data, t);
  const Vec3 c = detail::coefficients_unchecked(kind, data, t);
  return {data.arclength_at(t), c.x(), c.y(), c.z()};
}

/// d(x, y, z)/ds_T, analytic for every kind.
inline Vec3 coefficient_rates(const DirectionKind& kind, const IndicatrixData& data,
                              double t) {
  kind.validate();
  detail::require_on_grid(data, t);
  return detail::coefficient_rates(kind, data.at(t),
                                   detail::coefficient_angle(kind, data, t));
}

inline Vec3 direction_field(const DirectionKind& kind, const IndicatrixData& data,
                            double t) {
  kind.validate();
  detail::require_on_grid(data, t);
  return detail::field(detail::coefficients_unchecked(kind, data, t), data.at(t));
}

/// Closed-form (κ_β, τ_β), signed as the curvature formulas write them.
inline CurvaturePair predicted_curvatures(const DirectionKind& kind,
                                          const IndicatrixData& data, double t) {
  kind.validate();
  detail::require_on_grid(data, t);
  return detail::predicted(kind, data.at(t), detail::coefficient_angle(kind, data, t));
}

struct DirectionSample {
  double t = 0.0;
  double s_T = 0.0;
  Vec3 point = Vec3::Zero();
  DirectionCoefficients coefficients;
  bool regular = false;             // β has a Frenet frame here
  FrenetApparatus frame;            // valid when regular
  double kappa = 0.0;               // measured, non-negative (NaN at zero speed)
  double signed_kappa = 0.0;        // ⟨κ N_β, target⟩; NaN when not regular
  double tau = 0.0;                 // measured; NaN when not regular
  double predicted_kappa = 0.0;
  double predicted_tau = 0.0;
  bool donor_bridged = false;
};

/// Sampled direction curve β. `curve` is β as a function of the donor
/// parameter t; its arc length is s_T.
struct DirectionCurve {
  DirectionKind kind;
  Vec3 beta0 = Vec3::Zero();
  std::shared_ptr<const IndicatrixData> donor;
  std::shared_ptr<const Curve3> curve;
  std::vector<DirectionSample> samples;

  [[nodiscard]] std::vector<double> params() const { return column(&DirectionSample::t); }
  [[nodiscard]] std::vector<double> s_values() const { return column(&DirectionSample::s_T); }
  [[nodiscard]] std::vector<double> kappa() const { return column(&DirectionSample::kappa); }
  [[nodiscard]] std::vector<double> signed_kappa() const {
    return column(&DirectionSample::signed_kappa);
  }
  [[nodiscard]] std::vector<double> tau() const { return column(&DirectionSample::tau); }
  [[nodiscard]] std::vector<Vec3> points() const {
    std::vector<Vec3> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.point);
    return out;
  }

  [[nodiscard]] bool all_regular() const {
    for (const auto& s : samples) {
      if (!s.regular) return false;
    }
    return true;
  }

  [[nodiscard]] double max_kappa() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.kappa);
    return m;
  }

  /// Measured profile in s_T. kappa is the measured (non-negative)
  /// curvature; f and σ use the signed curvature so that they stay smooth
  /// where the closed forms change sign. Requires every sample regular.
  [[nodiscard]] CurvatureProfile measured_profile() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!samples[i].regular) throw DegenerateFrameError("direction curve degenerates", i);
    }
    CurvatureProfile p;
    p.params = params();
    p.s_values = s_values();
    p.kappa = kappa();
    p.tau = tau();
    const auto sk = signed_kappa();
    p.f.resize(sk.size());
    for (std::size_t i = 0; i < sk.size(); ++i) p.f[i] = p.tau[i] / sk[i];
    p.sigma = detail::sigma_from_samples(p.s_values, sk, p.tau);
    return p;
  }

 private:
  std::vector<double> column(double DirectionSample::*field) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.*field);
    return out;
  }
};

/// β(t) = beta0 + ∫ X ds_T, integrated on the donor grid. Points where β has
/// no Frenet frame are recorded as non-regular rather than thrown.
inline DirectionCurve integrate_direction_curve(
    const DirectionKind& kind, std::shared_ptr<const IndicatrixData> data,
    const Vec3& beta0 = Vec3::Zero(), double eps_kappa = kEpsKappa) {
  kind.validate();
  if (!data) throw DomainError("direction curve needs indicatrix data");
  const IndicatrixData& d = *data;
  const Grid& grid = d.grid();
  auto velocity = [kind, data](double t) { return detail::velocity(kind, *data, t); };
  auto table = std::make_shared<const std::vector<Vec3>>(
      cumulative_gauss_legendre(velocity, grid));

  auto map = [kind, data, table, beta0, velocity](double t) -> Vec3 {
    const std::size_t k = data->grid().nearest(t);
    const double tk = data->grid().node(k);
    Vec3 p = beta0 + (*table)[k];
    if (t != tk) p += gauss_legendre(velocity, tk, t);
    return p;
  };
  Interval domain{grid.start(), grid.end()};
  auto beta = std::make_shared<const Curve3>(map, domain,
                                             Curve3::Derivatives{velocity, {}, {}},
                                             /*validate=*/false);

  DirectionCurve out;
  out.kind = kind;
  out.beta0 = beta0;
  out.donor = data;
  out.curve = beta;
  out.samples.resize(grid.count());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int target = kind.normal_index();
  for (std::size_t i = 0; i < grid.count(); ++i) {
    DirectionSample& s = out.samples[i];
    const DonorPoint& p = d.node(i);
    const double angle = detail::coefficient_angle(kind, d, p.t);
    const Vec3 c = detail::coefficient_vector(kind, angle);
    s.t = p.t;
    s.s_T = d.arclength()[i];
    s.point = beta0 + (*table)[i];
    s.coefficients = {s.s_T, c.x(), c.y(), c.z()};
    s.donor_bridged = p.bridged;
    const CurvaturePair pred = detail::predicted(kind, p, angle);
    s.predicted_kappa = pred.kappa;
    s.predicted_tau = pred.tau;
    try {
      s.kappa = curvature_magnitude(*beta, p.t);
    } catch (const DegenerateError&) {
      s.kappa = nan;
    }
    s.signed_kappa = nan;
    s.tau = nan;
    try {
      s.frame = frenet_apparatus(*beta, p.t, eps_kappa);
      s.regular = true;
      const std::array<Vec3, 3> frame_T{p.T_T, p.N_T, p.B_T};
      s.signed_kappa = s.frame.kappa * s.frame.N.dot(frame_T[target]);
      s.tau = s.frame.tau;
    } catch (const DegenerateError&) {
      s.regular = false;
    }
  }
  return out;
}

inline DirectionCurve integrate_direction_curve(const DirectionKind& kind,
                                                const Curve3& curve, const Grid& grid,
                                                const Vec3& beta0 = Vec3::Zero()) {
  return integrate_direction_curve(
      kind, std::make_shared<const IndicatrixData>(curve, grid), beta0);
}

/// Inverse curvature maps (κ_β, τ_β) -> (κ_T, τ_T). Derivatives in s are
/// taken over the samples. Quantities obtained through a square root are
/// recovered in magnitude only.
inline std::pair<std::vector<double>, std::vector<double>> recover_donor_curvatures(
    const DirectionKind& kind, std::span<const double> s_values,
    std::span<const double> kappa_beta, std::span<const double> tau_beta) {
  kind.validate();
  const std::size_t n = s_values.size();
  if (kappa_beta.size() != n || tau_beta.size() != n || n < 3) {
    throw DomainError("curvature profiles must have equal length >= 3");
  }
  std::vector<double> kT(n), tT(n);
  if (kind.family == DirectionFamily::bertrand) {
    const double c = std::cos(kind.theta), s = std::sin(kind.theta);
    for (std::size_t i = 0; i < n; ++i) {
      kT[i] = kappa_beta[i] * c + tau_beta[i] * s;
      tT[i] = -kappa_beta[i] * s + tau_beta[i] * c;
    }
    return {kT, tT};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(kappa_beta[i] * kappa_beta[i] + tau_beta[i] * tau_beta[i] > 1e-12)) {
      throw DegenerateError("direction curve curvatures vanish", i);
    }
  }
  // κ²/(κ²+τ²) (τ/κ)' written as (κτ' - τκ')/(κ²+τ²).
  const auto dk = differentiate_samples(s_values, kappa_beta);
  const auto dt = differentiate_samples(s_values, tau_beta);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = kappa_beta[i], t = tau_beta[i];
    const double w2 = k * k + t * t;
    const double angular = (k * dt[i] - t * dk[i]) / w2;
    if (kind.family == DirectionFamily::evolute) {
      kT[i] = std::sqrt(w2);
      tT[i] = angular;
    } else {
      kT[i] = angular;
      tT[i] = std::sqrt(w2);
    }
  }
  return {kT, tT};
}

struct ResidualReport {
  DirectionFamily checked = DirectionFamily::bertrand;
  std::array<double, 3> system{};      // max |equation residual| of the kind's system
  double decomposition = 0.0;          // max |LHS - κN_β| in the T_T, N_T, B_T frame
  double min_alignment = 1.0;          // min |⟨N_β, target⟩|
  double kappa_mismatch = 0.0;         // max ||κ_β measured| - |κ_β predicted||
  double tau_mismatch = 0.0;           // max ||τ_β measured| - |τ_β predicted||
  double signed_kappa_mismatch = 0.0;  // max |⟨κN_β, target⟩ - κ_β predicted|
  std::size_t checked_nodes = 0;

  [[nodiscard]] double max_system() const {
    return std::max({system[0], system[1], system[2]});
  }
  [[nodiscard]] bool aligned(double tol = 1e-4) const { return min_alignment >= 1.0 - tol; }
  [[nodiscard]] bool passes(double residual_tol = 1e-3, double align_tol = 1e-4) const {
    return max_system() <= residual_tol && aligned(align_tol) &&
           kappa_mismatch <= residual_tol && tau_mismatch <= residual_tol;
  }
};

/// Checks the direction curve against the differential system of `checked`:
/// with E = (x' - yκ_T, y' + xκ_T - zτ_T, z' + yτ_T) the component at the
/// checked kind's normal index must equal κ_β and the other two must vanish.
/// κ_β and N_β are measured on β; coefficient derivatives are the analytic
/// rates of the curve's own kind. Donor nodes bridged across an inflection
/// are skipped.
inline ResidualReport residual_check(DirectionFamily checked, const DirectionCurve& dc,
                                     const IndicatrixData& data) {
  ResidualReport r;
  r.checked = checked;
  r.min_alignment = std::numeric_limits<double>::infinity();
  DirectionKind probe = dc.kind;
  probe.family = checked;
  const int target = probe.normal_index();
  const int own_target = dc.kind.normal_index();
  for (std::size_t i = 0; i < dc.samples.size(); ++i) {
    const DirectionSample& s = dc.samples[i];
    if (s.donor_bridged) continue;
    if (!s.regular) throw DegenerateError("direction curve degenerates", i);
    const DonorPoint p = data.at(s.t);
    const double angle = detail::coefficient_angle(dc.kind, data, s.t);
    const Vec3 c = s.coefficients.vector();
    const Vec3 dc_ds = detail::coefficient_rates(dc.kind, p, angle);
    const Vec3 lhs{dc_ds.x() - c.y() * p.kappa_T,
                   dc_ds.y() + c.x() * p.kappa_T - c.z() * p.tau_T,
                   dc_ds.z() + c.y() * p.tau_T};
    const Vec3 K = s.frame.kappa * s.frame.N;
    const std::array<Vec3, 3> frame_T{p.T_T, p.N_T, p.B_T};
    const Vec3 K_local{K.dot(frame_T[0]), K.dot(frame_T[1]), K.dot(frame_T[2])};
    r.decomposition = std::max(r.decomposition, (lhs - K_local).cwiseAbs().maxCoeff());
    for (int j = 0; j < 3; ++j) {
      const double rhs = j == target ? K_local[j] : 0.0;
      r.system[j] = std::max(r.system[j], std::abs(lhs[j] - rhs));
    }
    r.min_alignment = std::min(r.min_alignment, std::abs(s.frame.N.dot(frame_T[target])));
    r.kappa_mismatch = std::max(
        r.kappa_mismatch, std::abs(s.frame.kappa - std::abs(s.predicted_kappa)));
    r.tau_mismatch = std::max(r.tau_mismatch,
                              std::abs(std::abs(s.tau) - std::abs(s.predicted_tau)));
    r.signed_kappa_mismatch = std::max(
        r.signed_kappa_mismatch, std::abs(K_local[own_target] - s.predicted_kappa));
    ++r.checked_nodes;
  }
  if (r.checked_nodes == 0) r.min_alignment = 0.0;
  return r;
}

inline ResidualReport residual_check(const DirectionCurve& dc) {
  return residual_check(dc.kind.family, dc, *dc.donor);
}

/// Indicatrix curvature profile in s_T from the closed forms at the nodes.
/// Requires no bridged nodes.
inline CurvatureProfile indicatrix_profile(const IndicatrixData& data) {
  CurvatureProfile p;
  const auto& nodes = data.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].bridged) throw DegenerateFrameError("indicatrix undefined", i);
    p.params.push_back(nodes[i].t);
    p.kappa.push_back(nodes[i].kappa_T);
    p.tau.push_back(nodes[i].tau_T);
    p.f.push_back(nodes[i].tau_T / nodes[i].kappa_T);
  }
  p.s_values = data.arclength();
  p.sigma = detail::sigma_from_samples(p.s_values, p.kappa, p.tau);
  return p;
}

/// Pointwise corollary checks tying β's curvatures back to the donor.
struct CorollaryReport {
  DirectionFamily family = DirectionFamily::bertrand;
  // evolute: max ||τ_β/κ_β| - |cot(angle)||; others 0
  double ratio_residual = 0.0;
  // evolute: max |σ_β - τ_T/κ_T|; bertrand: max |σ_β - σ_T|;
  // Mannheim: max ||τ_T/κ_T|·|σ_β| - 1| where σ_β ≠ 0
  double sigma_residual = 0.0;
  std::size_t checked_nodes = 0;
};

/// `margin` interior nodes at each end are excluded, where one-sided sample
/// derivatives are least accurate.
inline CorollaryReport corollary_check(const DirectionCurve& dc, std::size_t margin = 2) {
  const IndicatrixData& data = *dc.donor;
  const CurvatureProfile beta = dc.measured_profile();
  const CurvatureProfile donor = indicatrix_profile(data);
  CorollaryReport r;
  r.family = dc.kind.family;
  const std::size_t n = dc.samples.size();
  for (std::size_t i = margin; i + margin < n; ++i) {
    const DonorPoint& p = data.node(i);
    const double angle = detail::coefficient_angle(dc.kind, data, p.t);
    switch (dc.kind.family) {
      case DirectionFamily::evolute: {
        const double ratio = beta.f[i];
        const double cot = std::cos(angle) / std::sin(angle);
        if (std::isfinite(ratio) && std::isfinite(cot)) {
          r.ratio_residual = std::max(r.ratio_residual, std::abs(std::abs(ratio) - std::abs(cot)));
        }
        r.sigma_residual =
            std::max(r.sigma_residual, std::abs(beta.sigma[i] - p.tau_T / p.kappa_T));
        break;
      }
      case DirectionFamily::bertrand:
        r.sigma_residual = std::max(r.sigma_residual, std::abs(beta.sigma[i] - donor.sigma[i]));
        break;
      case DirectionFamily::mannheim:
        if (std::abs(beta.sigma[i]) > 1e-9) {
          r.sigma_residual = std::max(
              r.sigma_residual,
              std::abs(std::abs(p.tau_T / p.kappa_T) * std::abs(beta.sigma[i]) - 1.0));
        }
        break;
    }
    ++r.checked_nodes;
  }
  return r;
}

}  // namespace frenetlab
