#pragma once

// Built-in analytic curves and reference closed-form direction curves used as
// oracles, plus the constant-matching protocol that compares a numerically
// integrated direction curve against a closed form with free constants.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frenetlab/curve.hpp"
#include "frenetlab/direction.hpp"
#include "frenetlab/errors.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab {

/// One scalar component Σ a sin(ω t + φ) + p0 + p1 t + p2 t² + p3 t³ with
/// exact derivatives of every order.
struct TrigSeries {
  struct Wave {
    double amplitude;
    double frequency;
    double phase;
  };
  std::vector<Wave> waves;
  std::array<double, 4> poly{};

  static TrigSeries sine(double a, double w, double phase = 0.0) {
    return TrigSeries{{{a, w, phase}}, {}};
  }
  static TrigSeries cosine(double a, double w) {
    return sine(a, w, std::numbers::pi / 2.0);
  }
  static TrigSeries polynomial(std::array<double, 4> p) { return TrigSeries{{}, p}; }

  TrigSeries& operator+=(const TrigSeries& o) {
    waves.insert(waves.end(), o.waves.begin(), o.waves.end());
    for (std::size_t i = 0; i < 4; ++i) poly[i] += o.poly[i];
    return *this;
  }
  friend TrigSeries operator+(TrigSeries a, const TrigSeries& b) { return a += b; }

  [[nodiscard]] double operator()(double t, int order = 0) const {
    double v = 0.0;
    for (const auto& w : waves) {
      v += w.amplitude * std::pow(w.frequency, order) *
           std::sin(w.frequency * t + w.phase + order * std::numbers::pi / 2.0);
    }
    // d^order/dt^order of Σ p_k t^k
    for (int k = order; k < 4; ++k) {
      double c = poly[k];
      for (int j = 0; j < order; ++j) c *= k - j;
      v += c * std::pow(t, k - order);
    }
    return v;
  }
};

inline Curve3 series_curve(std::array<TrigSeries, 3> s, Interval domain) {
  auto order = [s](int k) {
    return [s, k](double t) { return Vec3(s[0](t, k), s[1](t, k), s[2](t, k)); };
  };
  return Curve3(order(0), domain, {order(1), order(2), order(3)});
}

struct ReferenceConstants {
  double theta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::array<double, 9> c{};
};

/// Parameter in which the reference closed forms are written.
enum class ReferenceParameter { indicatrix_arclength, donor_parameter };

struct CatalogEntry {
  std::string id;
  Curve3 curve;
  std::string notes;
  Interval figure_domain;   // domain drawn by `reproduce`
  Interval regular_domain;  // κ > 0 throughout
  bool needs_bridge = false;  // figure domain crosses inflection points
  bool degenerate_frame = false;
  ReferenceParameter reference_parameter = ReferenceParameter::donor_parameter;
  std::optional<ReferenceConstants> figure_constants;
  std::function<Vec3(DirectionFamily, const ReferenceConstants&, double)> reference_direction;
  std::function<Vec3(double)> reference_indicatrix;

  [[nodiscard]] bool has_references() const { return static_cast<bool>(reference_direction); }

  [[nodiscard]] Curve3 reference_direction_curve(DirectionFamily family,
                                                 const ReferenceConstants& k,
                                                 Interval domain) const {
    if (!reference_direction) throw DomainError("no reference curves for " + id);
    auto f = reference_direction;
    return Curve3([f, family, k](double u) { return f(family, k, u); }, domain, {}, false);
  }
};

/// Direction kind corresponding to a set of reference constants.
inline DirectionKind figure_kind(DirectionFamily family, const ReferenceConstants& k) {
  switch (family) {
    case DirectionFamily::evolute: return DirectionKind::evolute(k.theta1);
    case DirectionFamily::bertrand: return DirectionKind::bertrand(k.theta);
    case DirectionFamily::mannheim: return DirectionKind::mannheim(k.theta2);
  }
  return {};
}

inline CatalogEntry helix_example() {
  const double r = std::numbers::sqrt2;
  const double pi = std::numbers::pi;
  // α(s) = (cos(s/√2), sin(s/√2), s/√2); s_T = s/2.
  Curve3 curve = series_curve({TrigSeries::cosine(1.0, 1.0 / r),
                               TrigSeries::sine(1.0, 1.0 / r),
                               TrigSeries::polynomial({0.0, 1.0 / r, 0.0, 0.0})},
                              {0.0, 4.0 * pi});
  ReferenceConstants fig;
  fig.theta = pi / 3.0;
  fig.theta1 = pi / 4.0;
  fig.theta2 = pi / 4.0;
  auto beta = [r](DirectionFamily family, const ReferenceConstants& k, double s) -> Vec3 {
    const auto& c = k.c;
    switch (family) {
      case DirectionFamily::evolute:
        return {-(1.0 / r) * std::sin(k.theta1) * std::cos(r * s) + c[0],
                -(1.0 / r) * std::sin(k.theta1) * std::sin(r * s) + c[1],
                s * std::cos(k.theta1) + c[2]};
      case DirectionFamily::bertrand:
        return {-(1.0 / r) * std::cos(k.theta) * std::sin(r * s) + c[3],
                (1.0 / r) * std::cos(k.theta) * std::cos(r * s) + c[4],
                s * std::sin(k.theta) + c[5]};
      case DirectionFamily::mannheim:
        return {-s * std::sin(k.theta2) + c[6], -s * std::cos(k.theta2) + c[7], c[8]};
    }
    return Vec3::Zero();
  };
  auto indicatrix = [r](double s) -> Vec3 {
    return {-(1.0 / r) * std::sin(r * s), (1.0 / r) * std::cos(r * s), 1.0 / r};
  };
  return CatalogEntry{"ex7.1",
                      std::move(curve),
                      "circular helix (cos(s/√2), sin(s/√2), s/√2) in arc length; "
                      "closed forms in s_T = s/2",
                      {0.0, 4.0 * pi},
                      {0.0, 4.0 * pi},
                      false,
                      false,
                      ReferenceParameter::indicatrix_arclength,
                      fig,
                      beta,
                      indicatrix};
}

inline CatalogEntry trig_sum_example() {
  const double r = std::numbers::sqrt2;
  const double pi = std::numbers::pi;
  // Product-to-sum form of
  // ((3/√2) sin(√2t) cos t - 2 sin t cos(√2t),
  //  (3/√2) cos(√2t) cos t + 2 sin t sin(√2t), -(1/√2) cos t).
  const double a = 3.0 / (2.0 * r);
  const double p = r + 1.0, m = r - 1.0;
  Curve3 curve = series_curve(
      {TrigSeries::sine(a - 1.0, p) + TrigSeries::sine(a + 1.0, m),
       TrigSeries::cosine(a - 1.0, p) + TrigSeries::cosine(a + 1.0, m),
       TrigSeries::cosine(-1.0 / r, 1.0)},
      {0.0, 2.0 * pi});
  ReferenceConstants fig;
  fig.theta = pi / 3.0;
  fig.theta1 = pi / 3.0;
  fig.theta2 = 0.0;
  auto beta = [r](DirectionFamily family, const ReferenceConstants& k, double t) -> Vec3 {
    const auto& c = k.c;
    switch (family) {
      case DirectionFamily::evolute: {
        const double q = k.theta1;
        return {(-(-1.0 + r) * std::cos(q - r * t) + (1.0 + r) * std::cos(q + r * t) -
                 (3.0 + 2.0 * r) * std::cos(q + (-2.0 + r) * t) +
                 (-3.0 + 2.0 * r) * std::cos(q - (2.0 + r) * t)) / 8.0 + c[0],
                (-(-1.0 + r) * std::sin(q - r * t) - (1.0 + r) * std::sin(q + r * t) +
                 (3.0 + 2.0 * r) * std::sin(q + (-2.0 + r) * t) +
                 (-3.0 + 2.0 * r) * std::sin(q - (2.0 + r) * t)) / 8.0 + c[1],
                (-2.0 * t * std::cos(q) + std::sin(q - 2.0 * t)) / (4.0 * r) + c[2]};
      }
      case DirectionFamily::bertrand: {
        const double cs = std::cos(k.theta) + std::sin(k.theta);
        return {0.5 * (2.0 * std::cos(t) * std::cos(r * t) + r * std::sin(t) * std::sin(r * t)) * cs + c[3],
                0.5 * (r * std::cos(r * t) * std::sin(t) - 2.0 * std::cos(t) * std::sin(r * t)) * cs + c[4],
                (1.0 / r) * std::sin(t) * (std::cos(k.theta) - std::sin(k.theta)) + c[5]};
      }
      case DirectionFamily::mannheim: {
        const double q = k.theta2;
        return {((1.0 + r) * std::sin(q - r * t) - (-1.0 + r) * std::sin(q + r * t) -
                 (3.0 + 2.0 * r) * std::sin(q + (2.0 - r) * t) +
                 (-3.0 + 2.0 * r) * std::sin(q + (2.0 + r) * t)) / 8.0 + c[6],
                (-(1.0 + r) * std::cos(q - r * t) - (-1.0 + r) * std::cos(q + r * t) +
                 (3.0 + 2.0 * r) * std::cos(q + (2.0 - r) * t) +
                 (-3.0 + 2.0 * r) * std::cos(q + (2.0 + r) * t)) / 8.0 + c[7],
                -(std::cos(q + 2.0 * t) - 2.0 * t * std::sin(q)) / (4.0 * r) + c[8]};
      }
    }
    return Vec3::Zero();
  };
  auto indicatrix = [r](double t) -> Vec3 {
    return {std::cos(r * t) * std::cos(t) + (1.0 / r) * std::sin(r * t) * std::sin(t),
            -std::sin(r * t) * std::cos(t) + (1.0 / r) * std::cos(r * t) * std::sin(t),
            (1.0 / r) * std::sin(t)};
  };
  return CatalogEntry{"ex7.2",
                      std::move(curve),
                      "unit-speed curve with κ = |cos t|, inflections at t = π/2, 3π/2; "
                      "closed forms in t",
                      {0.0, 2.0 * pi},
                      {0.1, 0.9},
                      true,
                      false,
                      ReferenceParameter::donor_parameter,
                      fig,
                      beta,
                      indicatrix};
}

/// Entry without reference closed forms, regular on its whole domain.
inline CatalogEntry plain_entry(std::string id, Curve3 curve, std::string notes) {
  const Interval d = curve.domain();
  CatalogEntry e{std::move(id), std::move(curve), std::move(notes), d, d, false, false,
                 ReferenceParameter::donor_parameter, std::nullopt, {}, {}};
  return e;
}

inline CatalogEntry circle_entry() {
  const double pi = std::numbers::pi;
  return plain_entry("circle",
                     series_curve({TrigSeries::cosine(1.0, 1.0), TrigSeries::sine(1.0, 1.0),
                                   TrigSeries::polynomial({})},
                                  {0.0, 2.0 * pi}),
                     "planar unit circle, κ = 1, τ = 0");
}

inline CatalogEntry line_entry() {
  CatalogEntry e = plain_entry("line",
                               series_curve({TrigSeries::polynomial({0.0, 1.0, 0.0, 0.0}),
                                             TrigSeries::polynomial({}),
                                             TrigSeries::polynomial({})},
                                            {0.0, 1.0}),
                               "straight line (t, 0, 0); no Frenet frame");
  e.degenerate_frame = true;
  return e;
}

inline CatalogEntry twisted_cubic_entry() {
  return plain_entry("twisted-cubic",
                     series_curve({TrigSeries::polynomial({0.0, 1.0, 0.0, 0.0}),
                                   TrigSeries::polynomial({0.0, 0.0, 1.0, 0.0}),
                                   TrigSeries::polynomial({0.0, 0.0, 0.0, 1.0})},
                                  {-1.0, 1.0}),
                     "twisted cubic (t, t², t³); neither helix nor slant helix");
}

/// Unit-speed slant helix with κ = (4/3)|cos t| and σ ≡ -3/4: its principal
/// normal keeps a constant angle with the z axis.
inline CatalogEntry slant_helix_entry() {
  Curve3 curve = series_curve(
      {TrigSeries::sine(6.0 / 5.0, 2.0 / 3.0) + TrigSeries::sine(3.0 / 40.0, 8.0 / 3.0),
       TrigSeries::cosine(6.0 / 5.0, 2.0 / 3.0) + TrigSeries::cosine(3.0 / 40.0, 8.0 / 3.0),
       TrigSeries::cosine(-4.0 / 5.0, 1.0)},
      {-1.1, 1.1});
  return plain_entry("slant-helix", std::move(curve),
                     "unit-speed slant helix, σ = -3/4; inflections at t = ±π/2 lie "
                     "outside the domain");
}

/// Direction kind used when checking an entry's theorems. The examples use
/// their figure constants. Other curves get θ = π/3 and phases that
/// centre the coefficient angle where κ_β stays away from zero: sin Φ about
/// π/2 (evolute), cos Ψ about 0 (Mannheim).
inline DirectionKind pairing_kind(const CatalogEntry& entry, DirectionFamily family,
                                  const IndicatrixData& data) {
  if (entry.figure_constants) return figure_kind(family, *entry.figure_constants);
  const double pi = std::numbers::pi;
  auto mid = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*lo + *hi);
  };
  switch (family) {
    case DirectionFamily::evolute:
      return DirectionKind::evolute(pi / 2.0 - mid(data.torsion_integral()));
    case DirectionFamily::bertrand: return DirectionKind::bertrand(pi / 3.0);
    case DirectionFamily::mannheim:
      return DirectionKind::mannheim(-mid(data.curvature_integral()));
  }
  return {};
}

inline std::vector<CatalogEntry> standard_curves() {
  return {circle_entry(), line_entry(), twisted_cubic_entry(), slant_helix_entry()};
}

inline std::vector<CatalogEntry> all_entries() {
  std::vector<CatalogEntry> out{helix_example(), trig_sum_example()};
  for (auto& e : standard_curves()) out.push_back(std::move(e));
  return out;
}

inline std::vector<std::string> catalog_ids() {
  return {"ex7.1", "ex7.2", "circle", "line", "twisted-cubic", "slant-helix"};
}

inline std::optional<CatalogEntry> find_entry(const std::string& id) {
  if (id == "ex7.1") return helix_example();
  if (id == "ex7.2") return trig_sum_example();
  if (id == "circle") return circle_entry();
  if (id == "line") return line_entry();
  if (id == "twisted-cubic") return twisted_cubic_entry();
  if (id == "slant-helix") return slant_helix_entry();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Constant matching
// ---------------------------------------------------------------------------

struct ReferenceMatch {
  double sup_error = 0.0;
  std::array<double, 3> component_error{};
  double fitted_phase = 0.0;   // θ₁ (evolute), θ₂ (Mannheim) or θ (Bertrand, not fitted)
  double nominal_phase = 0.0;  // value from the supplied constants
  Vec3 offset = Vec3::Zero();  // fitted integration constants c_i
};

namespace detail {

inline double& phase_slot(DirectionFamily family, ReferenceConstants& k) {
  switch (family) {
    case DirectionFamily::evolute: return k.theta1;
    case DirectionFamily::mannheim: return k.theta2;
    case DirectionFamily::bertrand: return k.theta;
  }
  return k.theta;
}

inline ReferenceMatch evaluate_match(const CatalogEntry& entry, DirectionFamily family,
                                     ReferenceConstants k, std::span<const double> params,
                                     std::span<const Vec3> points) {
  const std::size_t base = 3 * static_cast<std::size_t>(
                                   family == DirectionFamily::evolute    ? 0
                                   : family == DirectionFamily::bertrand ? 1
                                                                         : 2);
  for (std::size_t j = 0; j < 3; ++j) k.c[base + j] = 0.0;
  ReferenceMatch m;
  m.offset = points[0] - entry.reference_direction(family, k, params[0]);
  for (std::size_t j = 0; j < 3; ++j) k.c[base + j] = m.offset[j];
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Vec3 d = (entry.reference_direction(family, k, params[i]) - points[i]).cwiseAbs();
    for (int j = 0; j < 3; ++j) {
      m.component_error[j] = std::max(m.component_error[j], d[j]);
    }
  }
  m.sup_error = std::max({m.component_error[0], m.component_error[1], m.component_error[2]});
  m.fitted_phase = phase_slot(family, k);
  return m;
}

}  // namespace detail

/// Compares sampled β against the entry's reference closed form. The constants
/// c_i are solved from the left-endpoint value; for the evolute and Mannheim
/// kinds the free phase (θ₁ or θ₂) is then fitted by minimizing the sup-norm
/// error, starting from the value in `constants`. `params` must be in the
/// entry's reference parameter.
inline ReferenceMatch match_reference(const CatalogEntry& entry, DirectionFamily family,
                                      const ReferenceConstants& constants,
                                      std::span<const double> params,
                                      std::span<const Vec3> points, bool fit_phase = true) {
  if (!entry.has_references()) throw DomainError("no reference curves for " + entry.id);
  if (params.empty() || params.size() != points.size()) {
    throw DomainError("parameter and point arrays must be non-empty and of equal length");
  }
  ReferenceConstants k = constants;
  const double nominal = detail::phase_slot(family, k);
  auto error_at = [&](double phase) {
    ReferenceConstants kk = k;
    detail::phase_slot(family, kk) = phase;
    return detail::evaluate_match(entry, family, kk, params, points);
  };
  ReferenceMatch best = error_at(nominal);
  if (fit_phase && family != DirectionFamily::bertrand) {
    constexpr int kScan = 720;
    const double pi = std::numbers::pi;
    const double step = 2.0 * pi / kScan;
    double best_phase = nominal;
    double best_err = best.sup_error;
    for (int i = -kScan / 2; i <= kScan / 2; ++i) {
      const double ph = nominal + i * step;
      const double e = error_at(ph).sup_error;
      if (e < best_err) {
        best_err = e;
        best_phase = ph;
      }
    }
    // Golden-section refinement on the bracketing scan cell.
    double a = best_phase - step, b = best_phase + step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = error_at(x1).sup_error, f2 = error_at(x2).sup_error;
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - g * (b - a); f1 = error_at(x1).sup_error;
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + g * (b - a); f2 = error_at(x2).sup_error;
      }
    }
    const ReferenceMatch refined = error_at(f1 < f2 ? x1 : x2);
    if (refined.sup_error < best.sup_error) best = refined;
  }
  best.nominal_phase = nominal;
  return best;
}

}  // namespace frenetlab
