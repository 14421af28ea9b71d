#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "frenetlab/errors.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab {

/// Curvature at or below this is treated as zero: N and B are undefined.
inline constexpr double kEpsKappa = 1e-8;
inline constexpr double kEpsSpeed = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double length() const noexcept { return hi - lo; }
  [[nodiscard]] bool contains(double t) const noexcept { return t >= lo && t <= hi; }
};

/// A parametric map I -> R^3 with derivative access up to order 3.
///
/// Analytic derivative suppliers are optional. A missing order k is estimated
/// by central differences of the highest supplied lower order (or of the map
/// itself), so an analytic first derivative still sharpens the numerical
/// second and third derivatives.
///
/// All suppliers must be side-effect free; a Curve3 is safe to share between
/// threads.
class Curve3 {
 public:
  using Function = std::function<Vec3(double)>;
  using Derivatives = std::array<Function, 3>;

  Curve3(Function map, Interval domain, Derivatives derivatives = {},
         bool validate = true)
      : map_(std::move(map)), domain_(domain), derivs_(std::move(derivatives)) {
    if (!map_) throw DomainError("curve map must be callable");
    if (!std::isfinite(domain_.lo) || !std::isfinite(domain_.hi) ||
        !(domain_.lo < domain_.hi)) {
      throw DomainError("curve domain must be a finite interval lo < hi");
    }
    if (validate) validate_suppliers();
  }

  [[nodiscard]] Vec3 operator()(double t) const { return map_(t); }
  [[nodiscard]] Vec3 position(double t) const { return map_(t); }
  [[nodiscard]] const Interval& domain() const noexcept { return domain_; }

  [[nodiscard]] bool has_analytic_derivative(int order) const noexcept {
    return order >= 1 && order <= 3 && static_cast<bool>(derivs_[order - 1]);
  }

  [[nodiscard]] Vec3 derivative(double t, int order) const {
    if (order < 1 || order > 3) throw DomainError("derivative order must be 1..3");
    if (derivs_[order - 1]) return derivs_[order - 1](t);
    for (int lower = order - 1; lower >= 1; --lower) {
      if (derivs_[lower - 1]) {
        return central_difference(derivs_[lower - 1], t, order - lower);
      }
    }
    return central_difference(map_, t, order);
  }

  /// Supplier for a given order, falling back to finite differences.
  [[nodiscard]] Function derivative_function(int order) const {
    return [self = *this, order](double t) { return self.derivative(t, order); };
  }

 private:
  void validate_suppliers() const {
    constexpr int kProbes = 16;
    for (int i = 0; i < kProbes; ++i) {
      const double t =
          domain_.lo + (i + 0.5) * domain_.length() / static_cast<double>(kProbes);
      if (!map_(t).allFinite()) {
        throw EvaluationError("curve map is not finite at t = " + std::to_string(t));
      }
      for (int order = 1; order <= 3; ++order) {
        if (!derivs_[order - 1]) continue;
        Vec3 reference;
        int lower = order - 1;
        while (lower >= 1 && !derivs_[lower - 1]) --lower;
        if (lower == 0) {
          reference = central_difference(map_, t, order);
        } else {
          reference = central_difference(derivs_[lower - 1], t, order - lower);
        }
        const Vec3 supplied = derivs_[order - 1](t);
        const double tol = 1e-4 * std::max(1.0, reference.norm());
        if (!supplied.allFinite() || (supplied - reference).norm() > tol) {
          throw EvaluationError("analytic derivative of order " +
                                std::to_string(order) +
                                " disagrees with finite differences at t = " +
                                std::to_string(t));
        }
      }
    }
  }

  Function map_;
  Interval domain_;
  Derivatives derivs_;
};

// ---------------------------------------------------------------------------
// Frenet apparatus
// ---------------------------------------------------------------------------

struct FrenetApparatus {
  double t = 0.0;
  Vec3 T = Vec3::Zero();
  Vec3 N = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  double kappa = 0.0;
  double tau = 0.0;
  double speed = 0.0;  // |dα/dt|; 1 for arc-length parametrizations
};

/// Curvature magnitude |α'×α''|/|α'|^3 without requiring a defined frame.
inline double curvature_magnitude(const Curve3& curve, double t) {
  const Vec3 a1 = curve.derivative(t, 1);
  const double v = a1.norm();
  if (v <= kEpsSpeed) {
    throw DegenerateSpeedError("zero speed at t = " + std::to_string(t));
  }
  return a1.cross(curve.derivative(t, 2)).norm() / (v * v * v);
}

/// Frenet frame, curvature and torsion for an arbitrary regular
/// parametrization. Torsion follows τ = -<B', N>, so right-handed helices have
/// positive torsion.
inline FrenetApparatus frenet_apparatus(const Curve3& curve, double t,
                                        double eps_kappa = kEpsKappa) {
  const Vec3 a1 = curve.derivative(t, 1);
  const double v = a1.norm();
  if (!(v > kEpsSpeed)) {
    throw DegenerateSpeedError("zero speed at t = " + std::to_string(t));
  }
  const Vec3 a2 = curve.derivative(t, 2);
  const Vec3 c = a1.cross(a2);
  const double cn = c.norm();
  const double kappa = cn / (v * v * v);
  if (!(kappa > eps_kappa)) {
    throw DegenerateFrameError("curvature " + std::to_string(kappa) +
                               " below threshold at t = " + std::to_string(t));
  }
  const Vec3 a3 = curve.derivative(t, 3);
  FrenetApparatus fa;
  fa.t = t;
  fa.speed = v;
  fa.T = a1 / v;
  fa.B = c / cn;
  fa.N = fa.B.cross(fa.T);
  fa.kappa = kappa;
  fa.tau = c.dot(a3) / (cn * cn);
  return fa;
}

/// Residuals of the Frenet system |T' - κN|, |N' + κT - τB|, |B' + τN| with
/// arc-length derivatives taken by central differences of the frame fields.
inline std::array<double, 3> frenet_system_residuals(const Curve3& curve,
                                                     double t,
                                                     double h = 1e-4) {
  const FrenetApparatus c = frenet_apparatus(curve, t);
  const FrenetApparatus p = frenet_apparatus(curve, t + h);
  const FrenetApparatus m = frenet_apparatus(curve, t - h);
  const double ds = 2.0 * h * c.speed;
  const Vec3 dT = (p.T - m.T) / ds;
  const Vec3 dN = (p.N - m.N) / ds;
  const Vec3 dB = (p.B - m.B) / ds;
  return {(dT - c.kappa * c.N).norm(),
          (dN + c.kappa * c.T - c.tau * c.B).norm(),
          (dB + c.tau * c.N).norm()};
}

// ---------------------------------------------------------------------------
// Arc length
// ---------------------------------------------------------------------------

/// Cumulative arc length s(t) over the grid; rates hold the speed |α'(t)|.
using ArcLengthTable = CumulativeTable;

inline ArcLengthTable arclength_table(const Curve3& curve, const Grid& grid) {
  ArcLengthTable table;
  table.parameters = grid.nodes();
  table.rates.resize(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double v = curve.derivative(table.parameters[i], 1).norm();
    if (!std::isfinite(v)) {
      throw EvaluationError("non-finite speed at node " + std::to_string(i));
    }
    if (!(v > kEpsSpeed)) throw DegenerateSpeedError("zero speed", i);
    table.rates[i] = v;
  }
  table.values = cumulative_simpson(table.rates, grid.step());
  for (std::size_t i = 1; i < table.values.size(); ++i) {
    if (!(table.values[i] > table.values[i - 1])) {
      throw DegenerateSpeedError("arc length is not strictly increasing", i);
    }
  }
  return table;
}

namespace detail {

// Parameter u(s) from an arc-length table, extended linearly past the ends so
// difference stencils centred at the boundary stay evaluable.
inline double parameter_at_arclength(const ArcLengthTable& table, double s) {
  const double total = table.values.back();
  if (s < 0.0) return table.parameters.front() + s / table.rates.front();
  if (s > total) return table.parameters.back() + (s - total) / table.rates.back();
  return invert_monotone(table, s);
}

// Derivatives of α(u(s)) for the arc-length map u with u' = 1/|α'(u)|.
struct ChainRuleFrame {
  Vec3 d1, d2, d3;
};

inline ChainRuleFrame arclength_chain_rule(const Curve3& curve, double u) {
  const Vec3 a1 = curve.derivative(u, 1);
  const Vec3 a2 = curve.derivative(u, 2);
  const Vec3 a3 = curve.derivative(u, 3);
  const double v = a1.norm();
  const double vt = a1.dot(a2) / v;
  const double vtt = (a2.squaredNorm() + a1.dot(a3) - vt * vt) / v;
  const double u1 = 1.0 / v;
  const double u2 = -vt / (v * v * v);
  const double u3 = -vtt / std::pow(v, 4) + 3.0 * vt * vt / std::pow(v, 5);
  return {a1 * u1, a2 * u1 * u1 + a1 * u2,
          a3 * u1 * u1 * u1 + 3.0 * a2 * u1 * u2 + a1 * u3};
}

}  // namespace detail

/// The same curve with arc length (measured from grid.start()) as parameter.
/// Positions compose the inverted arc-length table with the original map;
/// derivatives use the chain rule with the exact speed at u(s).
inline Curve3 reparametrize_by_arclength(const Curve3& curve, const Grid& grid) {
  auto table = std::make_shared<const ArcLengthTable>(arclength_table(curve, grid));
  const double total = table->values.back();
  auto map = [curve, table](double s) {
    return curve(detail::parameter_at_arclength(*table, s));
  };
  Curve3::Derivatives d;
  for (int order = 1; order <= 3; ++order) {
    d[order - 1] = [curve, table, order](double s) -> Vec3 {
      const auto f = detail::arclength_chain_rule(
          curve, detail::parameter_at_arclength(*table, s));
      return order == 1 ? f.d1 : order == 2 ? f.d2 : f.d3;
    };
  }
  return Curve3(map, {0.0, total}, std::move(d), false);
}

/// The unit tangent field t -> T(t) as a curve in its own right, sharing the
/// donor's parameter. Its first two derivatives are exact in terms of α', α''
/// and α'''; the third differences the second.
inline Curve3 unit_tangent_curve(const Curve3& curve) {
  auto map = [curve](double t) -> Vec3 {
    const Vec3 a = curve.derivative(t, 1);
    return a / a.norm();
  };
  auto first = [curve](double t) -> Vec3 {
    const Vec3 a = curve.derivative(t, 1);
    const Vec3 a1 = curve.derivative(t, 2);
    const double n = a.norm();
    const Vec3 T = a / n;
    return (a1 - T * T.dot(a1)) / n;
  };
  auto second = [curve](double t) -> Vec3 {
    const Vec3 a = curve.derivative(t, 1);
    const Vec3 a1 = curve.derivative(t, 2);
    const Vec3 a2 = curve.derivative(t, 3);
    const double n = a.norm();
    const Vec3 T = a / n;
    const double n1 = T.dot(a1);
    const Vec3 T1 = (a1 - T * n1) / n;
    const double n2 = T1.dot(a1) + T.dot(a2);
    return (a2 - 2.0 * T1 * n1 - T * n2) / n;
  };
  return Curve3(map, curve.domain(), {first, second, {}}, false);
}

// ---------------------------------------------------------------------------
// Curvature profile: κ, τ, f = τ/κ and σ sampled along a grid
// ---------------------------------------------------------------------------

struct CurvatureProfile {
  std::vector<double> params;    // grid parameter values
  std::vector<double> s_values;  // arc length from the grid start
  std::vector<double> kappa;
  std::vector<double> tau;
  std::vector<double> f;      // τ/κ
  std::vector<double> sigma;  // κ²/(κ²+τ²)^{3/2} (τ/κ)'
};

/// Samples κ, τ, f and σ. The derivative (τ/κ)' is taken by differencing the
/// sampled f array in the grid parameter and dividing by the speed, so any
/// regular parametrization is accepted.
inline CurvatureProfile curvature_profile(const Curve3& curve, const Grid& grid,
                                          double eps_kappa = kEpsKappa) {
  CurvatureProfile p;
  const std::size_t n = grid.count();
  p.params = grid.nodes();
  p.kappa.resize(n);
  p.tau.resize(n);
  p.f.resize(n);
  std::vector<double> speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    FrenetApparatus fa;
    try {
      fa = frenet_apparatus(curve, p.params[i], eps_kappa);
    } catch (const DegenerateFrameError&) {
      throw DegenerateFrameError("curvature vanishes while sampling profile", i);
    } catch (const DegenerateSpeedError&) {
      throw DegenerateSpeedError("zero speed while sampling profile", i);
    }
    p.kappa[i] = fa.kappa;
    p.tau[i] = fa.tau;
    p.f[i] = fa.tau / fa.kappa;
    speed[i] = fa.speed;
  }
  p.s_values = arclength_table(curve, grid).values;
  const auto df = differentiate_samples(p.params, p.f);
  p.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k2 = p.kappa[i] * p.kappa[i];
    const double w2 = k2 + p.tau[i] * p.tau[i];
    p.sigma[i] = k2 / (w2 * std::sqrt(w2)) * df[i] / speed[i];
  }
  return p;
}

}  // namespace frenetlab
