#pragma once

// Tangent indicatrix α_T = T of a space curve and its Frenet apparatus,
// expressed through f = τ/κ and σ of the donor curve:
//
//   T_T = N,  N_T = (-T + f B)/√(1+f²),  B_T = (f T + B)/√(1+f²),
//   κ_T = √(1+f²),  τ_T = σ √(1+f²),  ds_T = κ ds.
//
// Internally these are evaluated in the equivalent Darboux form
// N_T = (-κT + τB)/w, B_T = (τT + κB)/w, κ_T = w/κ with w = √(κ²+τ²), which
// stays finite when κ is allowed to carry a sign (see InflectionPolicy).

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "frenetlab/curve.hpp"
#include "frenetlab/errors.hpp"
#include "frenetlab/numerics.hpp"

namespace frenetlab {

struct IndicatrixApparatus {
  double s_T = 0.0;
  Vec3 T_T = Vec3::Zero();
  Vec3 N_T = Vec3::Zero();
  Vec3 B_T = Vec3::Zero();
  double kappa_T = 0.0;
  double tau_T = 0.0;
};

/// How sampling treats points where the donor curvature vanishes.
///
/// `reject` fails with DegenerateFrameError. `bridge` carries an oriented
/// frame across isolated inflection points: N keeps its direction by
/// continuity, κ changes sign, and quantities at the inflection itself are the
/// symmetric limit of their neighbours. The oriented frame is the analytic
/// continuation of the Frenet frame; where κ > 0 the two coincide.
enum class InflectionPolicy { reject, bridge };

/// Everything known about the donor curve and its indicatrix at one
/// parameter value, on the oriented branch.
struct DonorPoint {
  double t = 0.0;
  FrenetApparatus frame;  // frame.kappa is signed on the oriented branch
  double f = 0.0;
  double sigma = 0.0;
  Vec3 T_T = Vec3::Zero();
  Vec3 N_T = Vec3::Zero();
  Vec3 B_T = Vec3::Zero();
  double kappa_T = 0.0;  // NaN at a bridged inflection
  double tau_T = 0.0;    // NaN at a bridged inflection
  double arclength_rate = 0.0;  // ds_T/dt = κ|α'|
  double torsion_rate = 0.0;    // τ_T ds_T/dt
  double curvature_rate = 0.0;  // κ_T ds_T/dt = w|α'|
  int orientation = 1;
  bool bridged = false;

  [[nodiscard]] DonorPoint flipped() const {
    DonorPoint p = *this;
    p.frame.N = -frame.N;
    p.frame.B = -frame.B;
    p.frame.kappa = -frame.kappa;
    p.f = -f;
    p.sigma = -sigma;
    p.T_T = -T_T;
    p.N_T = -N_T;
    p.kappa_T = -kappa_T;
    p.arclength_rate = -arclength_rate;
    p.torsion_rate = -torsion_rate;
    p.orientation = -orientation;
    return p;
  }

  [[nodiscard]] IndicatrixApparatus apparatus(double s_T) const {
    return {s_T, T_T, N_T, B_T, kappa_T, tau_T};
  }
};

inline constexpr double kInflectionGuard = 1e-4;

namespace detail {

struct CurvatureTorsion {
  double kappa;
  double tau;
};

inline CurvatureTorsion kappa_tau(const Curve3& curve, double t, double eps) {
  const auto fa = frenet_apparatus(curve, t, eps);
  return {fa.kappa, fa.tau};
}

/// Donor point with the geometric (κ > 0) frame. σ = (κτ' - τκ')/w³ is the
/// expanded form of κ²/w³ (τ/κ)'; κ' and τ' are central differences of the
/// pointwise curvature functions.
inline DonorPoint geometric_donor_point(const Curve3& curve, double t,
                                        double eps_kappa) {
  DonorPoint p;
  p.t = t;
  p.frame = frenet_apparatus(curve, t, eps_kappa);
  const double h = default_step(t, 1);
  const auto plus = kappa_tau(curve, t + h, eps_kappa);
  const auto minus = kappa_tau(curve, t - h, eps_kappa);
  const double v = p.frame.speed;
  const double dk = (plus.kappa - minus.kappa) / (2.0 * h) / v;
  const double dtau = (plus.tau - minus.tau) / (2.0 * h) / v;
  const double k = p.frame.kappa;
  const double tau = p.frame.tau;
  const double w = std::hypot(k, tau);
  p.f = tau / k;
  p.sigma = (k * dtau - tau * dk) / (w * w * w);
  p.T_T = p.frame.N;
  p.N_T = (-k * p.frame.T + tau * p.frame.B) / w;
  p.B_T = (tau * p.frame.T + k * p.frame.B) / w;
  p.kappa_T = w / k;
  p.tau_T = p.sigma * w / k;
  p.arclength_rate = k * v;
  p.torsion_rate = p.sigma * w * v;
  p.curvature_rate = w * v;
  return p;
}

inline DonorPoint aligned(DonorPoint p, const Vec3& reference_normal) {
  return p.frame.N.dot(reference_normal) < 0.0 ? p.flipped() : p;
}

inline DonorPoint bridged_donor_point(const Curve3& curve, double t, double delta,
                                      double eps_kappa,
                                      const Vec3* reference_normal) {
  DonorPoint m = geometric_donor_point(curve, t - delta, eps_kappa);
  if (reference_normal) m = aligned(m, *reference_normal);
  const DonorPoint pl = aligned(geometric_donor_point(curve, t + delta, eps_kappa),
                                m.frame.N);
  auto mid = [](const Vec3& a, const Vec3& b) { return Vec3((a + b).normalized()); };
  DonorPoint p;
  p.t = t;
  p.bridged = true;
  p.orientation = m.orientation;
  p.frame.t = t;
  p.frame.T = mid(m.frame.T, pl.frame.T);
  p.frame.N = mid(m.frame.N, pl.frame.N);
  p.frame.B = mid(m.frame.B, pl.frame.B);
  p.frame.kappa = 0.5 * (m.frame.kappa + pl.frame.kappa);
  p.frame.tau = 0.5 * (m.frame.tau + pl.frame.tau);
  p.frame.speed = 0.5 * (m.frame.speed + pl.frame.speed);
  p.sigma = 0.5 * (m.sigma + pl.sigma);
  p.f = std::numeric_limits<double>::quiet_NaN();
  p.T_T = p.frame.N;
  p.N_T = mid(m.N_T, pl.N_T);
  p.B_T = mid(m.B_T, pl.B_T);
  p.kappa_T = std::numeric_limits<double>::quiet_NaN();
  p.tau_T = std::numeric_limits<double>::quiet_NaN();
  p.arclength_rate = 0.5 * (m.arclength_rate + pl.arclength_rate);
  p.torsion_rate = 0.5 * (m.torsion_rate + pl.torsion_rate);
  p.curvature_rate = 0.5 * (m.curvature_rate + pl.curvature_rate);
  return p;
}

}  // namespace detail

/// Sampled donor curve plus its indicatrix apparatus on a grid of the donor's
/// own parameter, with running integrals of ds_T, τ_T ds_T and κ_T ds_T.
/// s_T is measured from the grid start.
class IndicatrixData {
 public:
  IndicatrixData(Curve3 curve, Grid grid,
                 InflectionPolicy policy = InflectionPolicy::reject,
                 double eps_kappa = kEpsKappa)
      : curve_(std::move(curve)),
        grid_(grid),
        policy_(policy),
        eps_kappa_(eps_kappa),
        delta_(std::min(1e-3, grid.step() / 8.0)) {
    nodes_.reserve(grid_.count());
    for (std::size_t i = 0; i < grid_.count(); ++i) {
      const double t = grid_.node(i);
      try {
        nodes_.push_back(evaluate(t, i == 0 ? nullptr : &nodes_.back().frame.N));
      } catch (const DegenerateFrameError&) {
        throw DegenerateFrameError("donor curvature vanishes", i);
      } catch (const DegenerateSpeedError&) {
        throw DegenerateSpeedError("donor speed vanishes", i);
      }
    }
    arclength_ = cumulative_gauss_legendre(
        [this](double t) { return at(t).arclength_rate; }, grid_);
    torsion_integral_ = cumulative_gauss_legendre(
        [this](double t) { return at(t).torsion_rate; }, grid_);
    curvature_integral_ = cumulative_gauss_legendre(
        [this](double t) { return at(t).curvature_rate; }, grid_);
  }

  [[nodiscard]] const Curve3& curve() const noexcept { return curve_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] InflectionPolicy policy() const noexcept { return policy_; }
  [[nodiscard]] const std::vector<DonorPoint>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const DonorPoint& node(std::size_t i) const { return nodes_.at(i); }

  [[nodiscard]] const std::vector<double>& arclength() const noexcept { return arclength_; }
  [[nodiscard]] const std::vector<double>& torsion_integral() const noexcept {
    return torsion_integral_;
  }
  [[nodiscard]] const std::vector<double>& curvature_integral() const noexcept {
    return curvature_integral_;
  }

  [[nodiscard]] bool has_bridged_nodes() const {
    for (const auto& p : nodes_) {
      if (p.bridged) return true;
    }
    return false;
  }

  [[nodiscard]] IndicatrixApparatus apparatus(std::size_t i) const {
    return nodes_.at(i).apparatus(arclength_.at(i));
  }

  /// Donor point at any parameter, oriented consistently with the nearest
  /// node. Evaluation a little outside the grid is allowed so that difference
  /// stencils centred on the end nodes work.
  [[nodiscard]] DonorPoint at(double t) const {
    const std::size_t k = grid_.nearest(t);
    if (k < nodes_.size() && t == nodes_[k].t) return nodes_[k];
    const Vec3* ref = k < nodes_.size() ? &nodes_[k].frame.N : nullptr;
    return evaluate(t, ref);
  }

  [[nodiscard]] double arclength_at(double t) const {
    return integral_at(arclength_, t, &DonorPoint::arclength_rate);
  }
  [[nodiscard]] double torsion_integral_at(double t) const {
    return integral_at(torsion_integral_, t, &DonorPoint::torsion_rate);
  }
  [[nodiscard]] double curvature_integral_at(double t) const {
    return integral_at(curvature_integral_, t, &DonorPoint::curvature_rate);
  }

 private:
  DonorPoint evaluate(double t, const Vec3* reference_normal) const {
    if (policy_ == InflectionPolicy::reject) {
      return detail::geometric_donor_point(curve_, t, eps_kappa_);
    }
    if (curvature_magnitude(curve_, t) < kInflectionGuard) {
      return detail::bridged_donor_point(curve_, t, delta_, eps_kappa_,
                                         reference_normal);
    }
    DonorPoint p = detail::geometric_donor_point(curve_, t, eps_kappa_);
    return reference_normal ? detail::aligned(p, *reference_normal) : p;
  }

  double integral_at(const std::vector<double>& table, double t,
                     double DonorPoint::*rate) const {
    const std::size_t k = grid_.nearest(t);
    const double tk = grid_.node(k);
    if (t == tk) return table[k];
    return table[k] +
           gauss_legendre([this, rate](double u) { return at(u).*rate; }, tk, t);
  }

  Curve3 curve_;
  Grid grid_;
  InflectionPolicy policy_;
  double eps_kappa_;
  double delta_;
  std::vector<DonorPoint> nodes_;
  std::vector<double> arclength_;
  std::vector<double> torsion_integral_;
  std::vector<double> curvature_integral_;
};

/// Closed-form indicatrix apparatus at parameter t of the donor curve, with
/// s_T measured from the start of the curve's domain.
inline IndicatrixApparatus indicatrix_apparatus(const Curve3& curve, double t,
                                                double eps_kappa = kEpsKappa) {
  const DonorPoint p = detail::geometric_donor_point(curve, t, eps_kappa);
  const double origin = curve.domain().lo;
  double s_T = 0.0;
  if (t != origin) {
    const double lo = std::min(origin, t), hi = std::max(origin, t);
    const auto table = cumulative_simpson(
        [&curve](double u) {
          return curvature_magnitude(curve, u) * curve.derivative(u, 1).norm();
        },
        Grid(lo, hi, 257));
    s_T = t > origin ? table.total() : -table.total();
  }
  return p.apparatus(s_T);
}

/// The spherical curve s_T -> T(s(s_T)) parametrized by its own arc length,
/// s_T = 0 at the grid start.
inline Curve3 tangent_indicatrix(const Curve3& curve, const Grid& grid,
                                 double eps_kappa = kEpsKappa) {
  for (std::size_t i = 0; i < grid.count(); ++i) {
    if (!(curvature_magnitude(curve, grid.node(i)) > eps_kappa)) {
      throw DegenerateFrameError("donor curvature vanishes", i);
    }
  }
  return reparametrize_by_arclength(unit_tangent_curve(curve), grid);
}

/// Residuals of the indicatrix Frenet system
/// |T_T' - κ_T N_T|, |N_T' + κ_T T_T - τ_T B_T|, |B_T' + τ_T N_T|
/// (derivatives in s_T, by central differences of the closed-form frame).
inline std::array<double, 3> indicatrix_system_residuals(const IndicatrixData& data,
                                                         double t,
                                                         double h = 1e-4) {
  const DonorPoint c = data.at(t);
  const DonorPoint p = data.at(t + h);
  const DonorPoint m = data.at(t - h);
  const double ds = 2.0 * h * c.arclength_rate;
  const Vec3 dT = (p.T_T - m.T_T) / ds;
  const Vec3 dN = (p.N_T - m.N_T) / ds;
  const Vec3 dB = (p.B_T - m.B_T) / ds;
  return {(dT - c.kappa_T * c.N_T).norm(),
          (dN + c.kappa_T * c.T_T - c.tau_T * c.B_T).norm(),
          (dB + c.tau_T * c.N_T).norm()};
}

}  // namespace frenetlab
