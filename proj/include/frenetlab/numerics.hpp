#pragma once

// Shared numerical kernels: finite differences, cumulative quadrature,
// monotone-table inversion and the constancy statistic used to decide
// whether a sampled function "is constant".

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frenetlab/errors.hpp"

namespace frenetlab {

using Vec3 = Eigen::Vector3d;

inline constexpr double kConstancyEpsAbs = 1e-9;
inline constexpr double kDefaultConstancyTol = 1e-4;

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Uniform sampling of [start, end]. The node count is rounded up to the next
/// odd integer so composite Simpson panels tile the grid exactly.
class Grid {
 public:
  Grid(double start, double end, std::size_t count)
      : start_(start), end_(end), count_(count % 2 == 0 ? count + 1 : count) {
    if (!std::isfinite(start) || !std::isfinite(end) || !(start < end)) {
      throw DomainError("grid requires finite start < end");
    }
    if (count < 3) {
      throw DomainError("grid requires at least 3 nodes");
    }
  }

  [[nodiscard]] double start() const noexcept { return start_; }
  [[nodiscard]] double end() const noexcept { return end_; }
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] double step() const noexcept {
    return (end_ - start_) / static_cast<double>(count_ - 1);
  }

  /// The last node is exactly `end`, not start + (count-1)*step.
  [[nodiscard]] double node(std::size_t i) const noexcept {
    if (i + 1 == count_) return end_;
    return start_ + static_cast<double>(i) * step();
  }

  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = node(i);
    return out;
  }

  /// Index of the node closest to t, clamped to the grid.
  [[nodiscard]] std::size_t nearest(double t) const noexcept {
    const double r = std::round((t - start_) / step());
    if (r <= 0.0) return 0;
    if (r >= static_cast<double>(count_ - 1)) return count_ - 1;
    return static_cast<std::size_t>(r);
  }

  [[nodiscard]] bool contains(double t, double slack = 0.0) const noexcept {
    return t >= start_ - slack && t <= end_ + slack;
  }

 private:
  double start_;
  double end_;
  std::size_t count_;
};

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const Vec3& v) { return v.allFinite(); }

template <class F>
using value_of = std::decay_t<std::invoke_result_t<F, double>>;

template <class F>
value_of<F> eval_finite(const F& f, double t) {
  value_of<F> v = f(t);
  if (!all_finite(v)) {
    throw EvaluationError("non-finite function value at t = " +
                          std::to_string(t));
  }
  return v;
}

}  // namespace detail

/// Default differentiation step. The first-order step balances truncation
/// against round-off for double precision; higher orders divide by h^2 and
/// h^3, so their steps grow accordingly.
inline double default_step(double t, int order = 1) {
  const double scale = 1.0 + std::abs(t);
  switch (order) {
    case 1:
      return std::max(1e-5, 1e-6 * scale);
    case 2:
      return std::max(1e-4, 1e-5 * scale);
    default:
      return std::max(1e-3, 1e-4 * scale);
  }
}

/// Symmetric O(h^2) stencils: 2-point for the first derivative, 3-point for
/// the second and the 5-point antisymmetric stencil for the third.
template <class F>
detail::value_of<F> central_difference(const F& f, double t, int order,
                                       double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("central_difference requires a positive step");
  }
  using detail::eval_finite;
  switch (order) {
    case 1:
      return detail::value_of<F>((eval_finite(f, t + h) - eval_finite(f, t - h)) /
                                 (2.0 * h));
    case 2:
      return detail::value_of<F>(
          (eval_finite(f, t + h) - 2.0 * eval_finite(f, t) +
           eval_finite(f, t - h)) /
          (h * h));
    case 3:
      return detail::value_of<F>(
          (eval_finite(f, t + 2.0 * h) - 2.0 * eval_finite(f, t + h) +
           2.0 * eval_finite(f, t - h) - eval_finite(f, t - 2.0 * h)) /
          (2.0 * h * h * h));
    default:
      throw DomainError("central_difference supports orders 1, 2 and 3");
  }
}

template <class F>
detail::value_of<F> central_difference(const F& f, double t, int order) {
  return central_difference(f, t, order, default_step(t, order));
}

/// Derivative estimate of sampled data on distinct abscissae.
inline std::vector<double> differentiate_samples(std::span<const double> xs,
                                                 std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size()) throw DomainError("sample arrays differ in length");
  if (n < 3) throw DomainError("at least 3 samples are needed to differentiate");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs[i] != xs[i - 1])) {
      throw DegenerateError("repeated abscissa while differentiating samples", i);
    }
  }
  // Derivative of the Lagrange polynomial through a window of up to five
  // consecutive samples; the window is centred where possible and shifted
  // inward at the ends. Fourth order on smooth data.
  const std::size_t m = std::min<std::size_t>(5, n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = std::min(i >= m / 2 ? i - m / 2 : 0, n - m);
    const double x = xs[i];
    double sum = 0.0;
    for (std::size_t j = a; j < a + m; ++j) {
      // l_j'(x) = sum_{k != j} 1/(x_j - x_k) prod_{l != j,k} (x - x_l)/(x_j - x_l)
      double lj = 0.0;
      for (std::size_t k = a; k < a + m; ++k) {
        if (k == j) continue;
        double term = 1.0 / (xs[j] - xs[k]);
        for (std::size_t l = a; l < a + m; ++l) {
          if (l != j && l != k) term *= (x - xs[l]) / (xs[j] - xs[l]);
        }
        lj += term;
      }
      sum += lj * ys[j];
    }
    d[i] = sum;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Cumulative quadrature
// ---------------------------------------------------------------------------

/// Running integral of a function over a parameter table. `rates` holds the
/// integrand at each node when it is known; inversion then uses those exact
/// slopes instead of estimating them.
struct CumulativeTable {
  std::vector<double> parameters;
  std::vector<double> values;
  std::vector<double> rates;

  [[nodiscard]] std::size_t size() const noexcept { return parameters.size(); }
  [[nodiscard]] double total() const { return values.back(); }
};

/// Cumulative composite Simpson on uniformly spaced samples. Even nodes are
/// plain Simpson partial sums; odd nodes add a cubic-exact four-point rule
/// for the single interval they close.
inline std::vector<double> cumulative_simpson(std::span<const double> f,
                                              double h) {
  const std::size_t n = f.size();
  if (n < 2) throw DomainError("cumulative_simpson needs at least 2 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f[i])) {
      throw EvaluationError("non-finite integrand sample at node " +
                            std::to_string(i));
    }
  }
  std::vector<double> v(n, 0.0);
  if (n == 2) {
    v[1] = 0.5 * h * (f[0] + f[1]);
    return v;
  }
  for (std::size_t i = 2; i < n; i += 2) {
    v[i] = v[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  }
  for (std::size_t i = 1; i < n; i += 2) {
    double piece;
    if (i + 2 < n) {
      piece = h / 24.0 * (9.0 * f[i - 1] + 19.0 * f[i] - 5.0 * f[i + 1] + f[i + 2]);
    } else if (i >= 2 && i + 1 < n) {
      piece = h / 24.0 * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1]);
    } else if (i >= 3) {
      piece = h / 24.0 * (f[i - 3] - 5.0 * f[i - 2] + 19.0 * f[i - 1] + 9.0 * f[i]);
    } else {
      piece = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    }
    v[i] = v[i - 1] + piece;
  }
  return v;
}

template <class F>
CumulativeTable cumulative_simpson(const F& f, const Grid& grid) {
  CumulativeTable table;
  table.parameters = grid.nodes();
  table.rates.resize(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double v = f(table.parameters[i]);
    if (!std::isfinite(v)) {
      throw EvaluationError("non-finite integrand at node " + std::to_string(i));
    }
    table.rates[i] = v;
  }
  table.values = cumulative_simpson(table.rates, grid.step());
  return table;
}

/// Five-point Gauss-Legendre rule on [a, b].
template <class F>
detail::value_of<F> gauss_legendre(const F& f, double a, double b) {
  static constexpr std::array<double, 5> x = {
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
      0.9061798459386640};
  static constexpr std::array<double, 5> w = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
      0.2369268850561891, 0.2369268850561891};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  detail::value_of<F> sum = w[0] * detail::eval_finite(f, mid);
  for (std::size_t k = 1; k < x.size(); ++k) {
    sum = sum + w[k] * detail::eval_finite(f, mid + half * x[k]);
  }
  return detail::value_of<F>(half * sum);
}

/// Running integral built from one Gauss-Legendre panel per grid interval.
/// Pointwise evaluation between nodes (node value plus a partial panel) is
/// then continuous with the tabulated values to round-off.
template <class F>
std::vector<detail::value_of<F>> cumulative_gauss_legendre(const F& f,
                                                           const Grid& grid) {
  using V = detail::value_of<F>;
  std::vector<V> out(grid.count());
  if constexpr (std::is_same_v<V, double>) {
    out[0] = 0.0;
  } else {
    out[0] = V::Zero();
  }
  for (std::size_t i = 1; i < grid.count(); ++i) {
    out[i] = out[i - 1] + gauss_legendre(f, grid.node(i - 1), grid.node(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monotone table inversion
// ---------------------------------------------------------------------------

namespace detail {

inline double pchip_slope(const CumulativeTable& tab, std::size_t k) {
  const auto& x = tab.parameters;
  const auto& y = tab.values;
  const std::size_t n = x.size();
  auto secant = [&](std::size_t i) { return (y[i + 1] - y[i]) / (x[i + 1] - x[i]); };
  if (k == 0) return std::max(0.0, secant(0));
  if (k == n - 1) return std::max(0.0, secant(n - 2));
  const double d0 = secant(k - 1);
  const double d1 = secant(k);
  if (d0 * d1 <= 0.0) return 0.0;
  const double h0 = x[k] - x[k - 1];
  const double h1 = x[k + 1] - x[k];
  const double w1 = 2.0 * h1 + h0;
  const double w2 = h1 + 2.0 * h0;
  return (w1 + w2) / (w1 / d0 + w2 / d1);
}

struct HermiteSegment {
  double x0, h, y0, y1, m0, m1;

  [[nodiscard]] double value(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * m1;
  }
  // derivative with respect to s
  [[nodiscard]] double slope(double s) const {
    const double s2 = s * s;
    return (6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * m0 +
           (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * m1;
  }
};

// Fritsch-Carlson limited cubic Hermite on segment k.
inline HermiteSegment monotone_segment(const CumulativeTable& tab,
                                       std::size_t k) {
  const double h = tab.parameters[k + 1] - tab.parameters[k];
  const double y0 = tab.values[k], y1 = tab.values[k + 1];
  const double delta = (y1 - y0) / h;
  double m0, m1;
  if (!tab.rates.empty()) {
    m0 = std::max(0.0, tab.rates[k]);
    m1 = std::max(0.0, tab.rates[k + 1]);
  } else {
    m0 = pchip_slope(tab, k);
    m1 = pchip_slope(tab, k + 1);
  }
  if (delta <= 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double a = m0 / delta, b = m1 / delta;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m0 *= tau;
      m1 *= tau;
    }
  }
  return {tab.parameters[k], h, y0, y1, m0, m1};
}

}  // namespace detail

/// Parameter t with cumulative(t) = v. The table is read as a shape-preserving
/// cubic in t; the root inside the bracketing segment is found by safeguarded
/// Newton with bisection fallback.
inline double invert_monotone(const CumulativeTable& table, double v) {
  const auto& y = table.values;
  const auto& x = table.parameters;
  if (y.size() < 2 || y.size() != x.size()) {
    throw DomainError("invert_monotone needs a table of at least 2 entries");
  }
  if (!std::isfinite(v) || v < y.front() || v > y.back()) {
    throw DomainError("value " + std::to_string(v) + " outside table range [" +
                      std::to_string(y.front()) + ", " +
                      std::to_string(y.back()) + "]");
  }
  if (v == y.back()) return x.back();
  if (v == y.front()) return x.front();

  const auto it = std::upper_bound(y.begin(), y.end(), v);
  const std::size_t k = static_cast<std::size_t>(it - y.begin()) - 1;
  if (y[k + 1] < y[k]) throw DomainError("table values are not nondecreasing");
  if (y[k + 1] == y[k]) {
    throw DegenerateError("flat table segment contains the requested value", k);
  }
  if (v == y[k]) return x[k];

  const auto seg = detail::monotone_segment(table, k);
  double lo = 0.0, hi = 1.0;
  double s = (v - seg.y0) / (seg.y1 - seg.y0);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = seg.value(s) - v;
    if (g == 0.0) break;
    if (g < 0.0) lo = s; else hi = s;
    const double dg = seg.slope(s);
    double next = dg > 0.0 ? s - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16) {
      s = next;
      break;
    }
    s = next;
  }
  return seg.x0 + s * seg.h;
}

/// Value of the shape-preserving interpolant at parameter t.
inline double interpolate_monotone(const CumulativeTable& table, double t) {
  const auto& x = table.parameters;
  if (t < x.front() || t > x.back()) {
    throw DomainError("parameter outside table range");
  }
  if (t == x.back()) return table.values.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  const auto seg = detail::monotone_segment(table, k);
  return seg.value((t - seg.x0) / seg.h);
}

// ---------------------------------------------------------------------------
// Constancy statistic
// ---------------------------------------------------------------------------

/// Relative spread sd / (|mean| + eps_abs); plain sd when the mean is
/// indistinguishable from zero.
inline double constancy_score(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw DomainError("constancy_score needs at least 2 samples");
  }
  double mean = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s)) throw EvaluationError("non-finite sample in constancy_score");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(samples.size()));
  if (std::abs(mean) < kConstancyEpsAbs) return sd;
  return sd / (std::abs(mean) + kConstancyEpsAbs);
}

}  // namespace frenetlab
