#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"

using namespace frenetlab;

TEST(Grid, CountIsNormalizedToOdd) {
  const Grid g(0.0, 1.0, 400);
  EXPECT_EQ(g.count(), 401u);
  EXPECT_DOUBLE_EQ(g.node(0), 0.0);
  EXPECT_DOUBLE_EQ(g.node(400), 1.0);
  EXPECT_DOUBLE_EQ(g.step(), 1.0 / 400.0);
  EXPECT_EQ(Grid(0.0, 1.0, 5).count(), 5u);
}

TEST(Grid, RejectsBadBounds) {
  EXPECT_THROW(Grid(1.0, 0.0, 5), DomainError);
  EXPECT_THROW(Grid(0.0, 1.0, 2), DomainError);
  EXPECT_THROW(Grid(0.0, INFINITY, 5), DomainError);
}

TEST(CentralDifference, QuadraticFirstDerivative) {
  auto f = [](double t) { return t * t; };
  EXPECT_NEAR(central_difference(f, 1.0, 1, 1e-4), 2.0, 1e-8);
}

TEST(CentralDifference, ConstantIsExactlyZero) {
  auto f = [](double) { return 3.25; };
  for (double t : {-4.0, 0.0, 0.7, 12.0}) {
    EXPECT_EQ(central_difference(f, t, 1), 0.0);
    EXPECT_EQ(central_difference(f, t, 2), 0.0);
    EXPECT_EQ(central_difference(f, t, 3), 0.0);
  }
}

TEST(CentralDifference, SineThirdDerivative) {
  auto f = [](double t) { return std::sin(t); };
  EXPECT_NEAR(central_difference(f, 0.0, 3, 1e-3), -1.0, 1e-5);
}

TEST(CentralDifference, ExactOnMatchingDegreePolynomials) {
  // Dyadic steps keep the arithmetic exact, so only truncation could show.
  const double h = std::ldexp(1.0, -8);
  auto p2 = [](double t) { return 3.0 * t * t - 2.0 * t + 5.0; };
  auto p3 = [](double t) { return 2.0 * t * t * t - t * t + 4.0 * t - 1.0; };
  for (double t : {-1.5, 0.0, 0.5, 2.0}) {
    EXPECT_NEAR(central_difference(p2, t, 1, h), 6.0 * t - 2.0, 1e-12 * (1.0 + std::abs(6.0 * t)));
    EXPECT_NEAR(central_difference(p3, t, 2, h), 12.0 * t - 2.0, 1e-12 * (1.0 + std::abs(12.0 * t)));
    EXPECT_NEAR(central_difference(p3, t, 3, h), 12.0, 1e-12 * 12.0);
  }
}

TEST(CentralDifference, DefaultStepsAreAccurate) {
  auto f = [](double t) { return std::exp(0.5 * t); };
  for (double t : {-2.0, 0.0, 3.0}) {
    const double e = std::exp(0.5 * t);
    EXPECT_NEAR(central_difference(f, t, 1), 0.5 * e, 1e-8 * e);
    EXPECT_NEAR(central_difference(f, t, 2), 0.25 * e, 1e-6 * e);
    EXPECT_NEAR(central_difference(f, t, 3), 0.125 * e, 1e-5 * e);
  }
}

TEST(CentralDifference, Errors) {
  auto f = [](double t) { return t; };
  EXPECT_THROW((void)central_difference(f, 0.0, 4), DomainError);
  EXPECT_THROW((void)central_difference(f, 0.0, 1, 0.0), DomainError);
  auto bad = [](double t) { return t > 0.0 ? std::log(-1.0) : 0.0; };
  EXPECT_THROW((void)central_difference(bad, 0.0, 1, 1e-3), EvaluationError);
}

TEST(DifferentiateSamples, ExactOnQuarticOverUnevenAbscissae) {
  std::vector<double> xs, ys;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> gap(0.05, 0.15);
  double x = -1.0;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(x);
    ys.push_back(x * x * x * x - 2.0 * x * x + x);
    x += gap(rng);
  }
  const auto d = differentiate_samples(xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x0 = xs[i];
    EXPECT_NEAR(d[i], 4.0 * x0 * x0 * x0 - 4.0 * x0 + 1.0, 1e-10);
  }
}

TEST(DifferentiateSamples, Errors) {
  const std::vector<double> two{0.0, 1.0};
  EXPECT_THROW(differentiate_samples(two, two), DomainError);
  const std::vector<double> xs{0.0, 1.0, 1.0}, ys{1.0, 2.0, 3.0};
  EXPECT_THROW(differentiate_samples(xs, ys), DegenerateError);
}

TEST(Simpson, ConstantIntegrand) {
  const auto tab = cumulative_simpson([](double) { return 1.0; }, Grid(0.0, 2.0, 5));
  EXPECT_EQ(tab.total(), 2.0);
}

TEST(Simpson, CosineToSine) {
  const auto tab =
      cumulative_simpson([](double t) { return std::cos(t); }, Grid(0.0, oracle::pi / 2.0, 101));
  EXPECT_NEAR(tab.total(), 1.0, 1e-8);
  for (std::size_t i = 0; i < tab.size(); ++i) {
    EXPECT_NEAR(tab.values[i], std::sin(tab.parameters[i]), 1e-8);
  }
}

TEST(Simpson, LinearOnThreeNodes) {
  const auto tab = cumulative_simpson([](double t) { return t; }, Grid(0.0, 1.0, 3));
  EXPECT_EQ(tab.total(), 0.5);
}

TEST(Simpson, ExactOnCubicsAtEveryNode) {
  auto f = [](double t) { return 4.0 * t * t * t - 3.0 * t * t + 2.0 * t - 1.0; };
  auto F = [](double t) { return t * t * t * t - t * t * t + t * t - t; };
  // Three nodes only support a quadratic on the first interval, so the
  // smallest grid here is five nodes.
  for (std::size_t n : {5u, 11u, 101u}) {
    const Grid g(-1.0, 2.0, n);
    const auto tab = cumulative_simpson(f, g);
    for (std::size_t i = 0; i < tab.size(); ++i) {
      EXPECT_NEAR(tab.values[i], F(g.node(i)) - F(-1.0), 1e-12) << "n=" << n << " i=" << i;
    }
  }
}

TEST(Simpson, AdditiveOverSubintervals) {
  // Running value at an even node equals a separate integral up to that node,
  // and the remainder equals the integral over the rest.
  auto f = [](double t) { return std::exp(std::sin(t)); };
  const Grid whole(0.0, 3.0, 61);
  const auto tab = cumulative_simpson(f, whole);
  for (std::size_t k : {10u, 20u, 40u}) {
    const double mid = whole.node(k);
    const auto left = cumulative_simpson(f, Grid(0.0, mid, k + 1));
    const auto right = cumulative_simpson(f, Grid(mid, 3.0, 61 - k));
    EXPECT_NEAR(tab.values[k], left.total(), 1e-13);
    EXPECT_NEAR(tab.total(), left.total() + right.total(), 1e-12);
  }
}

TEST(Simpson, NonFiniteIntegrandThrows) {
  EXPECT_THROW(cumulative_simpson([](double t) { return 1.0 / (t - 0.5); }, Grid(0.0, 1.0, 3)),
               EvaluationError);
}

TEST(GaussLegendre, ExactThroughDegreeNine) {
  auto f = [](double t) { return std::pow(t, 9) - 2.0 * std::pow(t, 4) + 1.0; };
  const double exact = (std::pow(2.0, 10) - 1.0) / 10.0 - 2.0 * (32.0 - 1.0) / 5.0 + 1.0;
  EXPECT_NEAR(gauss_legendre(f, 1.0, 2.0), exact, 1e-12 * std::abs(exact));
}

TEST(GaussLegendre, CumulativeVectorIntegrand) {
  const Grid g(0.0, 1.0, 21);
  const auto v = cumulative_gauss_legendre(
      [](double t) { return Vec3(std::cos(t), std::sin(t), 1.0); }, g);
  for (std::size_t i = 0; i < g.count(); ++i) {
    const double t = g.node(i);
    EXPECT_NEAR((v[i] - Vec3(std::sin(t), 1.0 - std::cos(t), t)).norm(), 0.0, 1e-13);
  }
}

TEST(InvertMonotone, IdentityTable) {
  const auto tab = cumulative_simpson([](double) { return 1.0; }, Grid(0.0, 2.0, 5));
  EXPECT_NEAR(invert_monotone(tab, 1.3), 1.3, 1e-9);
  EXPECT_EQ(invert_monotone(tab, tab.values.back()), 2.0);
  EXPECT_EQ(invert_monotone(tab, 0.0), 0.0);
}

TEST(InvertMonotone, SquareRootInverse) {
  const auto tab = cumulative_simpson([](double t) { return 2.0 * t; }, Grid(0.0, 1.0, 101));
  EXPECT_NEAR(invert_monotone(tab, 0.25), 0.5, 1e-6);
  EXPECT_THROW((void)invert_monotone(tab, 1.5), DomainError);
}

TEST(InvertMonotone, RoundTripProperty) {
  const auto tab = cumulative_simpson([](double t) { return 1.5 + std::sin(3.0 * t); },
                                      Grid(0.0, 4.0, 201));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double t = u(rng);
    EXPECT_NEAR(invert_monotone(tab, interpolate_monotone(tab, t)), t, 1e-9);
  }
}

TEST(ConstancyScore, Examples) {
  const std::vector<double> flat{3, 3, 3, 3};
  EXPECT_EQ(constancy_score(flat), 0.0);
  const std::vector<double> alt{1, -1, 1, -1};
  EXPECT_GT(constancy_score(alt), 0.5);
  const std::vector<double> one{1.0};
  EXPECT_THROW((void)constancy_score(one), DomainError);
}

TEST(ConstancyScore, PermutationAndScaleInvariant) {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(2.0, 0.1);
  std::vector<double> v(64);
  for (double& x : v) x = noise(rng);
  const double base = constancy_score(v);
  std::shuffle(v.begin(), v.end(), rng);
  EXPECT_NEAR(constancy_score(v), base, 1e-12);
  for (double k : {-3.0, 0.5, 40.0}) {
    std::vector<double> w(v);
    for (double& x : w) x *= k;
    EXPECT_NEAR(constancy_score(w), base, 1e-8 * base);
  }
}
