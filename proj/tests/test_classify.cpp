#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "test_support.hpp"

using namespace frenetlab;
using oracle::pi;
using oracle::r2;

namespace {

ClassReport classify_entry(const CatalogEntry& e, std::size_t n = 401) {
  return classify(e.curve, Grid(e.regular_domain.lo, e.regular_domain.hi, n));
}

std::vector<TheoremCheck> pairing_report(const CatalogEntry& e, DirectionFamily fam) {
  const Grid g(e.regular_domain.lo, e.regular_domain.hi, 401);
  auto data = std::make_shared<const IndicatrixData>(e.curve, g);
  const auto dc = integrate_direction_curve(pairing_kind(e, fam, *data), data);
  return correspondence_report(fam, classify(e.curve, g), classify(unit_tangent_curve(e.curve), g),
                               classify(*dc.curve, g));
}

const TheoremCheck& find(const std::vector<TheoremCheck>& v, const std::string& id) {
  for (const auto& c : v) {
    if (c.id == id) return c;
  }
  throw std::runtime_error("missing check " + id);
}

}  // namespace

TEST(SphereFit, RecoversSphere) {
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 c(1, -2, 0.5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(c + 3.0 * Vec3(n(rng), n(rng), n(rng)).normalized());
  const auto fit = fit_sphere(pts);
  EXPECT_NEAR((fit.center - c).norm(), 0.0, 1e-10);
  EXPECT_NEAR(fit.radius, 3.0, 1e-10);
  EXPECT_LE(fit.residual, 1e-10);
  EXPECT_THROW(fit_sphere({Vec3(0, 0, 0)}), DomainError);
}

TEST(Classify, HelixIsHelixAndSlantHelix) {
  const auto r = classify_entry(helix_example());
  EXPECT_EQ(r.is_general_helix, Verdict::yes);
  EXPECT_EQ(r.is_slant_helix, Verdict::yes);
  EXPECT_EQ(r.is_spherical, Verdict::no);
  EXPECT_FALSE(r.is_straight_line);
}

TEST(Classify, HelixIndicatrixIsCircleOnSphere) {
  const auto e = helix_example();
  const auto r = classify(unit_tangent_curve(e.curve), Grid(0.0, 4.0 * pi, 401));
  EXPECT_EQ(r.is_spherical, Verdict::yes);
  EXPECT_EQ(r.is_circle_on_sphere, Verdict::yes);
  // A circle lies on many spheres; each has at least the circle's radius.
  EXPECT_GE(r.sphere.radius, 1.0 / r2 - 1e-9);
  EXPECT_LE(r.sphere.residual, 1e-9);
}

TEST(Classify, HelixMannheimIsStraightLine) {
  auto data = std::make_shared<const IndicatrixData>(helix_example().curve, Grid(0.0, 4.0 * pi, 401));
  const auto dc = integrate_direction_curve(DirectionKind::mannheim(pi / 4.0), data);
  const auto r = classify(*dc.curve, data->grid());
  EXPECT_TRUE(r.is_straight_line);
  EXPECT_EQ(r.is_general_helix, Verdict::degenerate);
  EXPECT_LE(r.max_kappa, 1e-6);
}

TEST(Classify, LineAndCircle) {
  const auto line = classify_entry(line_entry(), 101);
  EXPECT_TRUE(line.is_straight_line);
  EXPECT_EQ(line.is_spherical, Verdict::no);
  const auto circle = classify_entry(circle_entry());
  EXPECT_EQ(circle.is_general_helix, Verdict::yes);
  EXPECT_EQ(circle.is_circle_on_sphere, Verdict::yes);
}

TEST(Classify, TwistedCubicIsGeneric) {
  const auto r = classify_entry(twisted_cubic_entry());
  EXPECT_EQ(r.is_general_helix, Verdict::no);
  EXPECT_EQ(r.is_slant_helix, Verdict::no);
  EXPECT_EQ(r.is_spherical, Verdict::no);
  // Oracle: f from independent differences varies by far more than tol
  // (f is even in t, so compare the centre with an off-centre point).
  const auto a = oracle::measured([](double t) { return Vec3(t, t * t, t * t * t); }, 0.0);
  const auto b = oracle::measured([](double t) { return Vec3(t, t * t, t * t * t); }, 0.5);
  EXPECT_GT(std::abs(a.tau / a.kappa - b.tau / b.kappa), 0.1);
}

TEST(Classify, SlantHelixAndTrigCurve) {
  const auto s = classify_entry(slant_helix_entry());
  EXPECT_EQ(s.is_general_helix, Verdict::no);
  EXPECT_EQ(s.is_slant_helix, Verdict::yes);
  const auto t = classify_entry(trig_sum_example());
  EXPECT_EQ(t.is_general_helix, Verdict::no);
  EXPECT_EQ(t.is_slant_helix, Verdict::yes);
}

TEST(Classify, PartialInflectionThrows) {
  const auto e = trig_sum_example();
  EXPECT_THROW(classify(e.curve, Grid(e.figure_domain.lo, e.figure_domain.hi, 401)),
               DegenerateFrameError);
  EXPECT_THROW(classify(e.curve, Grid(0.1, 0.9, 11), 0.0), DomainError);
}

TEST(Classify, RigidMotionInvariance) {
  for (const char* id : {"ex7.1", "ex7.2", "twisted-cubic", "slant-helix"}) {
    const auto e = *find_entry(id);
    const Grid g(e.regular_domain.lo, e.regular_domain.hi, 201);
    const auto a = classify(e.curve, g);
    const auto b = classify(oracle::rigidly_moved(e.curve, 2.0, Vec3(0.3, 1, -1), Vec3(5, 5, -2)), g);
    EXPECT_EQ(a.is_general_helix, b.is_general_helix) << id;
    EXPECT_EQ(a.is_slant_helix, b.is_slant_helix) << id;
    EXPECT_EQ(a.is_spherical, b.is_spherical) << id;
    EXPECT_EQ(a.is_circle_on_sphere, b.is_circle_on_sphere) << id;
  }
}

TEST(Classify, ReparametrizationInvariance) {
  for (const char* id : {"ex7.2", "twisted-cubic", "slant-helix"}) {
    const auto e = *find_entry(id);
    const Curve3 r = oracle::reparametrized(e.curve, e.regular_domain);
    const auto a = classify(e.curve, Grid(e.regular_domain.lo, e.regular_domain.hi, 401));
    const Interval d = r.domain();
    const auto b = classify(r, Grid(d.lo, d.hi, 401));
    EXPECT_EQ(a.is_general_helix, b.is_general_helix) << id;
    EXPECT_EQ(a.is_slant_helix, b.is_slant_helix) << id;
  }
}

TEST(Biconditional, Statuses) {
  EXPECT_EQ(biconditional("x", "", Verdict::yes, Verdict::yes).status, CheckStatus::pass);
  EXPECT_EQ(biconditional("x", "", Verdict::no, Verdict::no).status, CheckStatus::pass);
  EXPECT_EQ(biconditional("x", "", Verdict::yes, Verdict::no).status, CheckStatus::fail);
  EXPECT_EQ(biconditional("x", "", Verdict::degenerate, Verdict::no).status,
            CheckStatus::not_applicable);
  EXPECT_EQ(both(Verdict::yes, Verdict::degenerate), Verdict::degenerate);
  EXPECT_EQ(both(Verdict::no, Verdict::degenerate), Verdict::no);
}

TEST(Correspondence, HelixEvoluteCircleGivesHelix) {
  const auto e = helix_example();
  const auto checks = pairing_report(e, DirectionFamily::evolute);
  const auto& c = find(checks, "evolute.indicatrix_circle_iff_helix");
  EXPECT_EQ(c.expected, Verdict::yes);
  EXPECT_EQ(c.status, CheckStatus::pass);
  EXPECT_TRUE(all_pass_or_na(checks));
}

TEST(Correspondence, HelixMannheimCircleGivesLine) {
  const auto checks = pairing_report(helix_example(), DirectionFamily::mannheim);
  const auto& c = find(checks, "mannheim.indicatrix_circle_iff_line");
  EXPECT_EQ(c.expected, Verdict::yes);
  EXPECT_EQ(c.observed, Verdict::yes);
  EXPECT_EQ(c.status, CheckStatus::pass);
}

TEST(Correspondence, VacuousBertrandOnTwistedCubic) {
  const auto checks = pairing_report(twisted_cubic_entry(), DirectionFamily::bertrand);
  const auto& c = find(checks, "bertrand.indicatrix_spherical_helix_iff_helix");
  EXPECT_EQ(c.expected, Verdict::no);
  EXPECT_EQ(c.observed, Verdict::no);
  EXPECT_EQ(c.status, CheckStatus::pass);
}

TEST(Correspondence, TrigCurveAllFamilies) {
  const auto e = trig_sum_example();
  for (auto fam : {DirectionFamily::evolute, DirectionFamily::bertrand, DirectionFamily::mannheim}) {
    const auto checks = pairing_report(e, fam);
    for (const auto& c : checks) {
      EXPECT_EQ(c.status, CheckStatus::pass) << c.id << " " << to_string(c.expected) << " vs "
                                             << to_string(c.observed);
    }
  }
}
