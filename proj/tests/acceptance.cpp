// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frenetlab/cli.hpp"
#include "frenetlab/frenetlab.hpp"

using namespace frenetlab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kSamples = 401;

// Pinned tolerances.
constexpr double kHelixMatchTol = 1e-5;
constexpr double kTrigMatchTol = 1e-4;
constexpr double kUnitSphereTol = 1e-9;
constexpr double kApparatusTol = 1e-4;
constexpr double kResidualTol = 1e-3;
constexpr double kAlignTol = 1e-4;  // alignment ≥ 1 - kAlignTol
constexpr double kRoundTripTol = 1e-3;
constexpr double kUnitCurvatureTol = 1e-3;
constexpr double kLineKappaTol = 1e-6;
constexpr double kClassTol = 1e-3;
constexpr double kCoefficientNormTol = 1e-10;
constexpr double kOrthogonalityTol = 1e-4;
constexpr double kOrthonormalTol = 1e-9;
constexpr double kFrenetSystemTol = 1e-4;
constexpr double kSigmaInvarianceTol = 1e-3;
constexpr double kExactTol = 1e-12;
constexpr double kInversionTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& text) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += text;
  if (!ok) o.detail += " [over]";
}

const std::vector<DirectionFamily> kFamilies{DirectionFamily::evolute, DirectionFamily::bertrand,
                                             DirectionFamily::mannheim};

// 1, 2: sampled β against the printed closed forms.
Outcome closed_forms(const CatalogEntry& e, double tol) {
  Outcome o;
  const auto policy = e.needs_bridge ? InflectionPolicy::bridge : InflectionPolicy::reject;
  auto data = std::make_shared<const IndicatrixData>(
      e.curve, Grid(e.figure_domain.lo, e.figure_domain.hi, kSamples), policy);
  const ReferenceConstants& k = *e.figure_constants;
  const bool in_sT = e.reference_parameter == ReferenceParameter::indicatrix_arclength;
  if (in_sT) {
    note(o, std::abs(data->arclength().back() - 2.0 * kPi) <= 1e-9,
         "s_T range [0, " + sci(data->arclength().back()) + "]");
  }
  for (auto fam : kFamilies) {
    const DirectionCurve dc = integrate_direction_curve(figure_kind(fam, k), data);
    const auto params = in_sT ? dc.s_values() : dc.params();
    const auto pts = dc.points();
    const ReferenceMatch m = match_reference(e, fam, k, params, pts);
    std::string text = to_string(fam) + " " + sci(m.sup_error);
    if (m.sup_error > tol) {
      text += " (x " + sci(m.component_error[0]) + ", y " + sci(m.component_error[1]) + ", z " +
              sci(m.component_error[2]) + ")";
    }
    note(o, m.sup_error <= tol, text);
  }
  return o;
}

// 3: indicatrix on the sphere and its closed-form apparatus.
Outcome indicatrix() {
  Outcome o;
  for (const auto& e : {helix_example(), trig_sum_example()}) {
    const auto policy = e.needs_bridge ? InflectionPolicy::bridge : InflectionPolicy::reject;
    const IndicatrixData data(e.curve, Grid(e.figure_domain.lo, e.figure_domain.hi, kSamples),
                              policy);
    const cli::IndicatrixCheck c = cli::check_indicatrix(data);
    note(o, c.unit_sphere <= kUnitSphereTol, e.id + " sphere " + sci(c.unit_sphere));
    note(o, c.kappa_mismatch <= kApparatusTol && c.tau_mismatch <= kApparatusTol,
         e.id + " kappa " + sci(c.kappa_mismatch) + " tau " + sci(c.tau_mismatch) + " on " +
             std::to_string(c.checked_nodes) + " nodes");
    if (e.id == "ex7.1") {
      double dk = 0.0, tt = 0.0;
      for (const auto& p : data.nodes()) {
        dk = std::max(dk, std::abs(p.kappa_T - std::sqrt(2.0)));
        tt = std::max(tt, std::abs(p.tau_T));
      }
      note(o, dk <= kApparatusTol && tt <= kApparatusTol,
           "ex7.1 |kappa_T - sqrt2| " + sci(dk) + " |tau_T| " + sci(tt));
    }
  }
  return o;
}

// 4: every non-degenerate catalog pairing.
Outcome theorem_suite() {
  Outcome o;
  std::size_t checked = 0;
  double worst_system = 0.0, worst_align = 1.0, worst_pred = 0.0, worst_rt = 0.0;
  std::vector<std::string> skipped;
  for (const auto& e : all_entries()) {
    if (e.degenerate_frame) {
      skipped.push_back(e.id + " (no frame)");
      continue;
    }
    auto data = std::make_shared<const IndicatrixData>(
        e.curve, Grid(e.regular_domain.lo, e.regular_domain.hi, kSamples));
    for (auto fam : kFamilies) {
      const DirectionCurve dc = integrate_direction_curve(pairing_kind(e, fam, *data), data);
      if (!dc.all_regular()) {
        skipped.push_back(e.id + "/" + to_string(fam) +
                          (dc.max_kappa() <= kLineKappaTol ? " (line)" : " (frame lost)"));
        continue;
      }
      const ResidualReport r = residual_check(dc);
      const cli::RoundTrip rt = cli::round_trip(dc);
      worst_system = std::max(worst_system, r.max_system());
      worst_align = std::min(worst_align, r.min_alignment);
      worst_pred = std::max({worst_pred, r.kappa_mismatch, r.tau_mismatch});
      worst_rt = std::max({worst_rt, rt.kappa_error, rt.tau_error});
      const bool ok = r.passes(kResidualTol, kAlignTol) && rt.kappa_error <= kRoundTripTol &&
                      rt.tau_error <= kRoundTripTol;
      if (!ok) note(o, false, e.id + "/" + to_string(fam));
      ++checked;
    }
  }
  note(o, checked > 0, std::to_string(checked) + " pairings");
  note(o, worst_system <= kResidualTol, "system " + sci(worst_system));
  note(o, worst_align >= 1.0 - kAlignTol, "alignment " + sci(worst_align));
  note(o, worst_pred <= kResidualTol, "prediction " + sci(worst_pred));
  note(o, worst_rt <= kRoundTripTol, "round trip " + sci(worst_rt));
  std::string s;
  for (const auto& k : skipped) s += (s.empty() ? "" : ", ") + k;
  note(o, true, "skipped " + s);
  return o;
}

struct Pairing {
  DirectionCurve dc;
  std::vector<TheoremCheck> checks;
  ClassReport beta;
};

Pairing pairing(const CatalogEntry& e, DirectionFamily fam, const Grid& g) {
  auto data = std::make_shared<const IndicatrixData>(e.curve, g);
  Pairing p{integrate_direction_curve(pairing_kind(e, fam, *data), data), {}, {}};
  p.beta = classify(*p.dc.curve, g, kClassTol);
  p.checks = correspondence_report(fam, classify(e.curve, g, kClassTol),
                                   classify(unit_tangent_curve(e.curve), g, kClassTol), p.beta);
  return p;
}

const TheoremCheck* find_check(const std::vector<TheoremCheck>& v, const std::string& id) {
  for (const auto& c : v) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

// 5: class correspondences.
Outcome correspondences() {
  Outcome o;
  const auto h = helix_example();
  const Grid hg(h.regular_domain.lo, h.regular_domain.hi, kSamples);

  const Pairing ev = pairing(h, DirectionFamily::evolute, hg);
  const auto* circle = find_check(ev.checks, "evolute.indicatrix_circle_iff_helix");
  double dk = 0.0, dt = 0.0;
  for (const auto& s : ev.dc.samples) {
    dk = std::max(dk, std::abs(s.kappa - 1.0));
    dt = std::max(dt, std::abs(s.tau - 1.0));
  }
  note(o, circle && circle->status == CheckStatus::pass && circle->expected == Verdict::yes,
       "ex7.1 evolute helix");
  note(o, dk <= kUnitCurvatureTol && dt <= kUnitCurvatureTol,
       "kappa-1 " + sci(dk) + " tau-1 " + sci(dt));

  const Pairing mh = pairing(h, DirectionFamily::mannheim, hg);
  const auto* line = find_check(mh.checks, "mannheim.indicatrix_circle_iff_line");
  note(o, line && line->status == CheckStatus::pass && mh.beta.is_straight_line,
       "ex7.1 Mannheim line");
  note(o, mh.dc.max_kappa() <= kLineKappaTol, "max kappa " + sci(mh.dc.max_kappa()));

  const auto t = trig_sum_example();
  const Grid tg(t.regular_domain.lo, t.regular_domain.hi, kSamples);
  std::size_t agreed = 0, total = 0;
  for (auto fam : kFamilies) {
    for (const auto& c : pairing(t, fam, tg).checks) {
      ++total;
      if (c.status == CheckStatus::pass) {
        ++agreed;
      } else {
        note(o, false, "ex7.2 " + c.id + " " + to_string(c.status));
      }
    }
  }
  note(o, total > 0 && agreed == total,
       "ex7.2 " + std::to_string(agreed) + "/" + std::to_string(total) + " agree");
  return o;
}

// 6: invariant suites.
Outcome invariants() {
  Outcome o;
  double norm_defect = 0.0, orth = 0.0;
  for (const auto& e : {helix_example(), trig_sum_example(), slant_helix_entry()}) {
    const IndicatrixData data(e.curve, Grid(e.regular_domain.lo, e.regular_domain.hi, kSamples));
    const Grid& g = data.grid();
    for (auto fam : kFamilies) {
      const DirectionKind kind = pairing_kind(e, fam, data);
      for (std::size_t i = 0; i < g.count(); ++i) {
        const auto c = coefficients(kind, data, g.node(i));
        norm_defect = std::max(norm_defect, std::abs(c.vector().norm() - 1.0));
        if (i == 0 || i + 1 == g.count()) continue;
        // x x' + y y' + z z' with derivatives in s_T by central differences.
        const double h = 1e-4;
        const auto cp = coefficients(kind, data, g.node(i) + h);
        const auto cm = coefficients(kind, data, g.node(i) - h);
        const Vec3 d = (cp.vector() - cm.vector()) / (cp.s_T - cm.s_T);
        orth = std::max(orth, std::abs(c.vector().dot(d)));
      }
    }
  }
  note(o, norm_defect <= kCoefficientNormTol, "coefficient norm " + sci(norm_defect));
  note(o, orth <= kOrthogonalityTol, "orthogonality " + sci(orth));

  double frame = 0.0, system = 0.0;
  for (const auto& e : all_entries()) {
    if (e.degenerate_frame) continue;
    const Grid g(e.regular_domain.lo, e.regular_domain.hi, 41);
    for (std::size_t i = 1; i + 1 < g.count(); ++i) {
      const auto f = frenet_apparatus(e.curve, g.node(i));
      frame = std::max({frame, std::abs(f.T.dot(f.N)), std::abs(f.T.dot(f.B)),
                        std::abs(f.N.dot(f.B)), std::abs(f.T.norm() - 1.0),
                        std::abs(f.N.norm() - 1.0), std::abs(f.B.norm() - 1.0),
                        (f.T.cross(f.N) - f.B).norm()});
      const auto r = frenet_system_residuals(e.curve, g.node(i));
      system = std::max({system, r[0], r[1], r[2]});
    }
  }
  note(o, frame <= kOrthonormalTol, "orthonormality " + sci(frame));
  note(o, system <= kFrenetSystemTol, "Frenet system " + sci(system));

  const auto t = trig_sum_example();
  auto data = std::make_shared<const IndicatrixData>(
      t.curve, Grid(t.regular_domain.lo, t.regular_domain.hi, kSamples));
  const auto dc = integrate_direction_curve(
      figure_kind(DirectionFamily::bertrand, *t.figure_constants), data);
  const CorollaryReport c = corollary_check(dc);
  note(o, c.sigma_residual <= kSigmaInvarianceTol, "sigma invariance " + sci(c.sigma_residual));
  return o;
}

// 7: numerics kernel.
Outcome numerics() {
  Outcome o;
  auto f = [](double t) { return 4.0 * t * t * t - 3.0 * t * t + 2.0 * t - 1.0; };
  auto F = [](double t) { return t * t * t * t - t * t * t + t * t - t; };
  double simpson = 0.0;
  for (std::size_t n : {5u, 11u, 101u}) {
    const Grid g(-1.0, 2.0, n);
    const auto tab = cumulative_simpson(f, g);
    for (std::size_t i = 0; i < tab.size(); ++i) {
      simpson = std::max(simpson, std::abs(tab.values[i] - (F(g.node(i)) - F(-1.0))));
    }
  }
  note(o, simpson <= kExactTol, "Simpson " + sci(simpson));

  const double h = std::ldexp(1.0, -8);
  auto p1 = [](double t) { return -2.0 * t + 5.0; };
  auto p2 = [](double t) { return 3.0 * t * t - 2.0 * t + 5.0; };
  auto p3 = [](double t) { return 2.0 * t * t * t - t * t + 4.0 * t - 1.0; };
  double diff = 0.0;
  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
  for (double t : {-1.5, 0.0, 0.5, 2.0}) {
    diff = std::max(diff, rel(central_difference(p1, t, 1, h), -2.0));
    diff = std::max(diff, rel(central_difference(p2, t, 1, h), 6.0 * t - 2.0));
    diff = std::max(diff, rel(central_difference(p2, t, 2, h), 6.0));
    diff = std::max(diff, rel(central_difference(p3, t, 2, h), 12.0 * t - 2.0));
    diff = std::max(diff, rel(central_difference(p3, t, 3, h), 12.0));
  }
  note(o, diff <= kExactTol, "differences " + sci(diff));

  const auto tab = arclength_table(trig_sum_example().curve, Grid(0.0, kPi, kSamples));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, kPi);
  double inv = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    inv = std::max(inv, std::abs(invert_monotone(tab, interpolate_monotone(tab, t)) - t));
  }
  note(o, inv <= kInversionTol, "arc-length inversion " + sci(inv));
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8: reproduce runs are complete, passing and byte-identical.
Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root =
      fs::temp_directory_path() / ("frenetlab_acceptance_" + std::to_string(::getpid()));
  for (const std::string target : {"ex7.1", "ex7.2"}) {
    std::vector<fs::path> dirs{root / (target + "_a"), root / (target + "_b")};
    bool ok = true;
    for (const auto& d : dirs) {
      cli::RunConfig c;
      c.command = cli::Command::reproduce;
      c.target = target;
      c.outdir = d.string();
      c.tolerance = kClassTol;
      std::ostringstream out, err;
      ok = ok && cli::run(c, out, err) == 0;
    }
    const std::vector<std::string> names{"curve", "indicatrix", "evolute", "bertrand", "mannheim"};
    std::size_t svgs = 0;
    bool same = true;
    for (const auto& n : names) {
      const std::string file = target + "_" + n + ".svg";
      if (fs::exists(dirs[0] / file)) ++svgs;
      same = same && slurp(dirs[0] / file) == slurp(dirs[1] / file);
    }
    const std::string summary = target + "_summary.json";
    same = same && slurp(dirs[0] / summary) == slurp(dirs[1] / summary);
    bool checks = false;
    if (fs::exists(dirs[0] / summary)) {
      const auto j = cli::Json::parse(slurp(dirs[0] / summary));
      checks = j.at("checks").at("pass").get<bool>();
    }
    note(o, ok && svgs == 5 && same && checks,
         target + " " + std::to_string(svgs) + " svg, " + (same ? "identical" : "differ") +
             ", checks " + (checks ? "pass" : "fail"));
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ex7.1 closed forms", [] { return closed_forms(helix_example(), kHelixMatchTol); }},
      {"ex7.2 closed forms", [] { return closed_forms(trig_sum_example(), kTrigMatchTol); }},
      {"indicatrix", indicatrix},
      {"theorem suite", theorem_suite},
      {"class correspondences", correspondences},
      {"invariants", invariants},
      {"numerics kernel", numerics},
      {"reproduce determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), secs, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf("%s: %zu of %zu criteria passed\n", failed ? "FAIL" : "PASS",
              criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
