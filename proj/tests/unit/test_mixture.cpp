#include <gtest/gtest.h>

#include <cmath>

#include "drt/error.hpp"
#include "drt/lp_oracle.hpp"
#include "drt/mixture.hpp"
#include "drt/radar.hpp"
#include "oracles.hpp"

using namespace drt;

namespace {

const DesignGrid kToy({{"a", 0, 1}, {"b", 1, 0.9}, {"c", 2, 0.4}});

bool has_violation(const KktCertificate& cert, const std::string& kind, const std::string& id = "") {
  for (const KktViolation& v : cert.violations)
    if (v.kind == kind && (id.empty() || v.design_id == id)) return true;
  return false;
}

struct RadarFixture {
  CurveGeometry geom = analyze_curve(DetectionCurve(1.0, 1e-5));
  DesignGrid grid = radar_design_grid(geom, 20.0, 401, true);  // step 0.05
  FrontSample front = build_front(grid);
  EnvelopeResult env = lower_convex_envelope(front);
};

}  // namespace

TEST(BuildMixture, MidpointSymmetry) {
  const FrontSample f = build_front(DesignGrid({{"a", 0, 1}, {"c", 2, 0.4}}));
  const MixedStrategy m = build_mixture(lower_convex_envelope(f), f, 1.0);
  ASSERT_EQ(m.atoms.size(), 2u);
  EXPECT_DOUBLE_EQ(m.atoms[0].weight, 0.5);
  EXPECT_EQ(m.atoms[0].xi, 0);
  EXPECT_DOUBLE_EQ(m.atoms[1].weight, 0.5);
  EXPECT_EQ(m.atoms[1].xi, 2);
  EXPECT_NEAR(expected_performance(m, f), 0.7, 1e-15);
}

TEST(BuildMixture, SingleAtomCases) {
  const FrontSample f = build_front(kToy);
  const EnvelopeResult env = lower_convex_envelope(f);
  const MixedStrategy on = build_mixture(env, f, 2.0);
  ASSERT_EQ(on.atoms.size(), 1u);
  EXPECT_EQ(on.atoms[0].weight, 1);
  EXPECT_EQ(expected_performance(on, f), 0.4);
  const MixedStrategy past = build_mixture(env, f, 9.0);
  ASSERT_EQ(past.atoms.size(), 1u);
  EXPECT_EQ(past.atoms[0].xi, 2);
  const MixedStrategy at_zero = build_mixture(env, f, 0.0);
  ASSERT_EQ(at_zero.atoms.size(), 1u);
  EXPECT_EQ(expected_performance(at_zero, f), 1);
}

TEST(BuildMixture, InfeasibleAndInconsistent) {
  const FrontSample f = build_front(DesignGrid({{"a", 1, 1}, {"b", 2, 0.5}}));
  const EnvelopeResult env = lower_convex_envelope(f);
  EXPECT_THROW(build_mixture(env, f, 0.5), Error);
  const FrontSample other = build_front(kToy);
  EXPECT_THROW(build_mixture(lower_convex_envelope(other), f, 1.5), Error);
}

TEST(BuildMixture, RadarWeightsFromMeanConstraint) {
  RadarFixture r;
  const double pt = oracle::tangent_power_bisect(1.0, 1e-5);
  for (double c : {1.0, 7.0}) {
    const MixedStrategy m = build_mixture(r.env, r.front, c);
    ASSERT_EQ(m.atoms.size(), 2u);
    EXPECT_EQ(m.atoms[0].xi, 0);
    EXPECT_NEAR(m.atoms[1].xi, pt, 1e-9);
    EXPECT_NEAR(m.atoms[1].weight, c / pt, 1e-9);
    EXPECT_NEAR(m.mean_resource(), c, 1e-12 * c);
  }
  const MixedStrategy m1 = build_mixture(r.env, r.front, 1.0);
  EXPECT_NEAR(m1.atoms[0].weight, 0.8937, 5e-5);
  EXPECT_NEAR(m1.atoms[1].weight, 0.1063, 5e-5);
  const MixedStrategy m7 = build_mixture(r.env, r.front, 7.0);
  EXPECT_NEAR(m7.atoms[0].weight, 0.2559, 5e-5);
  EXPECT_NEAR(m7.atoms[1].weight, 0.7441, 5e-5);
  const MixedStrategy m15 = build_mixture(r.env, r.front, 15.0);
  ASSERT_EQ(m15.atoms.size(), 1u);
  EXPECT_NEAR(m15.atoms[0].xi, 15, 1e-12);
}

TEST(ExpectedPerformance, RadarJensenGain) {
  RadarFixture r;
  const MixedStrategy m = build_mixture(r.env, r.front, 1.0);
  // 0.1063 f(9.4070) + 0.8937 f(0), evaluated in 30-digit arithmetic.
  EXPECT_NEAR(-expected_performance(m, r.front), 0.0351733200112432, 1e-9);
  EXPECT_GT(-expected_performance(m, r.front), 10 * std::sqrt(1e-5));
}

TEST(ExpectedPerformance, JensenGainInsideSegments) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const FrontSample f = build_front(random_design_grid(seed, 60));
    const EnvelopeResult env = lower_convex_envelope(f);
    for (const EnvelopeSegment& s : env.segments) {
      const double c = 0.5 * (s.xi_lo + s.xi_hi);
      const auto i = f.find(c);
      if (!i) continue;
      if (f.points[*i].g <= s.value_at(c) + 1e-9 * f.perf_scale()) continue;
      EXPECT_LT(expected_performance(build_mixture(env, f, c), f), f.points[*i].g);
    }
  }
}

TEST(ExpectedPerformance, RejectsOffFrontAtom) {
  const FrontSample f = build_front(kToy);
  MixedStrategy m;
  m.atoms.push_back({1.0, 1.5, {}});
  EXPECT_THROW(expected_performance(m, f), Error);
}

TEST(VerifyKkt, AcceptsToyMixture) {
  const FrontSample f = build_front(kToy);
  const MixedStrategy m = build_mixture(lower_convex_envelope(f), f, 1.0);
  const KktCertificate cert = verify_kkt(kToy, m, 1.0);
  EXPECT_TRUE(cert.valid());
  EXPECT_NEAR(cert.lambda2, 0.3, 1e-12);
  for (const DesignSlack& s : cert.slacks) {
    EXPECT_GE(s.nu, -1e-9);
    if (s.id != "b") EXPECT_NEAR(s.nu, 0, 1e-12);
  }
}

TEST(VerifyKkt, AcceptsRadarMixtures) {
  RadarFixture r;
  for (double c : {0.0, 1.0, 7.0, 15.0, 18.3}) {
    const MixedStrategy m = build_mixture(r.env, r.front, c);
    const KktCertificate cert = verify_kkt(r.grid, m, c);
    EXPECT_TRUE(cert.valid()) << "budget " << c;
    for (const DesignSlack& s : cert.slacks) EXPECT_GE(s.nu, -1e-9 * cert.scale);
    for (const std::string& id : cert.support_ids)
      for (const DesignSlack& s : cert.slacks)
        if (s.id == id) EXPECT_NEAR(s.nu, 0, 1e-9);
  }
}

TEST(VerifyKkt, ConvexFrontFullBudget) {
  std::vector<DesignEntry> e;
  for (int i = 0; i <= 20; ++i) e.push_back({"x" + std::to_string(i), i * 0.5, std::exp(-0.3 * i * 0.5)});
  const DesignGrid grid(e);
  const FrontSample f = build_front(grid);
  const MixedStrategy m = build_mixture(lower_convex_envelope(f), f, 4.0);
  ASSERT_EQ(m.atoms.size(), 1u);
  const KktCertificate cert = verify_kkt(grid, m, 4.0);
  EXPECT_TRUE(cert.valid());
  EXPECT_EQ(cert.budget_slack, 0);
  EXPECT_GT(cert.lambda2, 0);
}

TEST(VerifyKkt, RejectsAtomAboveEnvelope) {
  const FrontSample f = build_front(kToy);
  MixedStrategy m = build_mixture(lower_convex_envelope(f), f, 1.0);
  MixedStrategy bad;
  bad.budget = 1.0;
  bad.atoms.push_back({1.0, 1.0, {{"b", 1.0}}});
  const KktCertificate cert = verify_kkt(kToy, bad, 1.0);
  EXPECT_FALSE(cert.valid());
  EXPECT_TRUE(has_violation(cert, "off_envelope", "b"));
  EXPECT_TRUE(verify_kkt(kToy, m, 1.0).valid());
}

TEST(VerifyKkt, RejectsWrongWeights) {
  const FrontSample f = build_front(kToy);
  MixedStrategy m = build_mixture(lower_convex_envelope(f), f, 0.5);
  std::swap(m.atoms[0].weight, m.atoms[1].weight);
  const KktCertificate cert = verify_kkt(kToy, m, 0.5);
  EXPECT_TRUE(has_violation(cert, "mean_constraint"));
}

TEST(VerifyKkt, RejectsMalformedMixtures) {
  MixedStrategy m;
  m.atoms.push_back({0.7, 0.0, {{"a", 1.0}}});
  EXPECT_TRUE(has_violation(verify_kkt(kToy, m, 1.0), "normalization"));
  m.atoms = {{1.2, 0.0, {{"a", 1.0}}}, {-0.2, 2.0, {{"c", 1.0}}}};
  EXPECT_TRUE(has_violation(verify_kkt(kToy, m, 1.0), "negative_weight", "c"));
  m.atoms = {{1.0, 0.0, {{"nope", 1.0}}}};
  EXPECT_TRUE(has_violation(verify_kkt(kToy, m, 1.0), "unknown_design", "nope"));
}

TEST(VerifyKkt, RejectsNonCollinearSupport) {
  const DesignGrid grid({{"a", 0, 1}, {"b", 1, 0.5}, {"c", 2, 0.4}});
  MixedStrategy m;
  m.atoms = {{0.4, 0, {{"a", 1}}}, {0.2, 1, {{"b", 1}}}, {0.4, 2, {{"c", 1}}}};
  EXPECT_TRUE(has_violation(verify_kkt(grid, m, 1.0), "support_not_collinear"));
}

TEST(VerifyKkt, RejectsSuboptimalPureStrategy) {
  MixedStrategy m;
  m.atoms = {{1.0, 0.0, {{"a", 1.0}}}};
  EXPECT_FALSE(verify_kkt(kToy, m, 1.0).valid());
}
