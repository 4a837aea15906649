#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bsym/bsym.hpp"

using namespace bsym;

namespace {

HamiltonianSpec mech(PotentialSpec v) { return HamiltonianSpec::mechanical(std::move(v)); }

IntegratorConfig rk4(double step, double t_max) {
  IntegratorConfig c;
  c.step = step;
  c.t_max = t_max;
  return c;
}

IntegratorConfig adaptive(double t_max) {
  IntegratorConfig c;
  c.method = Method::rk_adaptive;
  c.step = 1e-2;
  c.t_max = t_max;
  return c;
}

const PhaseStructure kPendulum = PhaseStructure::twisted().with_angles({true});

}  // namespace

TEST(Classify, StokesEscape) {
  const auto s = PhaseStructure::twisted();
  const auto h = mech(PotentialSpec::linear(1.0));
  const auto tr = integrate(s, h, PhaseState({0.0}, {1.0}), adaptive(60.0));
  const auto c = classify_orbit(tr, s, h);
  EXPECT_EQ(c.kind, OrbitKind::escape_orbit);
  ASSERT_TRUE(c.limit_state);
  EXPECT_NEAR(c.limit_state->q(0), 1.0, 1e-6);
  EXPECT_NEAR(c.limit_state->p(0), 0.0, 1e-5);
  EXPECT_FALSE(c.period);
}

TEST(Classify, FixedPointOnZ) {
  for (auto v : {PotentialSpec::linear(1.0), PotentialSpec::pure_quadratic(3.0), PotentialSpec::periodic(1.0)}) {
    const auto tr = integrate(PhaseStructure::twisted(), mech(v), PhaseState({1.5}, {0.0}), rk4(1e-3, 10.0));
    EXPECT_EQ(classify_orbit(tr, PhaseStructure::twisted(), mech(v)).kind, OrbitKind::fixed_point);
  }
}

TEST(Classify, PendulumAboveSeparatrixIsPeriodic) {
  const auto h = mech(PotentialSpec::periodic(1.0));
  const auto tr = integrate(kPendulum, h, PhaseState({0.0}, {2.0}), adaptive(100.0));
  const auto c = classify_orbit(tr, kPendulum, h);
  ASSERT_EQ(c.kind, OrbitKind::periodic);
  ASSERT_TRUE(c.period);
  // Rotation period: integral of d theta / p^2 with p^2 = 2(H - cos(theta)/2), H = 2.5.
  double period = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double th = (k + 0.5) * 2 * std::numbers::pi / n;
    period += (2 * std::numbers::pi / n) / (2 * (2.5 - 0.5 * std::cos(th)));
  }
  EXPECT_NEAR(*c.period, period, 1e-6);
}

TEST(Classify, PendulumBelowSeparatrixEscapes) {
  const auto h = mech(PotentialSpec::periodic(1.0));
  const auto tr = integrate(kPendulum, h, PhaseState({std::numbers::pi}, {0.5}), adaptive(200.0));
  EXPECT_EQ(classify_orbit(tr, kPendulum, h).kind, OrbitKind::escape_orbit);
}

TEST(Classify, SeparatrixIsUndetermined) {
  // H = p^2/2 + cos(theta)/2 = 1/2 exactly.
  const auto h = mech(PotentialSpec::periodic(1.0));
  const double th = std::numbers::pi / 2;
  const double p = 1.0;  // 1/2 + cos(pi/2)/2 = 1/2
  const auto tr = integrate(kPendulum, h, PhaseState({th}, {p}), adaptive(50.0));
  EXPECT_EQ(classify_orbit(tr, kPendulum, h).kind, OrbitKind::undetermined);
}

TEST(Classify, UnboundedBackwardStokes) {
  auto cfg = adaptive(100.0);
  cfg.reverse = true;
  const auto s = PhaseStructure::twisted();
  const auto h = mech(PotentialSpec::linear(1.0));
  const auto tr = integrate(s, h, PhaseState({0.0}, {1.0}), cfg);
  EXPECT_EQ(classify_orbit(tr, s, h).kind, OrbitKind::unbounded);
}

TEST(Classify, ShortRunIsUndetermined) {
  const auto s = PhaseStructure::twisted();
  const auto h = mech(PotentialSpec::linear(1.0));
  const auto tr = integrate(s, h, PhaseState({0.0}, {1.0}), rk4(1e-2, 1.0));
  EXPECT_EQ(classify_orbit(tr, s, h).kind, OrbitKind::undetermined);
}

TEST(Classify, HeteroclinicSegmentApproachesFixedPoint) {
  // With a loose fp_epsilon the decaying Stokes orbit is declared stopped
  // before it reaches the z_epsilon band.
  auto cfg = rk4(1e-2, 200.0);
  cfg.fp_epsilon = 1e-3;
  const auto s = PhaseStructure::twisted();
  const auto h = mech(PotentialSpec::linear(1.0));
  const auto tr = integrate(s, h, PhaseState({0.0}, {0.5}), cfg);
  ClassifyOptions o;
  o.fp_epsilon = cfg.fp_epsilon;
  const auto c = classify_orbit(tr, s, h, o);
  ASSERT_EQ(tr.terminal().kind, EventKind::fixed_point);
  EXPECT_EQ(c.kind, OrbitKind::heteroclinic_segment);
  ASSERT_TRUE(c.limit_state);
}

TEST(Portrait, StokesGridAllEscape) {
  std::vector<PhaseState> grid;
  for (int i = 0; i <= 6; ++i)
    for (double p : {1.0, -1.0}) grid.emplace_back(std::vector<double>{-3.0 + i}, std::vector<double>{p});
  const auto recs =
      phase_portrait(PhaseStructure::twisted(), mech(PotentialSpec::linear(1.0)), grid, adaptive(40.0));
  ASSERT_EQ(recs.size(), grid.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(recs[k].initial, grid[k]);
    EXPECT_FALSE(recs[k].error);
    EXPECT_EQ(recs[k].classification.kind, OrbitKind::escape_orbit);
    EXPECT_EQ(recs[k].backward_classification.kind, OrbitKind::unbounded);
    EXPECT_TRUE(recs[k].backward.reversed);
  }
}

TEST(Portrait, CanonicalQuadraticEllipsesAndOrigin) {
  const std::vector<PhaseState> grid{PhaseState({1.0}, {0.0}), PhaseState({2.0}, {0.0}), PhaseState({3.0}, {0.0}),
                                     PhaseState({0.0}, {0.0})};
  const auto recs =
      phase_portrait(PhaseStructure::canonical(), mech(PotentialSpec::pure_quadratic(2.0)), grid, rk4(1e-3, 20.0));
  for (int k = 0; k < 3; ++k) {
    ASSERT_EQ(recs[k].classification.kind, OrbitKind::periodic) << k;
    EXPECT_NEAR(*recs[k].classification.period, 2 * std::numbers::pi, 1e-6);
  }
  EXPECT_EQ(recs[3].classification.kind, OrbitKind::fixed_point);
}

TEST(Portrait, FailingRecordDoesNotAbortBatch) {
  // An s-chart state at s <= 0 makes the Hamiltonian throw for that record only.
  const auto sys = timescale::to_s_coordinates(PhaseStructure::extended_canonical(),
                                               HamiltonianSpec::rescaled_extended(PotentialSpec::linear(1.0), 1.0), 1.0);
  const std::vector<PhaseState> grid{PhaseState({0.0}, {1.0}, 0.5, 0.1), PhaseState({0.0}, {1.0}, -0.5, 0.1),
                                     PhaseState({0.0}, {1.0}, 0.9, 0.1)};
  const auto recs = phase_portrait(sys.structure, sys.hamiltonian, grid, rk4(1e-3, 0.1));
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_FALSE(recs[0].error);
  EXPECT_TRUE(recs[1].error);
  EXPECT_FALSE(recs[2].error);
}

TEST(LevelSet, Examples) {
  const auto s = PhaseStructure::twisted();
  const auto h = mech(PotentialSpec::linear(1.0));
  EXPECT_LT(level_set_residual(integrate(s, h, PhaseState({0.0}, {1.0}), rk4(1e-3, 20.0)), h), 1e-8);
  EXPECT_EQ(level_set_residual(integrate(s, h, PhaseState({0.0}, {0.0}), rk4(1e-3, 20.0)), h), 0.0);
  const auto hp = mech(PotentialSpec::periodic(1.0));
  EXPECT_LT(level_set_residual(integrate(kPendulum, hp, PhaseState({0.0}, {2.0}), rk4(1e-3, 10.0)), hp), 1e-8);
}

TEST(LevelSet, OrbitsStayOnClassicalLevelSets) {
  for (auto v : {PotentialSpec::linear(1.0), PotentialSpec::pure_quadratic(1.0),
                 PotentialSpec::general_quadratic(1.0, 0.5), PotentialSpec::periodic(1.0)}) {
    const auto h = mech(v);
    for (double q0 : {-1.0, 0.0, 2.0})
      for (double p0 : {-1.5, 0.4, 1.0}) {
        const auto tr = integrate(PhaseStructure::twisted(), h, PhaseState({q0}, {p0}), rk4(1e-2, 20.0));
        EXPECT_LT(level_set_residual(tr, h), 1e-6);
      }
  }
}

TEST(Symmetry, MomentumReflectionPreservesClassification) {
  const std::vector<std::pair<PhaseStructure, PotentialSpec>> systems{
      {PhaseStructure::twisted(), PotentialSpec::linear(1.0)},
      {PhaseStructure::twisted(), PotentialSpec::pure_quadratic(1.0)},
      {kPendulum, PotentialSpec::periodic(1.0)}};
  for (const auto& [s, v] : systems) {
    const auto h = mech(v);
    std::vector<PhaseState> up, down;
    for (double q0 : {-1.0, 0.5, 2.0})
      for (double p0 : {0.3, 1.7}) {
        up.emplace_back(std::vector<double>{q0}, std::vector<double>{p0});
        down.emplace_back(std::vector<double>{q0}, std::vector<double>{-p0});
      }
    const auto a = phase_portrait(s, h, up, adaptive(80.0));
    const auto b = phase_portrait(s, h, down, adaptive(80.0));
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].classification.kind, b[k].classification.kind);
      EXPECT_EQ(a[k].backward_classification.kind, b[k].backward_classification.kind);
    }
  }
}

TEST(SingularPeriodic, EndpointsAndSegments) {
  const auto s = PhaseStructure::twisted();
  for (auto [lam, edge] : {std::pair{1.0, 2.0}, std::pair{4.0, 1.0}}) {
    const auto h = mech(PotentialSpec::pure_quadratic(lam));
    const auto orbit = assemble_singular_periodic(s, h, 1.0);
    EXPECT_NEAR(orbit.left_endpoint.q(0), -edge, 1e-5);
    EXPECT_NEAR(orbit.right_endpoint.q(0), edge, 1e-5);
    EXPECT_EQ(orbit.left_endpoint.p(0), 0.0);
    EXPECT_NEAR(eval(h, orbit.upper_segment.front()), eval(h, orbit.lower_segment.front()), 1e-8);
    for (const auto& x : orbit.upper_segment.states) EXPECT_GT(x.p(0), 0.0);
    for (const auto& x : orbit.lower_segment.states) EXPECT_LT(x.p(0), 0.0);
    EXPECT_LT(level_set_residual(orbit.upper_segment, h), 1e-8);
    EXPECT_LT(level_set_residual(orbit.lower_segment, h), 1e-8);
  }
}

TEST(SingularPeriodic, Errors) {
  const auto s = PhaseStructure::twisted();
  EXPECT_THROW(assemble_singular_periodic(s, mech(PotentialSpec::pure_quadratic(1.0)), 0.0), DomainError);
  EXPECT_THROW(assemble_singular_periodic(s, mech(PotentialSpec::linear(1.0)), 1.0), DomainError);
  EXPECT_THROW(assemble_singular_periodic(PhaseStructure::canonical(), mech(PotentialSpec::pure_quadratic(1.0)), 1.0),
               DomainError);
}
