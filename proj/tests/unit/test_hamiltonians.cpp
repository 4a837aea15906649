#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bsym/bsym.hpp"

using namespace bsym;

namespace {

HamiltonianSpec mech(PotentialSpec v, std::size_t n = 1) { return HamiltonianSpec::mechanical(std::move(v), n); }

// Forward-mode dual numbers, enough to differentiate the displayed extended
// Hamiltonians without going through the library.
struct Dual {
  double v, d;
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual exp(Dual a) { return {std::exp(a.v), std::exp(a.v) * a.d}; }
Dual cnst(double c) { return {c, 0.0}; }

// V = g q (linear family with lambda_V = 2 g).
Dual rescaled_h(Dual q, Dual p, Dual t, Dual e, double lam, double g) {
  const Dual l = cnst(lam);
  return cnst(0.5) * p * p + exp(cnst(2 * lam) * t) / (l * l) * (cnst(g) * q) - exp(l * t) / l * e;
}

Dual s_chart_h(Dual q, Dual p, Dual s, Dual es, double lam, double g) {
  const Dual l = cnst(lam);
  return cnst(0.5) * p * p + cnst(g) * q / (l * s * l * s) - es / s;
}

}  // namespace

TEST(Potentials, FamilyNamesRoundTrip) {
  for (auto f : {PotentialFamily::linear, PotentialFamily::pure_quadratic, PotentialFamily::general_quadratic,
                 PotentialFamily::periodic, PotentialFamily::zero, PotentialFamily::custom})
    EXPECT_EQ(potential_family_from_string(to_string(f)), f);
  EXPECT_THROW(potential_family_from_string("cubic"), DomainError);
}

TEST(Potentials, ParameterValidation) {
  EXPECT_THROW(PotentialSpec::linear(-1.0), DomainError);
  EXPECT_THROW(PotentialSpec::linear(0.0), DomainError);
  EXPECT_THROW(PotentialSpec::periodic(std::nan("")), DomainError);
  PotentialSpec bad = PotentialSpec::linear(1.0);
  bad.alpha = 0.5;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_NO_THROW(PotentialSpec::general_quadratic(1.0, 0.5));
  EXPECT_THROW(PotentialSpec::from_function({}), DomainError);
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(eval(mech(PotentialSpec::linear(1.0)), PhaseState({2.0}, {2.0})), 3.0);
  EXPECT_DOUBLE_EQ(eval(mech(PotentialSpec::pure_quadratic(4.0)), PhaseState({1.0}, {0.0})), 1.0);
  EXPECT_DOUBLE_EQ(eval(mech(PotentialSpec::periodic(2.0)), PhaseState({0.0}, {0.0})), 1.0);
  EXPECT_DOUBLE_EQ(eval(mech(PotentialSpec::zero()), PhaseState({5.0}, {2.0})), 2.0);
}

TEST(Eval, MultiDimensionalPotentialActsOnFirstPosition) {
  const auto h = mech(PotentialSpec::linear(2.0), 3);
  EXPECT_DOUBLE_EQ(eval(h, PhaseState({1.0, 7.0, -3.0}, {1.0, 1.0, 2.0})), 1.0 + 3.0);
}

TEST(Grad, Examples) {
  auto g = grad(mech(PotentialSpec::linear(1.0)), PhaseState({0.0}, {3.0}));
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 3.0);
  g = grad(mech(PotentialSpec::periodic(2.0)), PhaseState({std::numbers::pi / 2}, {1.0}));
  EXPECT_DOUBLE_EQ(g[0], -1.0);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
}

TEST(Grad, GeneralQuadraticWithZeroAlphaIsLinear) {
  const auto a = mech(PotentialSpec::general_quadratic(2.0, 0.0));
  const auto b = mech(PotentialSpec::linear(2.0));
  for (double q = -5.0; q <= 5.0; q += 0.37) {
    const PhaseState x({q}, {0.3 * q});
    EXPECT_EQ(eval(a, x), eval(b, x));
    EXPECT_EQ(grad(a, x), grad(b, x));
  }
}

TEST(Grad, RejectsWrongShape) {
  EXPECT_THROW(grad(mech(PotentialSpec::linear(1.0), 2), PhaseState({0.0}, {1.0})), DomainError);
}

class GradientCheck : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  std::mt19937 rng(1234 + GetParam());
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::vector<HamiltonianSpec> specs{
      mech(PotentialSpec::linear(1.5), 2),
      mech(PotentialSpec::pure_quadratic(0.8), 2),
      mech(PotentialSpec::general_quadratic(1.2, -0.7), 2),
      mech(PotentialSpec::periodic(2.0), 2),
      HamiltonianSpec::plain_extended(PotentialSpec::pure_quadratic(1.0)),
      HamiltonianSpec::rescaled_extended(PotentialSpec::linear(1.0), 0.3),
      HamiltonianSpec::s_coordinates(PotentialSpec::periodic(1.0), 0.5),
      HamiltonianSpec::toric_moment(1.5, 2),
  };
  const HamiltonianSpec& h = specs[static_cast<std::size_t>(GetParam())];
  const std::size_t dim = h.dimension();
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x(dim);
    for (double& xi : x) xi = u(rng);
    if (h.extended == Extension::s_coordinates) x[dim / 2 - 1] = 0.2 + std::abs(x[dim / 2 - 1]) / 3;
    if (h.kinetic == Kinetic::toric_log && std::abs(x[dim / 2]) < 0.1) x[dim / 2] = 0.5;
    std::vector<double> g(dim);
    grad_into(h, x, g);
    for (std::size_t i = 0; i < dim; ++i) {
      const double step = 1e-6;
      std::vector<double> a = x, b = x;
      a[i] += step;
      b[i] -= step;
      const double fd = (eval_coords(h, a) - eval_coords(h, b)) / (2 * step);
      EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << h.id() << " i=" << i;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, GradientCheck, ::testing::Range(0, 8));

TEST(Extended, RescaledGradientMatchesDualNumbers) {
  const double lam = 0.7, g = 1.5;
  const auto h = HamiltonianSpec::rescaled_extended(PotentialSpec::linear(2 * g), lam);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double x[4] = {u(rng), u(rng), u(rng), u(rng)};  // q, t, p, E
    std::vector<double> gr(4);
    grad_into(h, x, gr);
    const int flat[4] = {0, 2, 1, 3};  // argument slot (q, p, t, E) -> flat index
    for (int i = 0; i < 4; ++i) {
      Dual a[4];
      for (int j = 0; j < 4; ++j) a[j] = cnst(x[flat[j]]);
      a[i].d = 1.0;
      const Dual hv = rescaled_h(a[0], a[1], a[2], a[3], lam, g);
      EXPECT_NEAR(gr[flat[i]], hv.d, 1e-12 * std::max(1.0, std::abs(hv.d)));
      EXPECT_NEAR(eval_coords(h, x), hv.v, 1e-12 * std::max(1.0, std::abs(hv.v)));
    }
  }
}

TEST(Extended, RescaledEnergyEquationHasThreeTerms) {
  // dE/dsigma = dH/dt = 2 e^{2 lam t}/lam V + e^{2 lam t}/lam^2 V_t - e^{lam t} E.
  const double lam = 1.3;
  const auto h = HamiltonianSpec::rescaled_extended(PotentialSpec::pure_quadratic(2.0), lam);
  const auto s = PhaseStructure::extended_canonical();
  const PhaseState x({0.8}, {-0.4}, 0.6, 2.1);
  const double v = 0.5 * 0.8 * 0.8;
  const double expect = 2 * std::exp(2 * lam * 0.6) / lam * v - std::exp(lam * 0.6) * 2.1;
  const auto f = hamiltonian_vector_field(s, h, x);
  EXPECT_NEAR(f[3], expect, 1e-12 * std::abs(expect));
  EXPECT_NEAR(f[1], std::exp(lam * 0.6) / lam, 1e-12);
}

TEST(Extended, SChartGradientMatchesDualNumbers) {
  const double lam = 0.4, g = 0.8;
  const auto h = HamiltonianSpec::s_coordinates(PotentialSpec::linear(2 * g), lam);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), us(0.05, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double x[4] = {u(rng), us(rng), u(rng), u(rng)};  // q, s, p, E_s
    std::vector<double> gr(4);
    grad_into(h, x, gr);
    const int flat[4] = {0, 2, 1, 3};
    for (int i = 0; i < 4; ++i) {
      Dual a[4] = {cnst(x[0]), cnst(x[2]), cnst(x[1]), cnst(x[3])};
      a[i].d = 1.0;
      const Dual hv = s_chart_h(a[0], a[1], a[2], a[3], lam, g);
      EXPECT_NEAR(gr[flat[i]], hv.d, 1e-10 * std::max(1.0, std::abs(hv.d)));
    }
  }
}

TEST(Extended, OverflowGuardAndSingularS) {
  const auto r = HamiltonianSpec::rescaled_extended(PotentialSpec::linear(1.0), 1.0);
  EXPECT_THROW(eval(r, PhaseState({0.0}, {0.0}, 701.0, 0.0)), BlowupError);
  EXPECT_NO_THROW(eval(r, PhaseState({0.0}, {0.0}, 300.0, 0.0)));
  const auto s = HamiltonianSpec::s_coordinates(PotentialSpec::linear(1.0), 1.0);
  EXPECT_THROW(eval(s, PhaseState({0.0}, {0.0}, 0.0, 0.0)), DomainError);
  EXPECT_THROW(HamiltonianSpec::rescaled_extended(PotentialSpec::linear(1.0), 0.0), DomainError);
}

TEST(Custom, AnalyticAndFiniteDifferenceGradients) {
  CustomPotential cubic;
  cubic.value = [](std::span<const double> q, double) { return q[0] * q[0] * q[0]; };
  const auto h_fd = mech(PotentialSpec::from_function(cubic));
  cubic.gradient = [](std::span<const double> q, double, std::span<double> dq) {
    dq[0] = 3 * q[0] * q[0];
    return 0.0;
  };
  const auto h_an = mech(PotentialSpec::from_function(cubic));
  const PhaseState x({1.3}, {0.2});
  EXPECT_DOUBLE_EQ(eval(h_an, x), 1.3 * 1.3 * 1.3 + 0.02);
  EXPECT_DOUBLE_EQ(grad(h_an, x)[0], 3 * 1.3 * 1.3);
  EXPECT_NEAR(grad(h_fd, x)[0], 3 * 1.3 * 1.3, 1e-6);
}

TEST(SecondOrder, StokesSolution) {
  std::vector<double> q;
  for (int k = 0; k <= 10000; ++k) q.push_back(1.0 - std::exp(-k * 1e-3));
  const auto r = second_order_residual(mech(PotentialSpec::linear(1.0)), q, 1e-3);
  ASSERT_EQ(r.size(), q.size() - 2);
  for (double v : r) EXPECT_LT(std::abs(v), 1e-5);
}

TEST(SecondOrder, ConstantSeriesHasZeroResidual) {
  const std::vector<double> q(50, 2.5);
  for (double v : second_order_residual(mech(PotentialSpec::periodic(1.0)), q, 0.1)) EXPECT_EQ(v, 0.0);
}

TEST(SecondOrder, TanhSolution) {
  std::vector<double> q;
  for (int k = 0; k <= 10000; ++k) q.push_back(std::tanh(k * 1e-3 / 2));
  for (double v : second_order_residual(mech(PotentialSpec::pure_quadratic(1.0)), q, 1e-3))
    EXPECT_LT(std::abs(v), 1e-5);
}

TEST(SecondOrder, Errors) {
  EXPECT_THROW(second_order_residual(mech(PotentialSpec::linear(1.0)), std::vector<double>{1.0, 2.0}, 0.1),
               DomainError);
  EXPECT_THROW(second_order_residual(mech(PotentialSpec::linear(1.0), 2), std::vector<double>(5, 0.0), 0.1),
               DomainError);
}

TEST(Identifiers, AreStable) {
  EXPECT_EQ(mech(PotentialSpec::linear(1.0)).id(), "mechanical:linear(lambda=1)");
  EXPECT_NE(mech(PotentialSpec::linear(1.0)).id(), mech(PotentialSpec::linear(2.0)).id());
}
