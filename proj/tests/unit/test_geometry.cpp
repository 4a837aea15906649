#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bsym/bsym.hpp"

using namespace bsym;

namespace {

const HamiltonianSpec kLinear = HamiltonianSpec::mechanical(PotentialSpec::linear(1.0));

std::vector<double> unit(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  return v;
}

}  // namespace

TEST(Structure, ValidationRules) {
  EXPECT_NO_THROW(PhaseStructure::twisted().validate());
  PhaseStructure s = PhaseStructure::twisted();
  s.modular_weight = 0.0;
  EXPECT_THROW(s.validate(), DomainError);
  s = PhaseStructure::nontwisted(2);
  s.singular_index = 2;
  EXPECT_THROW(s.validate(), DomainError);
  s = PhaseStructure::canonical(0);
  EXPECT_THROW(s.validate(), DomainError);
  EXPECT_THROW(PhaseStructure::canonical(2).with_angles({true}), DomainError);
}

TEST(Structure, KindNamesRoundTrip) {
  for (auto k : {StructureKind::canonical, StructureKind::twisted_b, StructureKind::nontwisted_b,
                 StructureKind::extended_canonical, StructureKind::extended_b_s})
    EXPECT_EQ(structure_kind_from_string(to_string(k)), k);
  EXPECT_THROW(structure_kind_from_string("folded"), DomainError);
}

TEST(Structure, StateShapeChecks) {
  EXPECT_THROW(PhaseState({0.0, 1.0}, {1.0}), DomainError);
  EXPECT_THROW(PhaseStructure::twisted(2).check_state(PhaseState({0.0}, {1.0})), DomainError);
  EXPECT_THROW(PhaseStructure::extended_canonical().check_state(PhaseState({0.0}, {1.0})), DomainError);
  EXPECT_NO_THROW(PhaseStructure::extended_canonical().check_state(PhaseState({0.0}, {1.0}, 0.0, 0.0)));
  const PhaseState x({1.0, 2.0}, {3.0, 4.0}, 5.0, 6.0);
  EXPECT_EQ(x.pairs(), 3u);
  EXPECT_EQ(x.ext_position(), 5.0);
  EXPECT_EQ(x.ext_momentum(), 6.0);
  EXPECT_EQ(x.p(1), 4.0);
  EXPECT_EQ(PhaseState::from_coords(2, true, x.coords()), x);
  EXPECT_THROW(PhaseState({1.0}, {2.0}).ext_position(), DomainError);
}

TEST(DefiningFunction, Examples) {
  EXPECT_EQ(defining_function(PhaseStructure::twisted(), PhaseState({3.0}, {0.0})), 0.0);
  EXPECT_EQ(defining_function(PhaseStructure::twisted(), PhaseState({0.0}, {2.0})), 2.0);
  EXPECT_EQ(defining_function(PhaseStructure::nontwisted(), PhaseState({0.5}, {7.0})), 0.5);
  EXPECT_EQ(defining_function(PhaseStructure::extended_b_s(), PhaseState({0.5}, {7.0}, 0.25, 1.0)), 0.25);
  EXPECT_EQ(defining_function(PhaseStructure::twisted(2, 1.0, 1), PhaseState({0.0, 0.0}, {5.0, -3.0})), -3.0);
  EXPECT_THROW(defining_function(PhaseStructure::canonical(), PhaseState({0.0}, {1.0})), DomainError);
}

TEST(Bivector, TwistedPairingIsP) {
  const Bivector b = poisson_bivector(PhaseStructure::twisted(), PhaseState({0.0}, {2.0}));
  EXPECT_DOUBLE_EQ(b(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(b(1, 0), -2.0);
  EXPECT_EQ(b(0, 0), 0.0);
  EXPECT_EQ(poisson_rank(PhaseStructure::twisted(), PhaseState({0.0}, {2.0})), 2u);
}

TEST(Bivector, VanishesOnZ) {
  const PhaseState x({5.0}, {0.0});
  const Bivector b = poisson_bivector(PhaseStructure::twisted(), x);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(b(i, j), 0.0);
  EXPECT_EQ(poisson_rank(PhaseStructure::twisted(), x), 0u);
}

TEST(Bivector, CanonicalIsStandardPairing) {
  const auto s = PhaseStructure::canonical(2);
  for (const PhaseState& x : {PhaseState({0.0, 1.0}, {2.0, 3.0}), PhaseState({-4.0, 0.0}, {0.0, 0.0})}) {
    const Bivector b = poisson_bivector(s, x);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const double expect = (j == i + 2) ? 1.0 : (i == j + 2) ? -1.0 : 0.0;
        EXPECT_EQ(b(i, j), expect) << i << "," << j;
      }
    EXPECT_EQ(poisson_rank(s, x), 4u);
  }
}

TEST(Bivector, ExtendedBlocks) {
  const PhaseState x({1.0}, {2.0}, 0.5, 3.0);
  const Bivector c = poisson_bivector(PhaseStructure::extended_canonical(), x);
  EXPECT_EQ(c(0, 2), 1.0);
  EXPECT_EQ(c(1, 3), -1.0);
  const Bivector s = poisson_bivector(PhaseStructure::extended_b_s(), x);
  EXPECT_EQ(s(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(s(1, 3), 0.5);
  EXPECT_EQ(poisson_rank(PhaseStructure::extended_b_s(), PhaseState({1.0}, {2.0}, 0.0, 3.0)), 2u);
}

TEST(Bivector, RankDropsExactlyBelowTolerance) {
  const auto s = PhaseStructure::twisted(2);
  EXPECT_EQ(poisson_rank(s, PhaseState({0.0, 0.0}, {2e-14, 1.0})), 4u);
  EXPECT_EQ(poisson_rank(s, PhaseState({0.0, 0.0}, {-2e-14, 1.0})), 4u);
  EXPECT_EQ(poisson_rank(s, PhaseState({0.0, 0.0}, {5e-15, 1.0})), 2u);
  EXPECT_EQ(poisson_rank(s, PhaseState({0.0, 0.0}, {0.0, 1.0})), 2u);
  PhaseStructure loose = s;
  loose.degeneracy_tol = 1e-3;
  EXPECT_EQ(poisson_rank(loose, PhaseState({0.0, 0.0}, {5e-4, 1.0})), 2u);
}

TEST(VectorField, Examples) {
  auto v = hamiltonian_vector_field(PhaseStructure::twisted(), kLinear, PhaseState({0.0}, {2.0}));
  EXPECT_DOUBLE_EQ(v[0], 4.0);
  EXPECT_DOUBLE_EQ(v[1], -1.0);
  v = hamiltonian_vector_field(PhaseStructure::twisted(), kLinear, PhaseState({5.0}, {0.0}));
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 0.0);
  v = hamiltonian_vector_field(PhaseStructure::canonical(), kLinear, PhaseState({0.0}, {2.0}));
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_DOUBLE_EQ(v[1], -0.5);
}

TEST(VectorField, NontwistedScalesByQ) {
  const auto v = hamiltonian_vector_field(PhaseStructure::nontwisted(), kLinear, PhaseState({3.0}, {2.0}));
  EXPECT_DOUBLE_EQ(v[0], 6.0);
  EXPECT_DOUBLE_EQ(v[1], -1.5);
}

TEST(VectorField, ModularWeightDividesSingularPair) {
  const auto v = hamiltonian_vector_field(PhaseStructure::twisted(1, 2.0), kLinear, PhaseState({0.0}, {2.0}));
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_DOUBLE_EQ(v[1], -0.5);
}

TEST(VectorField, RejectsMismatchedHamiltonian) {
  EXPECT_THROW(hamiltonian_vector_field(PhaseStructure::twisted(2), kLinear, PhaseState({0.0, 0.0}, {1.0, 1.0})),
               DomainError);
}

TEST(Form, Examples) {
  const auto s = PhaseStructure::twisted();
  const PhaseState x({0.0}, {2.0});
  EXPECT_DOUBLE_EQ(evaluate_form(s, x, unit(2, 1), unit(2, 0)), 0.5);
  const std::vector<double> u{0.3, -1.7};
  EXPECT_EQ(evaluate_form(s, x, u, u), 0.0);
  EXPECT_EQ(evaluate_form(PhaseStructure::canonical(), x, u, u), 0.0);
  EXPECT_THROW(evaluate_form(s, PhaseState({0.0}, {0.0}), unit(2, 1), unit(2, 0)), DomainError);
  EXPECT_THROW(evaluate_form(s, x, unit(3, 1), unit(2, 0)), DomainError);
}

// Random-state properties.

class GeometryProperties : public ::testing::Test {
 protected:
  std::mt19937 rng{20240607};
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double off_z(double a, double b) {
    double v;
    do v = uniform(a, b);
    while (std::abs(v) < 1e-3);
    return v;
  }
};

TEST_F(GeometryProperties, FormInvertsBivector) {
  const std::vector<PotentialSpec> potentials{PotentialSpec::linear(1.3), PotentialSpec::pure_quadratic(0.7),
                                              PotentialSpec::general_quadratic(2.0, 0.4), PotentialSpec::periodic(1.0)};
  const std::vector<PhaseStructure> structures{PhaseStructure::canonical(2), PhaseStructure::twisted(2, 1.5, 0),
                                               PhaseStructure::twisted(2, 1.0, 1), PhaseStructure::nontwisted(2, 0.8)};
  for (int k = 0; k < 1000; ++k) {
    const auto& s = structures[k % structures.size()];
    const auto h = HamiltonianSpec::mechanical(potentials[k % potentials.size()], 2);
    const PhaseState x({off_z(-3, 3), off_z(-3, 3)}, {off_z(-3, 3), off_z(-3, 3)});
    const auto field = hamiltonian_vector_field(s, h, x);
    const auto dh = grad(h, x);
    std::vector<double> v(4);
    for (double& vi : v) vi = uniform(-1, 1);
    const double lhs = evaluate_form(s, x, field, v);
    double dhv = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      dhv += dh[i] * v[i];
      scale += std::abs(dh[i] * v[i]);
    }
    EXPECT_LT(std::abs(lhs + dhv), 1e-10 * std::max(1.0, scale)) << "k=" << k;
  }
}

TEST_F(GeometryProperties, FormIsAntisymmetric) {
  const auto s = PhaseStructure::extended_b_s(1, 2.0);
  for (int k = 0; k < 500; ++k) {
    const PhaseState x({uniform(-2, 2)}, {uniform(-2, 2)}, uniform(0.01, 1), uniform(-2, 2));
    std::vector<double> u(4), v(4);
    for (std::size_t i = 0; i < 4; ++i) {
      u[i] = uniform(-1, 1);
      v[i] = uniform(-1, 1);
    }
    EXPECT_EQ(evaluate_form(s, x, u, v), -evaluate_form(s, x, v, u));
  }
}

TEST_F(GeometryProperties, RankMatchesDefiningFunction) {
  for (int k = 0; k < 1000; ++k) {
    const double p = std::pow(10.0, uniform(-17, 1)) * (k % 2 ? 1 : -1);
    const PhaseState x({uniform(-2, 2)}, {p});
    const std::size_t rank = poisson_rank(PhaseStructure::twisted(), x);
    EXPECT_EQ(rank < 2, std::abs(p) < 1e-14) << p;
  }
}

TEST_F(GeometryProperties, TwistedFieldIsPTimesClassical) {
  const std::vector<PotentialSpec> potentials{PotentialSpec::linear(1.0), PotentialSpec::pure_quadratic(1.0),
                                              PotentialSpec::general_quadratic(1.0, 0.5), PotentialSpec::periodic(1.0)};
  for (int k = 0; k < 1000; ++k) {
    const auto h = HamiltonianSpec::mechanical(potentials[k % 4]);
    const PhaseState x({uniform(-5, 5)}, {off_z(-5, 5)});
    const auto b = hamiltonian_vector_field(PhaseStructure::twisted(), h, x);
    const auto c = hamiltonian_vector_field(PhaseStructure::canonical(), h, x);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(b[i], x.p(0) * c[i]);
  }
}

TEST_F(GeometryProperties, TangentToZ) {
  const auto h = HamiltonianSpec::mechanical(PotentialSpec::general_quadratic(1.0, 2.0), 2);
  for (int k = 0; k < 200; ++k) {
    const PhaseState x({uniform(-5, 5), uniform(-5, 5)}, {0.0, uniform(-5, 5)});
    EXPECT_EQ(hamiltonian_vector_field(PhaseStructure::twisted(2), h, x)[2], 0.0);
  }
}

TEST(Angles, WrapAndDifference) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(-0.5), 2 * std::numbers::pi - 0.5, 1e-15);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-15);
  const double w = wrap_angle(-1e-18);
  EXPECT_GE(w, 0.0);
  EXPECT_LT(w, 2 * std::numbers::pi);
  EXPECT_NEAR(angle_difference(0.1, 2 * std::numbers::pi - 0.1), 0.2, 1e-15);
  EXPECT_NEAR(angle_difference(2 * std::numbers::pi - 0.1, 0.1), -0.2, 1e-15);
}
