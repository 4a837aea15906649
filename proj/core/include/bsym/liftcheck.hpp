#pragma once

// Sampling test for whether a Hamiltonian flow on a (b-)cotangent bundle can be
// the cotangent lift of a flow on the base: a lift moves base points
// independently of the fiber, so the position components of its generator
// must not depend on the momenta.

#include <optional>
#include <string_view>
#include <vector>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"

namespace bsym {

enum class Projectability { projectable, not_projectable, inconclusive };

std::string_view to_string(Projectability verdict);

struct LiftWitness {
  PhaseState first;
  PhaseState second;
  /// Max-norm difference of the position components of the field.
  double difference = 0.0;
};

struct LiftVerdict {
  Projectability verdict = Projectability::inconclusive;
  /// Present iff verdict == not_projectable; the largest observed variation.
  std::optional<LiftWitness> witness;
};

/// Samples the position components of X_H at (q, p) for every base point q
/// and fiber sample p. Fiber samples must be off the critical set of a
/// twisted structure (throws DomainError otherwise).
LiftVerdict projectability_test(const PhaseStructure& structure, const HamiltonianSpec& h,
                                const std::vector<std::vector<double>>& base_points,
                                const std::vector<std::vector<double>>& fiber_samples, double tol = 1e-9);

/// Scalar convenience overload for n = 1.
LiftVerdict projectability_test(const PhaseStructure& structure, const HamiltonianSpec& h,
                                const std::vector<double>& base_points, const std::vector<double>& fiber_samples,
                                double tol = 1e-9);

/// The toric moment map c log|p_1| + p_2 + ... + p_n of a lifted torus action
/// on a twisted structure of modular weight c. Its field has unit angular
/// speed and zero momentum drift.
HamiltonianSpec toric_moment_field(const PhaseStructure& structure, double c);

}  // namespace bsym
