#include "bsym/liftcheck.hpp"

#include <algorithm>
#include <cmath>

#include "bsym/errors.hpp"

namespace bsym {

std::string_view to_string(Projectability verdict) {
  switch (verdict) {
    case Projectability::projectable:
      return "projectable";
    case Projectability::not_projectable:
      return "not_projectable";
    case Projectability::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

LiftVerdict projectability_test(const PhaseStructure& structure, const HamiltonianSpec& h,
                                const std::vector<std::vector<double>>& base_points,
                                const std::vector<std::vector<double>>& fiber_samples, double tol) {
  structure.validate();
  h.validate();
  if (structure.is_extended() || h.is_extended())
    throw DomainError("projectability is tested on cotangent bundles, not extended phase spaces");
  if (h.n != structure.n) throw DomainError("Hamiltonian and structure dimensions disagree");
  if (base_points.empty()) throw DomainError("at least one base point is required");
  if (fiber_samples.size() < 2) throw DomainError("at least two fiber samples per base point are required");
  if (!(tol >= 0.0)) throw DomainError("tolerance must be non-negative");
  const std::size_t n = structure.n;
  for (const auto& q : base_points)
    if (q.size() != n) throw DomainError("base point has the wrong dimension");
  for (const auto& p : fiber_samples) {
    if (p.size() != n) throw DomainError("fiber sample has the wrong dimension");
    if (structure.kind == StructureKind::twisted_b && std::abs(p[structure.singular_index]) < structure.degeneracy_tol)
      throw DomainError("fiber sample lies on the critical set");
  }

  const bool degenerate = std::all_of(fiber_samples.begin(), fiber_samples.end(),
                                      [&](const auto& p) { return p == fiber_samples.front(); });
  if (degenerate) return {};

  LiftVerdict out;
  out.verdict = Projectability::projectable;
  double worst = -1.0;
  for (const auto& q : base_points) {
    std::vector<PhaseState> states;
    std::vector<std::vector<double>> base_velocity;
    for (const auto& p : fiber_samples) {
      states.emplace_back(q, p);
      const auto x = hamiltonian_vector_field(structure, h, states.back());
      base_velocity.emplace_back(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    }
    for (std::size_t a = 0; a < states.size(); ++a) {
      for (std::size_t b = a + 1; b < states.size(); ++b) {
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(base_velocity[a][i] - base_velocity[b][i]));
        if (diff > tol && diff > worst) {
          worst = diff;
          out.verdict = Projectability::not_projectable;
          out.witness = LiftWitness{states[a], states[b], diff};
        }
      }
    }
  }
  return out;
}

LiftVerdict projectability_test(const PhaseStructure& structure, const HamiltonianSpec& h,
                                const std::vector<double>& base_points, const std::vector<double>& fiber_samples,
                                double tol) {
  std::vector<std::vector<double>> qs, ps;
  for (double q : base_points) qs.push_back({q});
  for (double p : fiber_samples) ps.push_back({p});
  return projectability_test(structure, h, qs, ps, tol);
}

HamiltonianSpec toric_moment_field(const PhaseStructure& structure, double c) {
  if (structure.kind != StructureKind::twisted_b) throw DomainError("toric moment map needs a twisted_b structure");
  if (structure.singular_index != 0) throw DomainError("toric moment map expects the singularity on p_1");
  if (c != structure.modular_weight)
    throw DomainError("moment-map weight must equal the modular weight of the structure");
  return HamiltonianSpec::toric_moment(c, structure.n);
}

}  // namespace bsym
