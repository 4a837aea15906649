#pragma once

// Reference solutions. Closed forms are evaluated directly; the damped Newton
// reference integrates q'' = -lambda q' - dV/dq with its own RK4 loop and
// shares no code with the integrate module.

#include <span>
#include <utility>
#include <vector>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"

namespace bsym::oracles {

enum class Source { closed_form, fine_integration };

struct OracleResult {
  std::vector<double> times;
  /// For the damped Newton reference: q = position, p = velocity dq/dt.
  std::vector<PhaseState> states;
  Source source = Source::closed_form;
  /// Integration step used by fine_integration results (0 for closed forms).
  double step = 0.0;
};

/// Twisted Stokes flow q' = p^2, p' = -(lambda/2) p:
/// q = q0 + (p0^2/lambda)(1 - e^{-lambda t}), p = p0 e^{-lambda t/2}.
std::pair<double, double> stokes_exact(double q0, double p0, double lambda, double t);

/// Canonical flow of H = p^2/2 + lambda q/2:
/// q = -(lambda/4) t^2 + p0 t + q0, p = p0 - (lambda/2) t.
std::pair<double, double> classical_parabola(double q0, double p0, double lambda, double t);

/// q(t) = c1/sqrt(lambda) tanh(c1 sqrt(lambda) t / 2 + c2), the twisted
/// pure-quadratic trajectory.
double quadratic_tanh(double c1, double c2, double lambda, double t);

/// Integrates the damped Newton equation for n = 1 on the given grid with
/// RK4 substeps no longer than min(diff(t_grid)) / 100.
OracleResult damped_newton_reference(const PotentialSpec& potential, double lambda, double q0, double v0,
                                     std::span<const double> t_grid);

}  // namespace bsym::oracles
