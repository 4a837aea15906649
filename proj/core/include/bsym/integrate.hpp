#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"

namespace bsym {

enum class Method { rk4_fixed, rk_adaptive };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct IntegratorConfig {
  Method method = Method::rk4_fixed;
  /// Fixed step, or the initial step of the adaptive scheme.
  double step = 1e-3;
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double t_max = 10.0;
  /// Proximity to the critical set that ends an escape.
  double z_epsilon = 1e-6;
  /// Max-norm speed below which a state is declared a fixed point.
  double fp_epsilon = 1e-12;
  /// Max-norm bound on coordinates (angles excluded).
  double blowup_bound = 1e9;
  /// Integrate the negated field (time-reversed flow). Times stay non-negative.
  bool reverse = false;

  void validate() const;
};

enum class EventKind { reached_Z_neighborhood, fixed_point, blowup, t_max_reached };

std::string_view to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::t_max_reached;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  /// Terminal events; exactly one for trajectories produced by integrate().
  std::vector<Event> events;
  std::string structure_id;
  std::string hamiltonian_id;
  bool reversed = false;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const PhaseState& front() const { return states.front(); }
  const PhaseState& back() const { return states.back(); }
  /// The terminal event; throws std::logic_error when absent.
  const Event& terminal() const;
};

/// Identifier of a structure used in trajectories and artifacts.
std::string structure_id(const PhaseStructure& structure);

/// One classical fourth-order Runge-Kutta step of size dt > 0. Throws
/// BlowupError when the field evaluates to a non-finite value.
PhaseState step(const PhaseStructure& structure, const HamiltonianSpec& h, const PhaseState& state, double dt);

/// Integrates the Hamiltonian vector field until one terminal event fires:
///   - fixed_point           max-norm speed < fp_epsilon (checked at every accepted state)
///   - reached_Z_neighborhood |defining_function| < z_epsilon, only when the start was off Z;
///                           the crossing is located by bisection on the linear interpolant
///   - blowup                non-finite field or |coordinate| > blowup_bound
///   - t_max_reached
/// Angular positions are reduced into [0, 2 pi) after every step.
Trajectory integrate(const PhaseStructure& structure, const HamiltonianSpec& h, const PhaseState& initial,
                     const IntegratorConfig& config);

/// True iff the defining function keeps one sign along the trajectory; the
/// terminal state may sit within z_epsilon of Z.
bool sign_preservation_check(const Trajectory& traj, const PhaseStructure& structure, double z_epsilon = 1e-6);

}  // namespace bsym
