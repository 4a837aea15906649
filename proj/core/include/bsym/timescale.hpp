#pragma once

// Friction through an exponential time rescaling on the extended phase space
// (q, p, t, E).
//
// The rescaled Hamiltonian H = |p|^2/2 + e^{2 lambda t}/lambda^2 V - e^{lambda t}/lambda E
// is integrated in a curvilinear parameter sigma with dt/dsigma = e^{lambda t}/lambda,
// so e^{-lambda t} = e^{-lambda t0} - sigma. In real time the positions obey
//
//     d^2q/dt^2 = -lambda dq/dt - dV/dq,      dq/dt = lambda e^{-lambda t} p.
//
// The chart s = e^{-lambda t}, E_s = E / lambda turns the canonical form into a
// non-twisted b-symplectic form with critical set {s = 0}; in that chart the
// parameter advances as ds/dsigma = -1.

#include <cstddef>
#include <string_view>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"
#include "bsym/integrate.hpp"

namespace bsym::timescale {

struct ExtendedSystem {
  PhaseStructure structure;
  HamiltonianSpec hamiltonian;
};

/// H = |p|^2/2 + V(q,t) - E with the canonical extended form.
ExtendedSystem build_plain_extended(const PotentialSpec& potential, std::size_t n = 1);

/// H = |p|^2/2 + e^{2 lambda t}/lambda^2 V - e^{lambda t}/lambda E with the canonical extended form.
ExtendedSystem build_rescaled_extended(const PotentialSpec& potential, double lambda, std::size_t n = 1);

/// Re-expresses a rescaled system in the (s, E_s) chart.
ExtendedSystem to_s_coordinates(const PhaseStructure& structure, const HamiltonianSpec& h, double lambda);

double s_of_t(double t, double lambda);
/// Inverse of s_of_t; throws DomainError for s <= 0.
double t_of_s(double s, double lambda);

/// (q, p, t, E) -> (q, p, s, E_s).
PhaseState to_s_state(const PhaseState& state, double lambda);
/// (q, p, s, E_s) -> (q, p, t, E).
PhaseState from_s_state(const PhaseState& state, double lambda);

/// Initial rescaled state at t = t0 with real-time velocity v0:
/// p0 = v0 e^{lambda t0} / lambda and E chosen so that H = 0.
PhaseState rescaled_initial_state(const HamiltonianSpec& h, std::span<const double> q0, std::span<const double> v0,
                                  double t0 = 0.0);

enum class Clock { curvilinear_s, real_t };
enum class Chart { time_energy, s_energy };

std::string_view to_string(Clock clock);

struct ExtendedTrajectory {
  /// States in the chart below; times are the curvilinear parameter.
  Trajectory base;
  Clock clock = Clock::curvilinear_s;
  Chart chart = Chart::time_energy;
  double lambda = 1.0;
};

struct CurvilinearOptions {
  /// Real-time horizon measured from the initial time.
  double horizon = 10.0;
  /// Real-time spacing of the stored samples.
  double sample_dt = 1e-2;
  /// RK4 substeps per sample interval.
  std::size_t substeps = 10;
};

/// Integrates a rescaled or s-chart system in curvilinear time with RK4,
/// choosing the parameter steps so that samples land on a uniform real-time
/// grid. Throws BlowupError if the rescaling overflows (lambda t > 700).
ExtendedTrajectory integrate_curvilinear(const ExtendedSystem& system, const PhaseState& initial, double lambda,
                                         const CurvilinearOptions& options = {});

/// Real-time positions and velocities (q, dq/dt) on the times carried by the
/// trajectory. Throws DomainError when those times are not increasing.
Trajectory reconstruct_real_time(const ExtendedTrajectory& ext);

/// max |d^2q/dt^2 + lambda dq/dt + dV/dq| over interior samples of a real-time
/// trajectory, by three-point finite differences on q (n = 1).
double friction_residual(const Trajectory& real_time, const PotentialSpec& potential, double lambda);

}  // namespace bsym::timescale
