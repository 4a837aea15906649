#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"
#include "bsym/integrate.hpp"

namespace bsym {

enum class OrbitKind { fixed_point, escape_orbit, periodic, unbounded, heteroclinic_segment, undetermined };

std::string_view to_string(OrbitKind kind);

struct OrbitClassification {
  OrbitKind kind = OrbitKind::undetermined;
  /// Present iff kind == periodic.
  std::optional<double> period;
  /// Present for escape orbits and heteroclinic segments.
  std::optional<PhaseState> limit_state;
};

struct ClassifyOptions {
  /// Max-norm radius of the first-return ball around the initial state.
  double return_radius = 1e-6;
  /// Minimum accepted period; 0 means 10 times the first sample spacing.
  double min_period = 0.0;
  /// Hamiltonians within this distance of the pendulum separatrix level
  /// lambda/2 are reported undetermined.
  double separatrix_guard = 1e-9;
  double fp_epsilon = 1e-12;
};

OrbitClassification classify_orbit(const Trajectory& traj, const PhaseStructure& structure,
                                   const HamiltonianSpec& h, const ClassifyOptions& options = {});

struct PortraitRecord {
  PhaseState initial;
  Trajectory forward;
  Trajectory backward;
  OrbitClassification classification;           ///< of the forward trajectory
  OrbitClassification backward_classification;  ///< of the time-reversed trajectory
  std::optional<std::string> error;
};

/// Integrates every initial condition forward and backward (the latter as the
/// forward flow of the negated field) and classifies both. Records keep the
/// input order; a failing record stores its error and the batch continues.
std::vector<PortraitRecord> phase_portrait(const PhaseStructure& structure, const HamiltonianSpec& h,
                                           const std::vector<PhaseState>& grid, const IntegratorConfig& config,
                                           const ClassifyOptions& options = {});

/// max_k |H(x_k) - H(x_0)|.
double level_set_residual(const Trajectory& traj, const HamiltonianSpec& h);

/// A closed chain made of two heteroclinic half-orbits joining two fixed
/// points on the critical set.
struct SingularPeriodicOrbit {
  Trajectory upper_segment;
  Trajectory lower_segment;
  PhaseState left_endpoint;
  PhaseState right_endpoint;
};

/// Assembles the singular periodic orbit of the twisted pure-quadratic model
/// at the given energy from the trajectories through (0, +-sqrt(2 energy)).
/// Each trajectory must reach the z_epsilon neighbourhood of Z in both time
/// directions within t_max.
SingularPeriodicOrbit assemble_singular_periodic(const PhaseStructure& structure, const HamiltonianSpec& h,
                                                 double energy, const IntegratorConfig& config);
SingularPeriodicOrbit assemble_singular_periodic(const PhaseStructure& structure, const HamiltonianSpec& h,
                                                 double energy);

}  // namespace bsym
