#include "bsym/timescale.hpp"

#include <algorithm>
#include <cmath>

#include "bsym/errors.hpp"

namespace bsym::timescale {

namespace {

void require_rate(double lambda) {
  if (!(lambda > 0.0 && std::isfinite(lambda))) throw DomainError("lambda must be positive");
}

Chart chart_of(const ExtendedSystem& system) {
  if (system.structure.kind == StructureKind::extended_canonical &&
      system.hamiltonian.extended == Extension::rescaled_extended)
    return Chart::time_energy;
  if (system.structure.kind == StructureKind::extended_b_s && system.hamiltonian.extended == Extension::s_coordinates)
    return Chart::s_energy;
  throw DomainError("curvilinear integration needs a rescaled or s-coordinate system");
}

}  // namespace

std::string_view to_string(Clock clock) { return clock == Clock::curvilinear_s ? "s" : "t"; }

ExtendedSystem build_plain_extended(const PotentialSpec& potential, std::size_t n) {
  return {PhaseStructure::extended_canonical(n), HamiltonianSpec::plain_extended(potential, n)};
}

ExtendedSystem build_rescaled_extended(const PotentialSpec& potential, double lambda, std::size_t n) {
  require_rate(lambda);
  return {PhaseStructure::extended_canonical(n), HamiltonianSpec::rescaled_extended(potential, lambda, n)};
}

ExtendedSystem to_s_coordinates(const PhaseStructure& structure, const HamiltonianSpec& h, double lambda) {
  require_rate(lambda);
  if (structure.kind != StructureKind::extended_canonical || h.extended != Extension::rescaled_extended)
    throw DomainError("s-coordinates are defined for the rescaled extended system");
  if (h.time_scale != lambda) throw DomainError("lambda does not match the rescaled Hamiltonian");
  return {PhaseStructure::extended_b_s(structure.n), HamiltonianSpec::s_coordinates(h.potential, lambda, h.n)};
}

double s_of_t(double t, double lambda) {
  require_rate(lambda);
  return std::exp(-lambda * t);
}

double t_of_s(double s, double lambda) {
  require_rate(lambda);
  if (!(s > 0.0)) throw DomainError("s must be positive");
  return -std::log(s) / lambda;
}

PhaseState to_s_state(const PhaseState& state, double lambda) {
  if (!state.extended()) throw DomainError("state has no time coordinate");
  const auto q = state.q();
  const auto p = state.p();
  return PhaseState({q.begin(), q.end()}, {p.begin(), p.end()}, s_of_t(state.ext_position(), lambda),
                    state.ext_momentum() / lambda);
}

PhaseState from_s_state(const PhaseState& state, double lambda) {
  if (!state.extended()) throw DomainError("state has no s coordinate");
  const auto q = state.q();
  const auto p = state.p();
  return PhaseState({q.begin(), q.end()}, {p.begin(), p.end()}, t_of_s(state.ext_position(), lambda),
                    state.ext_momentum() * lambda);
}

PhaseState rescaled_initial_state(const HamiltonianSpec& h, std::span<const double> q0, std::span<const double> v0,
                                  double t0) {
  if (h.extended != Extension::rescaled_extended) throw DomainError("expected a rescaled extended Hamiltonian");
  if (q0.size() != h.n || v0.size() != h.n) throw DomainError("initial condition has the wrong dimension");
  const double lam = h.time_scale;
  const double e1 = std::exp(lam * t0);
  std::vector<double> p(h.n);
  double kin = 0.0;
  for (std::size_t i = 0; i < h.n; ++i) {
    p[i] = v0[i] * e1 / lam;
    kin += 0.5 * p[i] * p[i];
  }
  const double v = h.potential.value(q0, t0);
  const double energy = lam / e1 * (kin + e1 * e1 / (lam * lam) * v);
  return PhaseState({q0.begin(), q0.end()}, std::move(p), t0, energy);
}

ExtendedTrajectory integrate_curvilinear(const ExtendedSystem& system, const PhaseState& initial, double lambda,
                                         const CurvilinearOptions& options) {
  require_rate(lambda);
  const Chart chart = chart_of(system);
  if (system.hamiltonian.time_scale != lambda) throw DomainError("lambda does not match the system");
  if (!(options.horizon > 0.0) || !(options.sample_dt > 0.0) || options.substeps == 0)
    throw DomainError("invalid curvilinear integration options");
  system.structure.check_state(initial);

  const double t0 = chart == Chart::time_energy ? initial.ext_position() : t_of_s(initial.ext_position(), lambda);
  const auto samples = static_cast<std::size_t>(std::llround(options.horizon / options.sample_dt));

  ExtendedTrajectory out;
  out.chart = chart;
  out.lambda = lambda;
  out.base.structure_id = structure_id(system.structure);
  out.base.hamiltonian_id = system.hamiltonian.id();

  PhaseState x = initial;
  double sigma = 0.0;
  out.base.times.push_back(sigma);
  out.base.states.push_back(x);
  for (std::size_t k = 0; k < samples; ++k) {
    const double ta = t0 + static_cast<double>(k) * options.sample_dt;
    const double tb = k + 1 == samples ? t0 + options.horizon : ta + options.sample_dt;
    // Parameter length of the real-time interval [ta, tb].
    const double dsigma = std::exp(-lambda * ta) * -std::expm1(-lambda * (tb - ta));
    const double h = dsigma / static_cast<double>(options.substeps);
    for (std::size_t j = 0; j < options.substeps; ++j) x = step(system.structure, system.hamiltonian, x, h);
    sigma += dsigma;
    out.base.times.push_back(sigma);
    out.base.states.push_back(x);
  }
  out.base.events.push_back({sigma, EventKind::t_max_reached});
  return out;
}

Trajectory reconstruct_real_time(const ExtendedTrajectory& ext) {
  require_rate(ext.lambda);
  const double lam = ext.lambda;
  Trajectory out;
  out.structure_id = ext.base.structure_id;
  out.hamiltonian_id = ext.base.hamiltonian_id;
  for (const PhaseState& s : ext.base.states) {
    double t, scale;
    if (ext.chart == Chart::time_energy) {
      t = s.ext_position();
      scale = lam * std::exp(-lam * t);
    } else {
      t = t_of_s(s.ext_position(), lam);
      scale = lam * s.ext_position();
    }
    if (!out.times.empty() && !(t > out.times.back())) throw DomainError("non-monotone t along extended trajectory");
    const auto q = s.q();
    std::vector<double> v(s.p().begin(), s.p().end());
    for (double& vi : v) vi *= scale;
    out.times.push_back(t);
    out.states.emplace_back(std::vector<double>(q.begin(), q.end()), std::move(v));
  }
  if (!ext.base.events.empty() && !out.times.empty())
    out.events.push_back({out.times.back(), ext.base.terminal().kind});
  return out;
}

double friction_residual(const Trajectory& traj, const PotentialSpec& potential, double lambda) {
  if (traj.size() < 3) throw DomainError("residual needs at least 3 samples");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double h1 = traj.times[k] - traj.times[k - 1];
    const double h2 = traj.times[k + 1] - traj.times[k];
    const double qa = traj.states[k - 1].q(0), qb = traj.states[k].q(0), qc = traj.states[k + 1].q(0);
    const double qdd = 2.0 * ((qc - qb) / h2 - (qb - qa) / h1) / (h1 + h2);
    const double qd = (h1 * h1 * qc - h2 * h2 * qa + (h2 * h2 - h1 * h1) * qb) / (h1 * h2 * (h1 + h2));
    const double x[1] = {qb};
    double dv[1] = {0.0};
    potential.gradient(x, traj.times[k], dv);
    worst = std::max(worst, std::abs(qdd + lambda * qd + dv[0]));
  }
  return worst;
}

}  // namespace bsym::timescale
