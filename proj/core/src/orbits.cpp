#include "bsym/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "bsym/errors.hpp"

namespace bsym {

namespace {

// Displacement a - b in the flat layout, angles compared on the circle.
void displacement(const PhaseStructure& s, std::span<const double> a, std::span<const double> b,
                  std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = (i < s.n && s.is_angular(i)) ? angle_difference(a[i], b[i]) : a[i] - b[i];
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool near_separatrix(const Trajectory& traj, const HamiltonianSpec& h, double guard) {
  if (h.is_extended() || h.kinetic != Kinetic::quadratic || h.potential.family != PotentialFamily::periodic)
    return false;
  return std::abs(eval(h, traj.front()) - 0.5 * h.potential.lambda) < guard;
}

// Cubic Hermite interpolation of the trajectory between two samples.
struct HermiteSegment {
  std::vector<double> x0, x1, f0, f1;
  double t0 = 0.0, dt = 1.0;

  void at(double t, std::span<double> x, std::span<double> dx) const {
    const double u = (t - t0) / dt;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
    const double d01 = -d00, d11 = 3 * u * u - 2 * u;
    for (std::size_t i = 0; i < x0.size(); ++i) {
      x[i] = h00 * x0[i] + h10 * dt * f0[i] + h01 * x1[i] + h11 * dt * f1[i];
      dx[i] = (d00 * x0[i] + d01 * x1[i]) / dt + d10 * f0[i] + d11 * f1[i];
    }
  }
};

std::optional<double> first_return(const Trajectory& traj, const PhaseStructure& s, const HamiltonianSpec& h,
                                   const ClassifyOptions& opt) {
  if (traj.size() < 3) return std::nullopt;
  const std::size_t d = s.dimension();
  const double t_start = traj.times.front();
  const double min_period =
      opt.min_period > 0.0 ? opt.min_period : 10.0 * (traj.times[1] - traj.times[0]);
  const auto x_init = traj.front().coords();
  const double sign = traj.reversed ? -1.0 : 1.0;

  std::vector<double> g(d), disp(d), step_disp(d), x(d), dx(d);
  HermiteSegment seg;
  seg.x0.resize(d);
  seg.x1.resize(d);
  seg.f0.resize(d);
  seg.f1.resize(d);

  auto field = [&](std::span<const double> c, std::span<double> out) {
    hamiltonian_vector_field_into(s, h, c, g, out);
    for (double& v : out) v *= sign;
  };
  // d/dt of |x(t) - x_init|^2 / 2 on the interpolant.
  auto approach = [&](double t) {
    seg.at(t, x, dx);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += (x[i] - seg.x0[i] + disp[i]) * dx[i];
    return acc;
  };

  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t1 = traj.times[k + 1];
    if (t1 - t_start < min_period) continue;
    const auto a = traj.states[k].coords();
    const auto b = traj.states[k + 1].coords();
    displacement(s, a, x_init, disp);
    displacement(s, b, a, step_disp);
    const double reach = 2.0 * max_norm(step_disp) + opt.return_radius;
    if (max_norm(disp) > reach) continue;

    // Unwrapped segment from a to b; disp holds a - x_init.
    std::copy(a.begin(), a.end(), seg.x0.begin());
    for (std::size_t i = 0; i < d; ++i) seg.x1[i] = a[i] + step_disp[i];
    field(a, seg.f0);
    field(b, seg.f1);
    seg.t0 = traj.times[k];
    seg.dt = t1 - traj.times[k];

    double lo = seg.t0, hi = t1;
    const double g_lo = approach(lo), g_hi = approach(hi);
    if (!(g_lo < 0.0 && g_hi >= 0.0)) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (approach(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t_ret = 0.5 * (lo + hi);
    seg.at(t_ret, x, dx);
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist = std::max(dist, std::abs(x[i] - seg.x0[i] + disp[i]));
    if (dist < opt.return_radius && max_norm(dx) > opt.fp_epsilon && t_ret - t_start >= min_period)
      return t_ret - t_start;
  }
  return std::nullopt;
}

Trajectory join_segments(const Trajectory& backward, const Trajectory& forward) {
  Trajectory out;
  out.structure_id = forward.structure_id;
  out.hamiltonian_id = forward.hamiltonian_id;
  for (std::size_t k = backward.size(); k-- > 1;) {
    out.times.push_back(-backward.times[k]);
    out.states.push_back(backward.states[k]);
  }
  out.times.insert(out.times.end(), forward.times.begin(), forward.times.end());
  out.states.insert(out.states.end(), forward.states.begin(), forward.states.end());
  out.events.push_back({-backward.terminal().time, backward.terminal().kind});
  out.events.push_back(forward.terminal());
  return out;
}

}  // namespace

std::string_view to_string(OrbitKind kind) {
  switch (kind) {
    case OrbitKind::fixed_point:
      return "fixed_point";
    case OrbitKind::escape_orbit:
      return "escape_orbit";
    case OrbitKind::periodic:
      return "periodic";
    case OrbitKind::unbounded:
      return "unbounded";
    case OrbitKind::heteroclinic_segment:
      return "heteroclinic_segment";
    case OrbitKind::undetermined:
      return "undetermined";
  }
  return "unknown";
}

OrbitClassification classify_orbit(const Trajectory& traj, const PhaseStructure& structure,
                                   const HamiltonianSpec& h, const ClassifyOptions& options) {
  OrbitClassification out;
  if (traj.empty() || traj.events.empty()) return out;
  const Event& term = traj.terminal();

  if (term.kind == EventKind::fixed_point) {
    if (traj.size() == 1) {
      out.kind = OrbitKind::fixed_point;
    } else {
      out.kind = OrbitKind::heteroclinic_segment;
      out.limit_state = traj.back();
    }
    return out;
  }
  if (near_separatrix(traj, h, options.separatrix_guard)) return out;
  if (term.kind == EventKind::reached_Z_neighborhood) {
    out.kind = OrbitKind::escape_orbit;
    out.limit_state = traj.back();
    return out;
  }
  if (auto period = first_return(traj, structure, h, options)) {
    out.kind = OrbitKind::periodic;
    out.period = *period;
    return out;
  }
  if (term.kind == EventKind::blowup) out.kind = OrbitKind::unbounded;
  return out;
}

std::vector<PortraitRecord> phase_portrait(const PhaseStructure& structure, const HamiltonianSpec& h,
                                           const std::vector<PhaseState>& grid, const IntegratorConfig& config,
                                           const ClassifyOptions& options) {
  if (grid.empty()) throw DomainError("phase portrait grid is empty");
  IntegratorConfig fwd = config;
  fwd.reverse = false;
  IntegratorConfig bwd = config;
  bwd.reverse = true;

  std::vector<PortraitRecord> records;
  records.reserve(grid.size());
  for (const PhaseState& initial : grid) {
    PortraitRecord rec;
    rec.initial = initial;
    try {
      rec.forward = integrate(structure, h, initial, fwd);
      rec.classification = classify_orbit(rec.forward, structure, h, options);
      rec.backward = integrate(structure, h, initial, bwd);
      rec.backward_classification = classify_orbit(rec.backward, structure, h, options);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

double level_set_residual(const Trajectory& traj, const HamiltonianSpec& h) {
  if (traj.empty()) return 0.0;
  const double h0 = eval(h, traj.front());
  double r = 0.0;
  for (const auto& s : traj.states) r = std::max(r, std::abs(eval(h, s) - h0));
  return r;
}

SingularPeriodicOrbit assemble_singular_periodic(const PhaseStructure& structure, const HamiltonianSpec& h,
                                                 double energy, const IntegratorConfig& config) {
  if (structure.kind != StructureKind::twisted_b || structure.n != 1)
    throw DomainError("singular periodic assembly needs a one-dimensional twisted_b structure");
  if (h.is_extended() || h.kinetic != Kinetic::quadratic || h.potential.family != PotentialFamily::pure_quadratic)
    throw DomainError("singular periodic assembly needs the pure_quadratic potential");
  if (!(energy > 0.0 && std::isfinite(energy))) throw DomainError("energy must be positive");

  const double p0 = std::sqrt(2.0 * energy);
  IntegratorConfig fwd = config;
  fwd.reverse = false;
  IntegratorConfig bwd = config;
  bwd.reverse = true;

  auto half_orbit = [&](double p) {
    const PhaseState start({0.0}, {p});
    Trajectory f = integrate(structure, h, start, fwd);
    Trajectory b = integrate(structure, h, start, bwd);
    if (f.terminal().kind != EventKind::reached_Z_neighborhood ||
        b.terminal().kind != EventKind::reached_Z_neighborhood)
      throw DomainError("half-orbit did not reach the critical set within t_max");
    return join_segments(b, f);
  };

  SingularPeriodicOrbit orbit;
  orbit.upper_segment = half_orbit(p0);
  orbit.lower_segment = half_orbit(-p0);

  // The segments run from the left fixed point to the right one.
  const double left = 0.5 * (orbit.upper_segment.front().q(0) + orbit.lower_segment.front().q(0));
  const double right = 0.5 * (orbit.upper_segment.back().q(0) + orbit.lower_segment.back().q(0));
  orbit.left_endpoint = PhaseState({left}, {0.0});
  orbit.right_endpoint = PhaseState({right}, {0.0});
  return orbit;
}

SingularPeriodicOrbit assemble_singular_periodic(const PhaseStructure& structure, const HamiltonianSpec& h,
                                                 double energy) {
  IntegratorConfig config;
  config.t_max = 200.0;
  return assemble_singular_periodic(structure, h, energy, config);
}

}  // namespace bsym
