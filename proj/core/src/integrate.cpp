#include "bsym/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bsym/errors.hpp"

namespace bsym {

namespace {

constexpr double kMinStep = 1e-12;
constexpr double kEventTimeTol = 1e-10;
constexpr int kProbeSubsteps = 32;

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// Evaluates the (possibly reversed) field with reusable scratch storage.
class Field {
 public:
  Field(const PhaseStructure& s, const HamiltonianSpec& h, bool reverse)
      : s_(s), h_(h), sign_(reverse ? -1.0 : 1.0), g_(s.dimension()) {}

  void operator()(std::span<const double> x, std::span<double> out) {
    hamiltonian_vector_field_into(s_, h_, x, g_, out);
    for (double& v : out) {
      v *= sign_;
      if (!std::isfinite(v)) throw BlowupError("non-finite vector field");
    }
  }

 private:
  const PhaseStructure& s_;
  const HamiltonianSpec& h_;
  double sign_;
  std::vector<double> g_;
};

struct Rk4Work {
  explicit Rk4Work(std::size_t d) : k2(d), k3(d), k4(d), tmp(d) {}
  std::vector<double> k2, k3, k4, tmp;
};

// x_out = RK4(x, dt) given k1 = f(x).
void rk4_into(Field& f, std::span<const double> x, std::span<const double> k1, double dt, Rk4Work& w,
              std::span<double> x_out) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) w.tmp[i] = x[i] + 0.5 * dt * k1[i];
  f(w.tmp, w.k2);
  for (std::size_t i = 0; i < d; ++i) w.tmp[i] = x[i] + 0.5 * dt * w.k2[i];
  f(w.tmp, w.k3);
  for (std::size_t i = 0; i < d; ++i) w.tmp[i] = x[i] + dt * w.k3[i];
  f(w.tmp, w.k4);
  for (std::size_t i = 0; i < d; ++i)
    x_out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5 = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4 = {5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                                       -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct DopriWork {
  explicit DopriWork(std::size_t d) : k(7, std::vector<double>(d)), tmp(d), err(d) {}
  std::vector<std::vector<double>> k;
  std::vector<double> tmp, err;
};

// One embedded step; k[0] must hold f(x). On return k[6] = f(x_out) (FSAL)
// and the scaled error norm is returned.
double dopri_into(Field& f, std::span<const double> x, double dt, DopriWork& w, std::span<double> x_out,
                  double rel_tol, double abs_tol) {
  const std::size_t d = x.size();
  for (std::size_t s = 1; s < 7; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < s; ++j) acc += kA[s][j] * w.k[j][i];
      w.tmp[i] = x[i] + dt * acc;
    }
    if (s == 6) std::copy(w.tmp.begin(), w.tmp.end(), x_out.begin());
    f(w.tmp, w.k[s]);
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double e = 0.0;
    for (std::size_t s = 0; s < 7; ++s) e += (kB5[s] - kB4[s]) * w.k[s][i];
    e *= dt;
    const double scale = abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(x_out[i]));
    norm = std::max(norm, std::abs(e) / scale);
  }
  return norm;
}

class Integrator {
 public:
  Integrator(const PhaseStructure& s, const HamiltonianSpec& h, const IntegratorConfig& cfg)
      : s_(s),
        cfg_(cfg),
        field_(s, h, cfg.reverse),
        dim_(s.dimension()),
        def_idx_(defining_index(s)),
        rk4_(dim_),
        dopri_(dim_),
        k1_(dim_),
        next_(dim_),
        probe_(dim_),
        sub_(dim_) {}

  Trajectory run(const PhaseState& initial, Trajectory traj) {
    std::vector<double> x(initial.coords().begin(), initial.coords().end());
    if (!all_finite(x)) throw DomainError("initial state is not finite");
    wrap(x);
    const bool extended = initial.extended();
    const std::size_t n = initial.n();
    auto push = [&](double t, std::span<const double> c) {
      traj.times.push_back(t);
      traj.states.push_back(PhaseState::from_coords(n, extended, c));
    };
    auto finish = [&](double t, EventKind kind) {
      traj.events.push_back({t, kind});
      return std::move(traj);
    };

    const bool watch_z = def_idx_ < dim_ && std::abs(x[def_idx_]) >= cfg_.z_epsilon;
    push(0.0, x);
    try {
      field_(x, k1_);
    } catch (const BlowupError&) {
      return finish(0.0, EventKind::blowup);
    }
    if (max_abs(k1_) < cfg_.fp_epsilon) return finish(0.0, EventKind::fixed_point);
    if (exceeds_bound(x)) return finish(0.0, EventKind::blowup);

    double t = 0.0;
    double h = std::min(cfg_.step, cfg_.t_max);
    std::size_t k = 0;
    if (cfg_.method == Method::rk_adaptive) std::copy(k1_.begin(), k1_.end(), dopri_.k[0].begin());

    while (true) {
      double t_next;
      try {
        if (cfg_.method == Method::rk4_fixed) {
          t_next = std::min(static_cast<double>(k + 1) * cfg_.step, cfg_.t_max);
          rk4_into(field_, x, k1_, t_next - t, rk4_, next_);
        } else {
          t_next = adaptive_step(x, t, h);
        }
      } catch (const BlowupError&) {
        return finish(t, EventKind::blowup);
      }
      if (!all_finite(next_)) return finish(t, EventKind::blowup);
      wrap(next_);

      if (watch_z) {
        const double d0 = x[def_idx_];
        const double d1 = next_[def_idx_];
        if (std::abs(d1) < cfg_.z_epsilon || d0 * d1 < 0.0) {
          const double te = locate_z(x, t, t_next, d0, d1);
          push(te, next_);
          return finish(te, EventKind::reached_Z_neighborhood);
        }
      }

      std::swap(x, next_);
      t = t_next;
      ++k;
      push(t, x);
      if (exceeds_bound(x)) return finish(t, EventKind::blowup);
      try {
        if (cfg_.method == Method::rk_adaptive) {
          std::copy(dopri_.k[6].begin(), dopri_.k[6].end(), k1_.begin());
          std::copy(k1_.begin(), k1_.end(), dopri_.k[0].begin());
        } else {
          field_(x, k1_);
        }
      } catch (const BlowupError&) {
        return finish(t, EventKind::blowup);
      }
      if (max_abs(k1_) < cfg_.fp_epsilon) return finish(t, EventKind::fixed_point);
      if (t >= cfg_.t_max) return finish(t, EventKind::t_max_reached);
    }
  }

 private:
  static std::size_t defining_index(const PhaseStructure& s) {
    switch (s.kind) {
      case StructureKind::twisted_b:
        return s.pairs() + s.singular_index;
      case StructureKind::nontwisted_b:
        return s.singular_index;
      case StructureKind::extended_b_s:
        return s.n;
      default:
        return static_cast<std::size_t>(-1);
    }
  }

  void wrap(std::span<double> x) const {
    for (std::size_t i = 0; i < s_.n; ++i)
      if (s_.is_angular(i)) x[i] = wrap_angle(x[i]);
  }

  bool exceeds_bound(std::span<const double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i < s_.n && s_.is_angular(i)) continue;
      if (std::abs(x[i]) > cfg_.blowup_bound) return true;
    }
    return false;
  }

  // Advances next_ from x by one accepted embedded step; updates h for the
  // following step and returns the new time.
  double adaptive_step(std::span<const double> x, double t, double& h) {
    const double h_max = cfg_.t_max / 10.0;
    h = std::clamp(h, kMinStep, h_max);
    while (true) {
      double dt = std::min(h, cfg_.t_max - t);
      const double err = dopri_into(field_, x, dt, dopri_, next_, cfg_.rel_tol, cfg_.abs_tol);
      bool ok = err <= 1.0 && all_finite(next_);
      if (ok && def_idx_ < dim_) {
        // Keep |delta d| <= |d| / 2 so no step overshoots the critical set.
        const double d0 = x[def_idx_];
        if (std::abs(next_[def_idx_] - d0) > 0.5 * std::abs(d0)) ok = false;
      }
      if (ok || dt <= kMinStep) {
        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        if (!ok) factor = std::min(factor, 1.0);
        h = std::clamp(dt * factor, kMinStep, h_max);
        return dt == cfg_.t_max - t ? cfg_.t_max : t + dt;
      }
      double factor = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.5) : 0.2;
      h = std::max(dt * factor, kMinStep);
    }
  }

  // Finds the first time in (t0, t1] at which the linear interpolant of the
  // defining function reaches |d| = z_epsilon, then replaces next_ with the
  // state reached by an exact step to that time. Returns the event time.
  // First time in (t0, t1] where the trajectory enters the epsilon band or
  // crosses Z, by bisection on true substeps from the accepted state x.
  double locate_z(std::span<const double> x, double t0, double t1, double d0, double d1) {
    const double eps = cfg_.z_epsilon;
    auto inside = [&](double dp) { return std::abs(dp) < eps || dp * d0 < 0.0; };
    double lo = t0, hi = t1;
    bool have_hi = false;
    while (hi - lo > kEventTimeTol) {
      const double mid = 0.5 * (lo + hi);
      single_step(x, mid - t0, probe_);
      if (inside(probe_[def_idx_])) {
        hi = mid;
        std::copy(probe_.begin(), probe_.end(), next_.begin());
        have_hi = true;
      } else {
        lo = mid;
      }
    }
    if (!have_hi && !inside(d1)) single_step(x, hi - t0, next_);
    // Land on Z itself rather than across it.
    if (next_[def_idx_] * d0 < 0.0) next_[def_idx_] = 0.0;
    return hi;
  }

  // Advances x by dt with classical RK4, split into substeps when the
  // adaptive integrator took a long step.
  void single_step(std::span<const double> x, double dt, std::span<double> out) {
    std::copy(x.begin(), x.end(), out.begin());
    if (dt <= 0.0) return;
    const int m = cfg_.method == Method::rk_adaptive ? kProbeSubsteps : 1;
    const double hs = dt / m;
    for (int i = 0; i < m; ++i) {
      std::copy(out.begin(), out.end(), sub_.begin());
      field_(sub_, k1_);
      rk4_into(field_, sub_, k1_, hs, rk4_, out);
    }
    wrap(out);
  }

  const PhaseStructure& s_;
  const IntegratorConfig& cfg_;
  Field field_;
  std::size_t dim_;
  std::size_t def_idx_;
  Rk4Work rk4_;
  DopriWork dopri_;
  std::vector<double> k1_, next_, probe_, sub_;
};

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::rk4_fixed ? "rk4_fixed" : "rk_adaptive";
}

Method method_from_string(std::string_view name) {
  if (name == "rk4_fixed") return Method::rk4_fixed;
  if (name == "rk_adaptive") return Method::rk_adaptive;
  throw DomainError("unknown integration method '" + std::string(name) + "'");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::reached_Z_neighborhood:
      return "reached_Z_neighborhood";
    case EventKind::fixed_point:
      return "fixed_point";
    case EventKind::blowup:
      return "blowup";
    case EventKind::t_max_reached:
      return "t_max_reached";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0 && std::isfinite(v))) throw DomainError(std::string(name) + " must be positive and finite");
  };
  positive(step, "step");
  positive(rel_tol, "rel_tol");
  positive(abs_tol, "abs_tol");
  positive(t_max, "t_max");
  positive(z_epsilon, "z_epsilon");
  positive(fp_epsilon, "fp_epsilon");
  positive(blowup_bound, "blowup_bound");
  if (!(step < t_max)) throw DomainError("step must be smaller than t_max");
}

const Event& Trajectory::terminal() const {
  if (events.empty()) throw std::logic_error("trajectory has no terminal event");
  return events.back();
}

std::string structure_id(const PhaseStructure& s) {
  std::string out(to_string(s.kind));
  out += "(n=" + std::to_string(s.n);
  if (s.singular()) out += ",c=" + fmt_num(s.modular_weight);
  if (s.kind == StructureKind::twisted_b || s.kind == StructureKind::nontwisted_b)
    out += ",k=" + std::to_string(s.singular_index);
  out += ")";
  return out;
}

PhaseState step(const PhaseStructure& structure, const HamiltonianSpec& h, const PhaseState& state, double dt) {
  if (!(dt > 0.0)) throw DomainError("step size must be positive");
  structure.check_state(state);
  const std::size_t d = structure.dimension();
  Field f(structure, h, false);
  std::vector<double> k1(d), out(d);
  Rk4Work w(d);
  f(state.coords(), k1);
  rk4_into(f, state.coords(), k1, dt, w, out);
  if (!all_finite(out)) throw BlowupError("non-finite state after step");
  for (std::size_t i = 0; i < structure.n; ++i)
    if (structure.is_angular(i)) out[i] = wrap_angle(out[i]);
  return PhaseState::from_coords(state.n(), state.extended(), out);
}

Trajectory integrate(const PhaseStructure& structure, const HamiltonianSpec& h, const PhaseState& initial,
                     const IntegratorConfig& config) {
  structure.validate();
  h.validate();
  config.validate();
  structure.check_state(initial);
  if (h.dimension() != structure.dimension() || h.n != structure.n)
    throw DomainError("Hamiltonian and structure dimensions disagree");

  Trajectory traj;
  traj.structure_id = structure_id(structure);
  traj.hamiltonian_id = h.id();
  traj.reversed = config.reverse;
  Integrator integrator(structure, h, config);
  return integrator.run(initial, std::move(traj));
}

bool sign_preservation_check(const Trajectory& traj, const PhaseStructure& structure, double z_epsilon) {
  if (traj.empty() || !structure.singular()) return true;
  int sign = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double d = defining_function(structure, traj.states[k]);
    const bool last = k + 1 == traj.size();
    if (last && std::abs(d) < z_epsilon) continue;
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) return false;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

}  // namespace bsym
