#include "bsym/hamiltonians.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "bsym/errors.hpp"

namespace bsym {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kOverflowGuard = 700.0;

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double kinetic_value(const HamiltonianSpec& h, std::span<const double> p) {
  switch (h.kinetic) {
    case Kinetic::quadratic: {
      double acc = 0.0;
      for (double v : p) acc += v * v;
      return 0.5 * acc;
    }
    case Kinetic::toric_log: {
      if (p[0] == 0.0) throw DomainError("toric moment map undefined at p_1 = 0");
      double acc = h.moment_weight * std::log(std::abs(p[0]));
      for (std::size_t i = 1; i < p.size(); ++i) acc += p[i];
      return acc;
    }
    case Kinetic::momentum_sum: {
      double acc = 0.0;
      for (double v : p) acc += v;
      return acc;
    }
  }
  return 0.0;
}

void kinetic_gradient(const HamiltonianSpec& h, std::span<const double> p, std::span<double> out) {
  switch (h.kinetic) {
    case Kinetic::quadratic:
      for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i];
      return;
    case Kinetic::toric_log:
      if (p[0] == 0.0) throw DomainError("toric moment map undefined at p_1 = 0");
      out[0] = h.moment_weight / p[0];
      for (std::size_t i = 1; i < p.size(); ++i) out[i] = 1.0;
      return;
    case Kinetic::momentum_sum:
      for (std::size_t i = 0; i < p.size(); ++i) out[i] = 1.0;
      return;
  }
}

double guarded_exp(double x) {
  if (x > kOverflowGuard) throw BlowupError("exponential time rescaling overflow (lambda t > 700)");
  return std::exp(x);
}

}  // namespace

std::string_view to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::linear:
      return "linear";
    case PotentialFamily::pure_quadratic:
      return "pure_quadratic";
    case PotentialFamily::general_quadratic:
      return "general_quadratic";
    case PotentialFamily::periodic:
      return "periodic";
    case PotentialFamily::zero:
      return "zero";
    case PotentialFamily::custom:
      return "custom";
  }
  return "unknown";
}

PotentialFamily potential_family_from_string(std::string_view name) {
  for (auto f : {PotentialFamily::linear, PotentialFamily::pure_quadratic, PotentialFamily::general_quadratic,
                 PotentialFamily::periodic, PotentialFamily::zero, PotentialFamily::custom}) {
    if (to_string(f) == name) return f;
  }
  throw DomainError("unknown potential family '" + std::string(name) + "'");
}

std::string_view to_string(Extension ext) {
  switch (ext) {
    case Extension::none:
      return "none";
    case Extension::plain_extended:
      return "plain_extended";
    case Extension::rescaled_extended:
      return "rescaled_extended";
    case Extension::s_coordinates:
      return "s_coordinates";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec PotentialSpec::linear(double lambda) {
  PotentialSpec v{PotentialFamily::linear, lambda, 0.0, {}};
  v.validate();
  return v;
}

PotentialSpec PotentialSpec::pure_quadratic(double lambda) {
  PotentialSpec v{PotentialFamily::pure_quadratic, lambda, 0.0, {}};
  v.validate();
  return v;
}

PotentialSpec PotentialSpec::general_quadratic(double lambda, double alpha) {
  PotentialSpec v{PotentialFamily::general_quadratic, lambda, alpha, {}};
  v.validate();
  return v;
}

PotentialSpec PotentialSpec::periodic(double lambda) {
  PotentialSpec v{PotentialFamily::periodic, lambda, 0.0, {}};
  v.validate();
  return v;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{PotentialFamily::zero, 1.0, 0.0, {}}; }

PotentialSpec PotentialSpec::from_function(CustomPotential custom) {
  PotentialSpec v{PotentialFamily::custom, 1.0, 0.0, std::move(custom)};
  v.validate();
  return v;
}

void PotentialSpec::validate() const {
  if (family == PotentialFamily::custom) {
    if (!custom.value) throw DomainError("custom potential requires a value function");
    return;
  }
  if (custom.value || custom.gradient) throw DomainError("only the custom family accepts a potential function");
  if (family != PotentialFamily::general_quadratic && alpha != 0.0)
    throw DomainError("alpha is only meaningful for the general_quadratic family");
  if (family != PotentialFamily::zero && !(lambda > 0.0 && std::isfinite(lambda)))
    throw DomainError("lambda must be positive for dissipative potential families");
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
}

double PotentialSpec::value(std::span<const double> q, double t) const {
  const double x = q[0];
  switch (family) {
    case PotentialFamily::linear:
      return 0.5 * lambda * x;
    case PotentialFamily::pure_quadratic:
      return 0.25 * lambda * x * x;
    case PotentialFamily::general_quadratic:
      return 0.5 * lambda * x * (1.0 + 0.5 * alpha * x);
    case PotentialFamily::periodic:
      return 0.5 * lambda * std::cos(x);
    case PotentialFamily::zero:
      return 0.0;
    case PotentialFamily::custom:
      return custom.value(q, t);
  }
  return 0.0;
}

double PotentialSpec::slope(double q) const {
  switch (family) {
    case PotentialFamily::linear:
      return 0.5 * lambda;
    case PotentialFamily::pure_quadratic:
      return 0.5 * lambda * q;
    case PotentialFamily::general_quadratic:
      return 0.5 * lambda * (1.0 + alpha * q);
    case PotentialFamily::periodic:
      return -0.5 * lambda * std::sin(q);
    case PotentialFamily::zero:
      return 0.0;
    case PotentialFamily::custom: {
      const double x[1] = {q};
      double dq[1] = {0.0};
      gradient(x, 0.0, dq);
      return dq[0];
    }
  }
  return 0.0;
}

double PotentialSpec::gradient(std::span<const double> q, double t, std::span<double> dq) const {
  for (double& v : dq) v = 0.0;
  if (family != PotentialFamily::custom) {
    dq[0] = slope(q[0]);
    return 0.0;
  }
  if (custom.gradient) return custom.gradient(q, t, dq);

  // Central differences.
  std::vector<double> x(q.begin(), q.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + kFdStep;
    const double up = custom.value(x, t);
    x[i] = saved - kFdStep;
    const double down = custom.value(x, t);
    x[i] = saved;
    dq[i] = (up - down) / (2.0 * kFdStep);
  }
  return (custom.value(q, t + kFdStep) - custom.value(q, t - kFdStep)) / (2.0 * kFdStep);
}

// ---------------------------------------------------------------------------
// HamiltonianSpec

HamiltonianSpec HamiltonianSpec::mechanical(PotentialSpec potential, std::size_t n) {
  HamiltonianSpec h;
  h.potential = std::move(potential);
  h.n = n;
  h.validate();
  return h;
}

HamiltonianSpec HamiltonianSpec::plain_extended(PotentialSpec potential, std::size_t n) {
  HamiltonianSpec h = mechanical(std::move(potential), n);
  h.extended = Extension::plain_extended;
  return h;
}

HamiltonianSpec HamiltonianSpec::rescaled_extended(PotentialSpec potential, double lambda, std::size_t n) {
  HamiltonianSpec h = mechanical(std::move(potential), n);
  h.extended = Extension::rescaled_extended;
  h.time_scale = lambda;
  h.validate();
  return h;
}

HamiltonianSpec HamiltonianSpec::s_coordinates(PotentialSpec potential, double lambda, std::size_t n) {
  HamiltonianSpec h = rescaled_extended(std::move(potential), lambda, n);
  h.extended = Extension::s_coordinates;
  return h;
}

HamiltonianSpec HamiltonianSpec::toric_moment(double c, std::size_t n) {
  if (c == 0.0) throw DomainError("modular weight c must be nonzero");
  HamiltonianSpec h;
  h.n = n;
  h.kinetic = Kinetic::toric_log;
  h.moment_weight = c;
  h.validate();
  return h;
}

HamiltonianSpec HamiltonianSpec::momentum_sum(std::size_t n) {
  HamiltonianSpec h;
  h.n = n;
  h.kinetic = Kinetic::momentum_sum;
  h.validate();
  return h;
}

void HamiltonianSpec::validate() const {
  if (n == 0) throw DomainError("Hamiltonian needs at least one degree of freedom");
  potential.validate();
  if ((extended == Extension::rescaled_extended || extended == Extension::s_coordinates) &&
      !(time_scale > 0.0 && std::isfinite(time_scale)))
    throw DomainError("time rescaling rate lambda must be positive");
  if (is_extended() && kinetic != Kinetic::quadratic)
    throw DomainError("extended Hamiltonians use the quadratic kinetic term");
}

std::string HamiltonianSpec::id() const {
  std::string out;
  switch (kinetic) {
    case Kinetic::toric_log:
      return "toric_moment(c=" + fmt_num(moment_weight) + ",n=" + std::to_string(n) + ")";
    case Kinetic::momentum_sum:
      return "momentum_sum(n=" + std::to_string(n) + ")";
    case Kinetic::quadratic:
      break;
  }
  out = is_extended() ? std::string(to_string(extended)) : "mechanical";
  out += ":" + std::string(to_string(potential.family)) + "(lambda=" + fmt_num(potential.lambda);
  if (potential.family == PotentialFamily::general_quadratic) out += ",alpha=" + fmt_num(potential.alpha);
  out += ")";
  if (extended == Extension::rescaled_extended || extended == Extension::s_coordinates)
    out += "[rate=" + fmt_num(time_scale) + "]";
  if (n != 1) out += "[n=" + std::to_string(n) + "]";
  return out;
}

// ---------------------------------------------------------------------------

double eval_coords(const HamiltonianSpec& h, std::span<const double> x) {
  const std::size_t n = h.n;
  if (!h.is_extended()) {
    const auto q = x.subspan(0, n);
    const auto p = x.subspan(n, n);
    const double kin = kinetic_value(h, p);
    return h.kinetic == Kinetic::quadratic ? kin + h.potential.value(q, 0.0) : kin;
  }

  const auto q = x.subspan(0, n);
  const double tau = x[n];  // t or s
  const auto p = x.subspan(n + 1, n);
  const double mom = x[2 * n + 1];  // E or E_s
  const double kin = kinetic_value(h, p);
  const double lam = h.time_scale;

  switch (h.extended) {
    case Extension::plain_extended:
      return kin + h.potential.value(q, tau) - mom;
    case Extension::rescaled_extended: {
      const double e1 = guarded_exp(lam * tau);
      return kin + e1 * e1 / (lam * lam) * h.potential.value(q, tau) - e1 / lam * mom;
    }
    case Extension::s_coordinates: {
      if (!(tau > 0.0)) throw DomainError("Hamiltonian singular at s=0");
      const double t = -std::log(tau) / lam;
      const double ls = lam * tau;
      return kin + h.potential.value(q, t) / (ls * ls) - mom / tau;
    }
    case Extension::none:
      break;
  }
  return kin;
}

void grad_into(const HamiltonianSpec& h, std::span<const double> x, std::span<double> out) {
  const std::size_t n = h.n;
  if (!h.is_extended()) {
    const auto q = x.subspan(0, n);
    const auto p = x.subspan(n, n);
    if (h.kinetic == Kinetic::quadratic) {
      h.potential.gradient(q, 0.0, out.subspan(0, n));
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    }
    kinetic_gradient(h, p, out.subspan(n, n));
    return;
  }

  const auto q = x.subspan(0, n);
  const double tau = x[n];
  const auto p = x.subspan(n + 1, n);
  const double mom = x[2 * n + 1];
  const double lam = h.time_scale;
  auto dq = out.subspan(0, n);
  kinetic_gradient(h, p, out.subspan(n + 1, n));

  switch (h.extended) {
    case Extension::plain_extended: {
      out[n] = h.potential.gradient(q, tau, dq);
      out[2 * n + 1] = -1.0;
      return;
    }
    case Extension::rescaled_extended: {
      const double e1 = guarded_exp(lam * tau);
      const double e2 = e1 * e1;
      const double dvdt = h.potential.gradient(q, tau, dq);
      const double v = h.potential.value(q, tau);
      for (std::size_t i = 0; i < n; ++i) dq[i] *= e2 / (lam * lam);
      out[n] = e2 / (lam * lam) * dvdt + 2.0 * e2 / lam * v - e1 * mom;
      out[2 * n + 1] = -e1 / lam;
      return;
    }
    case Extension::s_coordinates: {
      if (!(tau > 0.0)) throw DomainError("Hamiltonian singular at s=0");
      const double t = -std::log(tau) / lam;
      const double ls = lam * tau;
      const double dvdt = h.potential.gradient(q, t, dq);
      const double v = h.potential.value(q, t);
      for (std::size_t i = 0; i < n; ++i) dq[i] /= ls * ls;
      // d/ds [V(q,t(s)) / (lam s)^2] with dt/ds = -1/(lam s), plus d/ds[-E_s/s].
      out[n] = -dvdt / (lam * ls * ls * tau) - 2.0 * v / (ls * ls * tau) + mom / (tau * tau);
      out[2 * n + 1] = -1.0 / tau;
      return;
    }
    case Extension::none:
      return;
  }
}

double eval(const HamiltonianSpec& h, const PhaseState& state) {
  if (state.n() != h.n || state.extended() != h.is_extended())
    throw DomainError("state dimensions do not match the Hamiltonian");
  return eval_coords(h, state.coords());
}

std::vector<double> grad(const HamiltonianSpec& h, const PhaseState& state) {
  if (state.n() != h.n || state.extended() != h.is_extended())
    throw DomainError("state dimensions do not match the Hamiltonian");
  std::vector<double> out(state.coords().size());
  grad_into(h, state.coords(), out);
  return out;
}

std::vector<double> second_order_residual(const HamiltonianSpec& h, std::span<const double> q, double dt) {
  if (q.size() < 3) throw DomainError("residual needs at least 3 samples");
  if (!(dt > 0.0)) throw DomainError("sample spacing must be positive");
  if (h.n != 1 || h.is_extended() || h.kinetic != Kinetic::quadratic)
    throw DomainError("second-order reduction applies to one-dimensional mechanical Hamiltonians");
  std::vector<double> r(q.size() - 2);
  for (std::size_t k = 1; k + 1 < q.size(); ++k) {
    const double qdd = (q[k + 1] - 2.0 * q[k] + q[k - 1]) / (dt * dt);
    const double qd = (q[k + 1] - q[k - 1]) / (2.0 * dt);
    r[k - 1] = qdd + 2.0 * qd * h.potential.slope(q[k]);
  }
  return r;
}

}  // namespace bsym
