#include "bsym/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsym/errors.hpp"

namespace bsym::oracles {

std::pair<double, double> stokes_exact(double q0, double p0, double lambda, double t) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  // -expm1(-x) = 1 - e^{-x} without cancellation for small x.
  const double q = q0 + (p0 * p0 / lambda) * (-std::expm1(-lambda * t));
  const double p = p0 * std::exp(-0.5 * lambda * t);
  return {q, p};
}

std::pair<double, double> classical_parabola(double q0, double p0, double lambda, double t) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return {-0.25 * lambda * t * t + p0 * t + q0, p0 - 0.5 * lambda * t};
}

double quadratic_tanh(double c1, double c2, double lambda, double t) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double r = std::sqrt(lambda);
  return c1 / r * std::tanh(0.5 * c1 * r * t + c2);
}

OracleResult damped_newton_reference(const PotentialSpec& potential, double lambda, double q0, double v0,
                                     std::span<const double> t_grid) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
  if (t_grid.empty()) throw DomainError("time grid is empty");
  double min_dt = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    if (!(dt > 0.0)) throw DomainError("time grid must be strictly increasing");
    min_dt = std::min(min_dt, dt);
  }

  OracleResult out;
  out.source = Source::fine_integration;
  out.step = std::isfinite(min_dt) ? min_dt / 100.0 : 0.0;

  auto accel = [&](double q, double v, double t) {
    const double x[1] = {q};
    double dq[1] = {0.0};
    potential.gradient(x, t, dq);
    return -lambda * v - dq[0];
  };

  double q = q0, v = v0;
  out.times.push_back(t_grid[0]);
  out.states.emplace_back(std::vector<double>{q}, std::vector<double>{v});
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double span = t_grid[k] - t_grid[k - 1];
    const auto substeps = static_cast<std::size_t>(std::ceil(span / out.step - 1e-9));
    const double h = span / static_cast<double>(substeps);
    for (std::size_t j = 0; j < substeps; ++j) {
      const double t = t_grid[k - 1] + static_cast<double>(j) * h;
      const double k1q = v, k1v = accel(q, v, t);
      const double k2q = v + 0.5 * h * k1v, k2v = accel(q + 0.5 * h * k1q, v + 0.5 * h * k1v, t + 0.5 * h);
      const double k3q = v + 0.5 * h * k2v, k3v = accel(q + 0.5 * h * k2q, v + 0.5 * h * k2v, t + 0.5 * h);
      const double k4q = v + h * k3v, k4v = accel(q + h * k3q, v + h * k3v, t + h);
      q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    if (!std::isfinite(q) || !std::isfinite(v)) throw BlowupError("damped Newton reference diverged");
    out.times.push_back(t_grid[k]);
    out.states.emplace_back(std::vector<double>{q}, std::vector<double>{v});
  }
  return out;
}

}  // namespace bsym::oracles
