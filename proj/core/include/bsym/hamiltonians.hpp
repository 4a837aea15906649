#pragma once

// Kinetic-plus-potential Hamiltonians with analytic gradients.
//
// Potential families (all act on the first position coordinate q_1):
//
//     linear             f = (lambda/2) q
//     pure_quadratic     f = (lambda/4) q^2
//     general_quadratic  f = (lambda/2) q (1 + alpha q / 2)
//     periodic           f = (lambda/2) cos(q)
//     zero               f = 0
//     custom             user supplied V(q, t)
//
// Extended (time-dependent) variants, with m = lambda the friction rate:
//
//     plain_extended     H = |p|^2/2 + V(q,t) - E
//     rescaled_extended  H = |p|^2/2 + e^{2mt}/m^2 V(q,t) - e^{mt}/m E
//     s_coordinates      H = |p|^2/2 + V(q, t(s))/(m s)^2 - E_s/s,  t(s) = -ln(s)/m

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsym/geometry.hpp"

namespace bsym {

enum class PotentialFamily { linear, pure_quadratic, general_quadratic, periodic, zero, custom };

std::string_view to_string(PotentialFamily family);
PotentialFamily potential_family_from_string(std::string_view name);

/// User-supplied potential. Both callables must be free of side effects.
struct CustomPotential {
  std::function<double(std::span<const double> q, double t)> value;
  /// Optional. Writes dV/dq into `dq` and returns dV/dt. When empty, central
  /// differences with step 1e-6 are used instead.
  std::function<double(std::span<const double> q, double t, std::span<double> dq)> gradient;
};

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::zero;
  double lambda = 1.0;
  double alpha = 0.0;
  CustomPotential custom;

  static PotentialSpec linear(double lambda);
  static PotentialSpec pure_quadratic(double lambda);
  static PotentialSpec general_quadratic(double lambda, double alpha);
  static PotentialSpec periodic(double lambda);
  static PotentialSpec zero();
  static PotentialSpec from_function(CustomPotential custom);

  double value(std::span<const double> q, double t = 0.0) const;
  /// Writes dV/dq into `dq` (size of q) and returns dV/dt.
  double gradient(std::span<const double> q, double t, std::span<double> dq) const;
  /// d f / d q_1, the drag term entering q'' = -2 q' f'(q) for n = 1.
  double slope(double q) const;

  void validate() const;
};

enum class Kinetic {
  quadratic,     ///< |p|^2 / 2
  toric_log,     ///< c log|p_1| + p_2 + ... + p_n
  momentum_sum,  ///< p_1 + ... + p_n
};

enum class Extension { none, plain_extended, rescaled_extended, s_coordinates };

std::string_view to_string(Extension ext);

class HamiltonianSpec {
 public:
  PotentialSpec potential;
  std::size_t n = 1;
  Extension extended = Extension::none;
  Kinetic kinetic = Kinetic::quadratic;
  /// Coefficient c of the log term for Kinetic::toric_log.
  double moment_weight = 1.0;
  /// Friction rate for the rescaled and s-coordinate variants.
  double time_scale = 1.0;

  /// H = |p|^2/2 + f(q).
  static HamiltonianSpec mechanical(PotentialSpec potential, std::size_t n = 1);
  static HamiltonianSpec plain_extended(PotentialSpec potential, std::size_t n = 1);
  static HamiltonianSpec rescaled_extended(PotentialSpec potential, double lambda, std::size_t n = 1);
  static HamiltonianSpec s_coordinates(PotentialSpec potential, double lambda, std::size_t n = 1);
  /// H = c log|p_1| + p_2 + ... + p_n, the toric moment map of a lifted action.
  static HamiltonianSpec toric_moment(double c, std::size_t n = 1);
  /// H = p_1 + ... + p_n, generator of base translations.
  static HamiltonianSpec momentum_sum(std::size_t n = 1);

  bool is_extended() const { return extended != Extension::none; }
  std::size_t dimension() const { return 2 * (n + (is_extended() ? 1 : 0)); }

  /// Short identifier used in artifacts, e.g. "mechanical:linear(lambda=1)".
  std::string id() const;

  void validate() const;
};

double eval(const HamiltonianSpec& h, const PhaseState& state);
std::vector<double> grad(const HamiltonianSpec& h, const PhaseState& state);

/// Flat-layout versions used on the hot path.
double eval_coords(const HamiltonianSpec& h, std::span<const double> coords);
void grad_into(const HamiltonianSpec& h, std::span<const double> coords, std::span<double> out);

/// Residual q'' + 2 q' f'(q) of the reduced second-order equation of the
/// twisted model, by central differences on a uniformly sampled series.
/// Returns one value per interior sample.
std::vector<double> second_order_residual(const HamiltonianSpec& h, std::span<const double> q_samples, double dt);

}  // namespace bsym
