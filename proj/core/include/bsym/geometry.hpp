#pragma once

// Singular (b-)symplectic structures on cotangent bundles and the
// Hamiltonian vector fields they induce.
//
// Every structure handled here is a sum of conjugate pairs (x_i, y_i) whose
// Poisson bivector is block diagonal:
//
//     Pi = sum_i w_i(x) d/dx_i ^ d/dy_i,     X_H = Pi . grad H,
//
// and the 2-form is its inverse, omega = sum_i (1/w_i) dy_i ^ dx_i. For the
// regular pairs w_i = 1. The singular pair carries
//
//     twisted_b      w = p_k / c     (Z = {p_k = 0})
//     nontwisted_b   w = q_k / c     (Z = {q_k = 0})
//     extended_b_s   w = s / c       (Z = {s = 0})
//
// and the (t, E) pair of the extended canonical structure has w = -1, which
// gives t' = 1 and E' = dV/dt for H = p^2/2 + V(q,t) - E.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsym {

class HamiltonianSpec;

enum class StructureKind { canonical, twisted_b, nontwisted_b, extended_canonical, extended_b_s };

std::string_view to_string(StructureKind kind);
StructureKind structure_kind_from_string(std::string_view name);

/// A point of phase space.
///
/// Coordinates are stored flat as [q_1..q_m, p_1..p_m] where m = n for plain
/// states and m = n + 1 for extended states; the extra conjugate pair is
/// (t, E) or (s, E_s) and sits at position index n / momentum index n.
class PhaseState {
 public:
  PhaseState() = default;
  PhaseState(std::vector<double> q, std::vector<double> p);
  PhaseState(std::vector<double> q, std::vector<double> p, double ext_position, double ext_momentum);

  /// Rebuilds a state from the flat layout. `coords.size()` must be 2 * (n + extended).
  static PhaseState from_coords(std::size_t n, bool extended, std::span<const double> coords);

  std::size_t n() const { return n_; }
  bool extended() const { return extended_; }
  /// Number of conjugate pairs (n, or n + 1 for extended states).
  std::size_t pairs() const { return n_ + (extended_ ? 1 : 0); }

  double q(std::size_t i) const { return x_[i]; }
  double p(std::size_t i) const { return x_[pairs() + i]; }
  std::span<const double> q() const { return {x_.data(), n_}; }
  std::span<const double> p() const { return {x_.data() + pairs(), n_}; }

  /// t or s.
  double ext_position() const;
  /// E or E_s.
  double ext_momentum() const;

  std::span<const double> coords() const { return x_; }
  std::span<double> coords_mut() { return x_; }

  friend bool operator==(const PhaseState&, const PhaseState&) = default;

 private:
  std::size_t n_ = 0;
  bool extended_ = false;
  std::vector<double> x_;
};

/// Descriptor of the 2-form governing the dynamics.
struct PhaseStructure {
  StructureKind kind = StructureKind::canonical;
  /// Spatial dimension n; the phase space has dimension 2n (2n + 2 for extended kinds).
  std::size_t n = 1;
  double modular_weight = 1.0;
  /// Index of the coordinate carrying the singularity: a momentum index for
  /// twisted_b, a position index for nontwisted_b. Ignored otherwise.
  std::size_t singular_index = 0;
  /// Marks positions that live on a circle of period 2 pi. Empty means none.
  std::vector<bool> angular_mask;
  /// Threshold on |defining_function| below which the bivector is treated as degenerate.
  double degeneracy_tol = 1e-14;

  static PhaseStructure canonical(std::size_t n = 1);
  static PhaseStructure twisted(std::size_t n = 1, double c = 1.0, std::size_t singular_index = 0);
  static PhaseStructure nontwisted(std::size_t n = 1, double c = 1.0, std::size_t singular_index = 0);
  static PhaseStructure extended_canonical(std::size_t n = 1);
  static PhaseStructure extended_b_s(std::size_t n = 1, double c = 1.0);

  PhaseStructure with_angles(std::vector<bool> mask) const;

  bool singular() const;
  bool is_extended() const;
  std::size_t dimension() const { return 2 * pairs(); }
  std::size_t pairs() const { return n + (is_extended() ? 1 : 0); }
  bool is_angular(std::size_t position_index) const;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
  /// Throws DomainError when `state` does not have the shape this structure expects.
  void check_state(const PhaseState& state) const;
};

/// Dense antisymmetric matrix in the flat coordinate layout of PhaseState.
class Bivector {
 public:
  explicit Bivector(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}
  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }

 private:
  std::size_t dim_;
  std::vector<double> a_;
};

/// Value of the coordinate cutting out the critical set Z.
double defining_function(const PhaseStructure& structure, const PhaseState& state);

/// Poisson weight of conjugate pair `pair` at the given flat coordinates.
double pair_weight(const PhaseStructure& structure, std::span<const double> coords, std::size_t pair);

Bivector poisson_bivector(const PhaseStructure& structure, const PhaseState& state);

/// Rank of the Poisson bivector. A singular pair counts as degenerate when
/// |defining_function| < structure.degeneracy_tol.
std::size_t poisson_rank(const PhaseStructure& structure, const PhaseState& state);

std::vector<double> hamiltonian_vector_field(const PhaseStructure& structure, const HamiltonianSpec& h,
                                             const PhaseState& state);

/// Allocation-free variant used by the integrators: `out` receives Pi . grad H.
/// `grad_scratch` must have the size of `coords`.
void hamiltonian_vector_field_into(const PhaseStructure& structure, const HamiltonianSpec& h,
                                   std::span<const double> coords, std::span<double> grad_scratch,
                                   std::span<double> out);

/// omega(u, v) at `state`; throws DomainError on the critical set.
double evaluate_form(const PhaseStructure& structure, const PhaseState& state, std::span<const double> u,
                     std::span<const double> v);

/// Reduces an angle into [0, 2 pi).
double wrap_angle(double theta);
/// Difference a - b of two angles, mapped into [-pi, pi).
double angle_difference(double a, double b);

}  // namespace bsym
