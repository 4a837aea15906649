#include "bsym/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bsym/errors.hpp"
#include "bsym/hamiltonians.hpp"

namespace bsym {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Flat index of the coordinate cutting out Z.
std::size_t defining_coordinate(const PhaseStructure& s) {
  switch (s.kind) {
    case StructureKind::twisted_b:
      return s.pairs() + s.singular_index;
    case StructureKind::nontwisted_b:
      return s.singular_index;
    case StructureKind::extended_b_s:
      return s.n;
    default:
      throw DomainError("structure has no critical set");
  }
}

}  // namespace

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::canonical:
      return "canonical";
    case StructureKind::twisted_b:
      return "twisted_b";
    case StructureKind::nontwisted_b:
      return "nontwisted_b";
    case StructureKind::extended_canonical:
      return "extended_canonical";
    case StructureKind::extended_b_s:
      return "extended_b_s";
  }
  return "unknown";
}

StructureKind structure_kind_from_string(std::string_view name) {
  for (auto k : {StructureKind::canonical, StructureKind::twisted_b, StructureKind::nontwisted_b,
                 StructureKind::extended_canonical, StructureKind::extended_b_s}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown structure kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// PhaseState

PhaseState::PhaseState(std::vector<double> q, std::vector<double> p) : n_(q.size()), extended_(false) {
  if (q.size() != p.size()) throw DomainError("position and momentum vectors differ in length");
  if (q.empty()) throw DomainError("phase state needs at least one degree of freedom");
  x_ = std::move(q);
  x_.insert(x_.end(), p.begin(), p.end());
}

PhaseState::PhaseState(std::vector<double> q, std::vector<double> p, double ext_position, double ext_momentum)
    : n_(q.size()), extended_(true) {
  if (q.size() != p.size()) throw DomainError("position and momentum vectors differ in length");
  if (q.empty()) throw DomainError("phase state needs at least one degree of freedom");
  x_.reserve(2 * n_ + 2);
  x_.insert(x_.end(), q.begin(), q.end());
  x_.push_back(ext_position);
  x_.insert(x_.end(), p.begin(), p.end());
  x_.push_back(ext_momentum);
}

PhaseState PhaseState::from_coords(std::size_t n, bool extended, std::span<const double> coords) {
  const std::size_t m = n + (extended ? 1 : 0);
  if (n == 0 || coords.size() != 2 * m) throw DomainError("coordinate vector does not match state shape");
  PhaseState s;
  s.n_ = n;
  s.extended_ = extended;
  s.x_.assign(coords.begin(), coords.end());
  return s;
}

double PhaseState::ext_position() const {
  if (!extended_) throw DomainError("state has no extended coordinates");
  return x_[n_];
}

double PhaseState::ext_momentum() const {
  if (!extended_) throw DomainError("state has no extended coordinates");
  return x_[2 * n_ + 1];
}

// ---------------------------------------------------------------------------
// PhaseStructure

PhaseStructure PhaseStructure::canonical(std::size_t n) {
  PhaseStructure s;
  s.kind = StructureKind::canonical;
  s.n = n;
  return s;
}

PhaseStructure PhaseStructure::twisted(std::size_t n, double c, std::size_t singular_index) {
  PhaseStructure s;
  s.kind = StructureKind::twisted_b;
  s.n = n;
  s.modular_weight = c;
  s.singular_index = singular_index;
  s.validate();
  return s;
}

PhaseStructure PhaseStructure::nontwisted(std::size_t n, double c, std::size_t singular_index) {
  PhaseStructure s = twisted(n, c, singular_index);
  s.kind = StructureKind::nontwisted_b;
  return s;
}

PhaseStructure PhaseStructure::extended_canonical(std::size_t n) {
  PhaseStructure s;
  s.kind = StructureKind::extended_canonical;
  s.n = n;
  return s;
}

PhaseStructure PhaseStructure::extended_b_s(std::size_t n, double c) {
  PhaseStructure s;
  s.kind = StructureKind::extended_b_s;
  s.n = n;
  s.modular_weight = c;
  s.validate();
  return s;
}

PhaseStructure PhaseStructure::with_angles(std::vector<bool> mask) const {
  PhaseStructure s = *this;
  s.angular_mask = std::move(mask);
  s.validate();
  return s;
}

bool PhaseStructure::singular() const {
  return kind == StructureKind::twisted_b || kind == StructureKind::nontwisted_b ||
         kind == StructureKind::extended_b_s;
}

bool PhaseStructure::is_extended() const {
  return kind == StructureKind::extended_canonical || kind == StructureKind::extended_b_s;
}

bool PhaseStructure::is_angular(std::size_t position_index) const {
  return position_index < angular_mask.size() && angular_mask[position_index];
}

void PhaseStructure::validate() const {
  if (n == 0) throw DomainError("phase-space dimension must be at least 2");
  if (singular() && !(modular_weight != 0.0 && std::isfinite(modular_weight)))
    throw DomainError("modular weight must be a nonzero finite number");
  if ((kind == StructureKind::twisted_b || kind == StructureKind::nontwisted_b) && singular_index >= n)
    throw DomainError("singular index " + std::to_string(singular_index) + " out of range for n = " +
                      std::to_string(n));
  if (!angular_mask.empty() && angular_mask.size() != n)
    throw DomainError("angular mask must have one entry per position");
  if (kind == StructureKind::nontwisted_b && is_angular(singular_index))
    throw DomainError("the singular position of a non-twisted structure cannot be an angle");
  if (!(degeneracy_tol > 0.0)) throw DomainError("degeneracy tolerance must be positive");
}

void PhaseStructure::check_state(const PhaseState& state) const {
  if (state.n() != n || state.extended() != is_extended())
    throw DomainError("state dimensions do not match the structure (expected n = " + std::to_string(n) +
                      (is_extended() ? ", extended" : "") + ")");
}

// ---------------------------------------------------------------------------

double defining_function(const PhaseStructure& structure, const PhaseState& state) {
  const std::size_t idx = defining_coordinate(structure);
  structure.check_state(state);
  return state.coords()[idx];
}

double pair_weight(const PhaseStructure& s, std::span<const double> x, std::size_t pair) {
  const std::size_t m = s.pairs();
  switch (s.kind) {
    case StructureKind::canonical:
      return 1.0;
    case StructureKind::twisted_b:
      return pair == s.singular_index ? x[m + pair] / s.modular_weight : 1.0;
    case StructureKind::nontwisted_b:
      return pair == s.singular_index ? x[pair] / s.modular_weight : 1.0;
    case StructureKind::extended_canonical:
      return pair == s.n ? -1.0 : 1.0;
    case StructureKind::extended_b_s:
      return pair == s.n ? x[s.n] / s.modular_weight : 1.0;
  }
  return 1.0;
}

Bivector poisson_bivector(const PhaseStructure& structure, const PhaseState& state) {
  structure.check_state(state);
  const std::size_t m = structure.pairs();
  Bivector pi(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = pair_weight(structure, state.coords(), i);
    pi(i, m + i) = w;
    pi(m + i, i) = -w;
  }
  return pi;
}

std::size_t poisson_rank(const PhaseStructure& structure, const PhaseState& state) {
  structure.check_state(state);
  std::size_t rank = structure.dimension();
  if (structure.singular() && std::abs(defining_function(structure, state)) < structure.degeneracy_tol) rank -= 2;
  return rank;
}

void hamiltonian_vector_field_into(const PhaseStructure& structure, const HamiltonianSpec& h,
                                   std::span<const double> x, std::span<double> g, std::span<double> out) {
  grad_into(h, x, g);
  const std::size_t m = structure.pairs();
  for (std::size_t i = 0; i < m; ++i) {
    const double w = pair_weight(structure, x, i);
    out[i] = w * g[m + i];
    out[m + i] = -(w * g[i]);
  }
}

std::vector<double> hamiltonian_vector_field(const PhaseStructure& structure, const HamiltonianSpec& h,
                                             const PhaseState& state) {
  structure.check_state(state);
  if (h.dimension() != structure.dimension() || h.n != structure.n)
    throw DomainError("Hamiltonian and structure dimensions disagree");
  std::vector<double> g(state.coords().size());
  std::vector<double> out(g.size());
  hamiltonian_vector_field_into(structure, h, state.coords(), g, out);
  return out;
}

double evaluate_form(const PhaseStructure& structure, const PhaseState& state, std::span<const double> u,
                     std::span<const double> v) {
  structure.check_state(state);
  const std::size_t dim = structure.dimension();
  if (u.size() != dim || v.size() != dim) throw DomainError("tangent vectors do not match the phase dimension");
  if (structure.singular() && std::abs(defining_function(structure, state)) < structure.degeneracy_tol)
    throw DomainError("form singular on critical set");
  const std::size_t m = structure.pairs();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = pair_weight(structure, state.coords(), i);
    acc += (u[m + i] * v[i] - u[i] * v[m + i]) / w;
  }
  return acc;
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d < -std::numbers::pi) d += kTwoPi;
  if (d >= std::numbers::pi) d -= kTwoPi;
  return d;
}

}  // namespace bsym
