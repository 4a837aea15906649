#pragma once

#include <stdexcept>
#include <string>

namespace bsym {

/// Invalid structure, state or parameter combination.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A vector field or Hamiltonian evaluated to a non-finite value, or an
/// exponential rescaling exceeded the overflow guard.
class BlowupError : public std::runtime_error {
 public:
  explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bsym
