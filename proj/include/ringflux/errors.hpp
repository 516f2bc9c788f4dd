#pragma once

#include <stdexcept>
#include <string>

namespace ringflux {

// Precondition violated by caller-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (L, m1, m110) admits no configuration or violates 2*m110 <= m1 <= L - m110.
class InfeasibleSector : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solve did not reach the requested residual.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Raised when an invariant that upstream code guarantees does not hold.
class InternalContradiction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ringflux
