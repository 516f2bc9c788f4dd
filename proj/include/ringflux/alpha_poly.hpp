#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace ringflux {

// Exact probability expression sum_t c_t * alpha^i_t * (1 - alpha)^k_t with
// integer multiplicities. Terms with equal (i, k) are merged; zero
// multiplicities are dropped, so the default value is the zero polynomial.
class AlphaPoly {
 public:
  using Exponents = std::pair<int, int>;  // (i, k)

  AlphaPoly() = default;
  static AlphaPoly one() { return term(1, 0, 0); }
  static AlphaPoly term(std::int64_t multiplicity, int alpha_exp, int complement_exp);
  // Inverse of to_string().
  static AlphaPoly parse(std::string_view text);

  const std::map<Exponents, std::int64_t>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  AlphaPoly& operator+=(const AlphaPoly& other);
  friend AlphaPoly operator+(AlphaPoly a, const AlphaPoly& b) { return a += b; }
  friend AlphaPoly operator*(const AlphaPoly& a, const AlphaPoly& b);
  bool operator==(const AlphaPoly&) const = default;

  double evaluate(double alpha) const;
  mpq_class evaluate(const mpq_class& alpha) const;

  // Coefficients in the monomial basis 1, alpha, alpha^2, ... (trailing zeros trimmed).
  std::vector<mpz_class> power_basis() const;
  bool identically_zero() const { return power_basis().empty(); }

  // "c*a^i*(1-a)^k + ..." with every exponent spelled out; "0" when empty.
  std::string to_string() const;

 private:
  std::map<Exponents, std::int64_t> terms_;
};

// Polynomial identity in alpha (as opposed to structural equality of terms).
bool equivalent(const AlphaPoly& a, const AlphaPoly& b);

}  // namespace ringflux
