#include "ringflux/alpha_poly.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ringflux/errors.hpp"

namespace ringflux {

AlphaPoly AlphaPoly::term(std::int64_t multiplicity, int alpha_exp, int complement_exp) {
  if (alpha_exp < 0 || complement_exp < 0) throw InvalidArgument("negative exponent");
  AlphaPoly p;
  if (multiplicity != 0) p.terms_[{alpha_exp, complement_exp}] = multiplicity;
  return p;
}

AlphaPoly& AlphaPoly::operator+=(const AlphaPoly& other) {
  for (const auto& [e, c] : other.terms_) {
    auto& slot = terms_[e];
    slot += c;
    if (slot == 0) terms_.erase(e);
  }
  return *this;
}

AlphaPoly operator*(const AlphaPoly& a, const AlphaPoly& b) {
  AlphaPoly out;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_)
      out += AlphaPoly::term(ca * cb, ea.first + eb.first, ea.second + eb.second);
  return out;
}

double AlphaPoly::evaluate(double alpha) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_)
    sum += static_cast<double>(c) * std::pow(alpha, e.first) * std::pow(1.0 - alpha, e.second);
  return sum;
}

mpq_class AlphaPoly::evaluate(const mpq_class& alpha) const {
  const mpq_class beta = 1 - alpha;
  mpq_class sum = 0;
  for (const auto& [e, c] : terms_) {
    mpq_class t(static_cast<long>(c));
    for (int j = 0; j < e.first; ++j) t *= alpha;
    for (int j = 0; j < e.second; ++j) t *= beta;
    sum += t;
  }
  return sum;
}

std::vector<mpz_class> AlphaPoly::power_basis() const {
  std::vector<mpz_class> coeffs;
  for (const auto& [e, c] : terms_) {
    const auto [i, k] = e;
    if (coeffs.size() < static_cast<std::size_t>(i + k + 1)) coeffs.resize(i + k + 1);
    // (1-a)^k = sum_j C(k,j) (-1)^j a^j
    mpz_class binom = 1;
    for (int j = 0; j <= k; ++j) {
      mpz_class term = binom * static_cast<long>(c);
      if (j % 2) term = -term;
      coeffs[i + j] += term;
      binom = binom * (k - j) / (j + 1);
    }
  }
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  return coeffs;
}

std::string AlphaPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c << "*a^" << e.first << "*(1-a)^" << e.second;
  }
  return os.str();
}

AlphaPoly AlphaPoly::parse(std::string_view text) {
  AlphaPoly p;
  if (text == "0") return p;
  std::string s(text);
  std::size_t pos = 0;
  auto fail = [&] { throw InvalidArgument("malformed probability expression: " + s); };
  while (pos < s.size()) {
    long long c = 0;
    int i = 0, k = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str() + pos, "%lld*a^%d*(1-a)^%d%n", &c, &i, &k, &consumed) != 3) fail();
    p += term(c, i, k);
    pos += static_cast<std::size_t>(consumed);
    if (pos == s.size()) break;
    if (s.compare(pos, 3, " + ") != 0) fail();
    pos += 3;
  }
  return p;
}

bool equivalent(const AlphaPoly& a, const AlphaPoly& b) {
  return a.power_basis() == b.power_basis();
}

}  // namespace ringflux
