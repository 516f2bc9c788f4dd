#pragma once
// Reference data for L = 10, m1 = 6, m110 = 2 and L = 16, m1 = 11, m110 = 4.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ringflux/alpha_poly.hpp"

namespace reference {

using ringflux::AlphaPoly;

inline AlphaPoly t(std::int64_t c, int i, int k) { return AlphaPoly::term(c, i, k); }

inline const std::vector<std::string> omega1{"0001101111", "0001110111", "0001111011",
                                             "0010110111", "0010111011", "0011011101",
                                             "0011101101", "0101011011"};
inline const std::vector<std::string> omega2{"0011001111", "0011010111", "0011100111",
                                             "0011101011", "0101101011"};

inline std::vector<std::vector<AlphaPoly>> matrix1() {
  const AlphaPoly z;
  return {
      {t(1, 0, 1), z, z, z, z, t(1, 1, 0), z, z},
      {t(1, 1, 1), t(1, 0, 2), z, z, z, t(1, 2, 0), t(1, 1, 1), z},
      {z, t(1, 1, 0), t(1, 0, 1), z, z, z, z, z},
      {z, t(1, 0, 1), z, z, z, z, t(1, 1, 0), z},
      {z, t(1, 1, 0), t(1, 0, 1), z, z, z, z, z},
      {z, z, z, t(1, 0, 1), z, z, z, t(1, 1, 0)},
      {z, z, z, t(1, 1, 0), t(1, 0, 1), z, z, z},
      {z, z, z, z, t(1, 0, 0), z, z, z},
  };
}

inline std::vector<std::vector<AlphaPoly>> matrix2() {
  const AlphaPoly z;
  return {
      {t(1, 0, 1), z, z, t(1, 1, 0), z},
      {t(1, 0, 1), z, z, t(1, 1, 0), z},
      {z, t(2, 1, 1), t(1, 0, 2), z, t(1, 2, 0)},
      {z, t(1, 1, 0), t(1, 0, 1), z, z},
      {z, z, t(1, 0, 0), z, z},
  };
}

inline std::vector<double> eigen1(double a) {
  return {(1 - a) / (a * a), 1 / (a * a), (1 - a) / (a * a), 1 / a, 1 / a, 1 / a, 1 / a, 1.0};
}

inline std::vector<double> eigen2(double a) {
  return {2 * (1 - a) / (a * a), 2 / a, 1 / (a * a), 2 / a, 1.0};
}

inline const std::vector<std::string> omega16{
    "0011011011011111", "0011011011101111", "0011011011110111", "0011011011111011",
    "0011011101101111", "0011011101110111", "0011011101111011", "0011011110110111",
    "0011011110111011", "0011011111011011", "0011101101101111", "0011101101110111",
    "0011101101111011", "0011101110110111", "0011101110111011", "0011101111011011",
    "0011110110110111", "0011110110111011", "0011110111011011", "0011111011011011",
    "0101101101101111", "0101101101110111", "0101101101111011", "0101101110110111",
    "0101101110111011", "0101101111011011", "0101110110110111", "0101110110111011",
    "0101110111011011", "0101111011011011"};

inline std::vector<double> eigen16(double a) {
  const double p = (1 - a) / a, q = 1 / a, r = 1 / ((1 - a) * a), s = 1.0, u = 1 / (1 - a);
  return {p, q, q, p, q, r, q, q, q, p, q, r, q, r, r, q, q, q, q, p,
          s, u, s, u, u, s, u, u, u, s};
}

inline std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (double& x : v) x /= s;
  return v;
}

inline double max_relative_error(const std::vector<double>& got, const std::vector<double>& want) {
  double e = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    e = std::max(e, std::abs(got[i] - want[i]) / std::abs(want[i]));
  return e;
}

}  // namespace reference
