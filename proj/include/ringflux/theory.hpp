#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "ringflux/ensemble.hpp"

namespace ringflux {

enum class PartitionScope { Omega, Sector };

// N(k1, k2): number of raw configurations (every rotation counted) with
// m1110 = k1 and m010 = k2, within one recurrent set or a whole sector.
struct PartitionTable {
  PartitionScope scope = PartitionScope::Sector;
  std::size_t length = 0;
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  std::map<std::pair<std::size_t, std::size_t>, mpz_class> counts;

  bool empty() const noexcept { return counts.empty(); }
  mpz_class total() const;
  std::size_t kmax() const;         // min(L - m1, m1 - 2 m110)
  std::size_t max_support() const;  // largest k1 + k2 with N > 0
  bool operator==(const PartitionTable&) const = default;
};

std::size_t kmax(std::size_t length, std::size_t m1, std::size_t m110);

PartitionTable partition_omega(const OmegaSet& omega);
PartitionTable partition_enumerated(const Sector& sector);

// Cyclic transfer-matrix count over the last three sites. Exact for L <= 127.
inline constexpr std::size_t kMaxDpLength = 127;
PartitionTable partition_sector_dp(std::size_t length, std::size_t m1, std::size_t m110);
// Every nonempty sector of the given length from one sweep, keyed by (m1, m110).
std::map<std::pair<std::size_t, std::size_t>, PartitionTable> partition_all_sectors_dp(
    std::size_t length);

struct FluxPoint {
  std::size_t length = 0;
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  double alpha = 0.0;
  double q_v = 0.0;  // v-system mean flux
  double q_u = 0.0;  // u-system mean flux, m1/L - q_v
};

// Mean flux from the pattern-count distribution over the table, evaluated
// with every weight rescaled by (1 - alpha)^kmax. alpha in (0, 1).
FluxPoint q_theory(const PartitionTable& table, double alpha);
mpq_class q_theory_exact(const PartitionTable& table, const mpq_class& alpha);  // q_v

// max(2 rho1 - 1, 2 rho110); throws InfeasibleSector outside 2 rho110 <= rho1 <= 1 - rho110.
mpq_class q_deterministic(const mpq_class& rho1, const mpq_class& rho110);

struct LimitRow {
  double alpha = 0.0;
  double q_u = 0.0;
  double deviation = 0.0;  // q_u - q_deterministic
};

struct LimitReport {
  std::size_t length = 0;
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  mpq_class deterministic;   // max(2 rho1 - 1, 2 rho110)
  mpq_class dominant_term;   // rho1 - Q_v with sums restricted to k1 + k2 = kmax, at alpha = 1
  bool kmax_attained = false;
  std::vector<LimitRow> rows;
  double extrapolated = 0.0;  // linear extrapolation in (1 - alpha) of the last two rows
  double extrapolated_deviation = 0.0;
};

inline const std::vector<double> kDefaultLimitAlphas{0.9, 0.99, 0.999, 0.9999};

LimitReport limit_check(const PartitionTable& table, std::span<const double> alphas);
LimitReport limit_check(std::size_t length, std::size_t m1, std::size_t m110,
                        std::span<const double> alphas);

}  // namespace ringflux
