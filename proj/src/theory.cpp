#include "ringflux/theory.hpp"

#include <algorithm>
#include <cmath>

#include "ringflux/errors.hpp"

namespace ringflux {

namespace {

using Key = std::pair<std::size_t, std::size_t>;

mpz_class to_mpz(unsigned __int128 v) {
  mpz_class hi(static_cast<unsigned long>(v >> 64));
  mpz_class lo(static_cast<unsigned long>(v & ~std::uint64_t{0}));
  return (hi << 64) + lo;
}

mpz_class to_mpz(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

// Dense counter table for the DP: (last three sites, m1, m110, m1110, m010).
template <class Count>
class DpGrid {
 public:
  DpGrid(std::size_t m1, std::size_t m110, std::size_t k1, std::size_t k2)
      : n1_(m1 + 1), n110_(m110 + 1), nk1_(k1 + 1), nk2_(k2 + 1),
        data_(8 * n1_ * n110_ * nk1_ * nk2_, Count{0}) {}

  Count& at(std::size_t ctx, std::size_t m1, std::size_t m110, std::size_t k1, std::size_t k2) {
    return data_[(((ctx * n1_ + m1) * n110_ + m110) * nk1_ + k1) * nk2_ + k2];
  }
  bool fits(std::size_t m1, std::size_t m110, std::size_t k1, std::size_t k2) const {
    return m1 < n1_ && m110 < n110_ && k1 < nk1_ && k2 < nk2_;
  }
  std::size_t n1() const { return n1_; }
  std::size_t n110() const { return n110_; }
  std::size_t nk1() const { return nk1_; }
  std::size_t nk2() const { return nk2_; }
  void clear() { std::fill(data_.begin(), data_.end(), Count{0}); }

 private:
  std::size_t n1_, n110_, nk1_, nk2_;
  std::vector<Count> data_;
};

struct Target {
  std::size_t m1;
  std::size_t m110;
};

// Counts cyclic strings by (m1, m110, m1110, m010). Patterns are counted at
// their last site. Sites 0..2 are fixed per pass (prefix); the windows ending
// at sites 0, 1, 2 wrap around and are added once the last three sites are
// known. With a target, states exceeding it are pruned.
template <class Count>
std::map<Key, PartitionTable> transfer_matrix_count(std::size_t L, const Target* target) {
  const std::size_t M1 = target ? target->m1 : L;
  const std::size_t M110 = target ? target->m110 : L / 3;
  // Per-pattern caps; in target mode both are bounded by kmax as well.
  const std::size_t cap = target ? std::min(L - M1, M1 - 2 * M110) : L;
  const std::size_t K1 = std::min({M110, L / 4, cap});
  const std::size_t K2 = std::min({M1, L / 2, cap});
  DpGrid<Count> cur(M1, M110, K1, K2), next(M1, M110, K1, K2);

  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, Count> totals;

  for (std::size_t prefix = 0; prefix < 8; ++prefix) {
    cur.clear();
    const std::size_t ones = static_cast<std::size_t>(__builtin_popcount(prefix));
    if (ones > M1) continue;
    cur.at(prefix, ones, 0, 0, 0) = 1;
    for (std::size_t e = 3; e < L; ++e) {
      next.clear();
      const std::size_t remaining = L - e;  // sites e..L-1 still to place
      const std::size_t lim1 = std::min(cur.n1(), e + 1);
      for (std::size_t ctx = 0; ctx < 8; ++ctx)
        for (std::size_t a = 0; a < lim1; ++a) {
          if (target && a + remaining < target->m1) continue;
          for (std::size_t b = 0; b < std::min(cur.n110(), e / 3 + 2); ++b)
            for (std::size_t k1 = 0; k1 < std::min(cur.nk1(), e / 4 + 2); ++k1)
              for (std::size_t k2 = 0; k2 < std::min(cur.nk2(), e / 2 + 2); ++k2) {
                const Count n = cur.at(ctx, a, b, k1, k2);
                if (n == 0) continue;
                for (std::size_t bit = 0; bit < 2; ++bit) {
                  const std::size_t w4 = (ctx << 1) | bit;
                  const std::size_t w3 = w4 & 7;
                  const std::size_t na = a + bit;
                  const std::size_t nb = b + (w3 == 0b110);
                  const std::size_t nk1 = k1 + (w4 == 0b1110);
                  const std::size_t nk2 = k2 + (w3 == 0b010);
                  if (!next.fits(na, nb, nk1, nk2)) {
                    if (target) continue;
                    throw InternalContradiction("transfer-matrix counter left its bounds");
                  }
                  next.at(w3, na, nb, nk1, nk2) += n;
                }
              }
        }
      std::swap(cur, next);
    }
    // Close the ring: sites L-3, L-2, L-1, 0, 1, 2 as a 6-bit word, MSB first.
    for (std::size_t ctx = 0; ctx < 8; ++ctx)
      for (std::size_t a = 0; a < cur.n1(); ++a)
        for (std::size_t b = 0; b < cur.n110(); ++b)
          for (std::size_t k1 = 0; k1 < cur.nk1(); ++k1)
            for (std::size_t k2 = 0; k2 < cur.nk2(); ++k2) {
              const Count n = cur.at(ctx, a, b, k1, k2);
              if (n == 0) continue;
              const std::size_t s = (ctx << 3) | prefix;
              std::size_t nb = b, nk1 = k1, nk2 = k2;
              for (std::size_t end = 3; end <= 5; ++end) {
                const std::size_t w3 = (s >> (5 - end)) & 7;
                const std::size_t w4 = (s >> (5 - end)) & 15;
                nb += w3 == 0b110;
                nk2 += w3 == 0b010;
                nk1 += w4 == 0b1110;
              }
              if (target && (a != target->m1 || nb != target->m110)) continue;
              totals[{a, nb, nk1, nk2}] += n;
            }
  }

  std::map<Key, PartitionTable> out;
  for (const auto& [key, n] : totals) {
    const auto [a, b, k1, k2] = key;
    auto& table = out[{a, b}];
    table.scope = PartitionScope::Sector;
    table.length = L;
    table.m1 = a;
    table.m110 = b;
    table.counts[{k1, k2}] = to_mpz(n);
  }
  return out;
}

// Short rings: every window overlaps itself, count directly.
std::map<Key, PartitionTable> brute_force_count(std::size_t L) {
  std::map<Key, PartitionTable> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << L); ++x) {
    const auto c = RingConfig::from_packed(x, L);
    const auto pair = conserved_pair(c);
    const auto pat = flux_patterns(c);
    auto& table = out[{pair.m1, pair.m110}];
    table.scope = PartitionScope::Sector;
    table.length = L;
    table.m1 = pair.m1;
    table.m110 = pair.m110;
    table.counts[{pat.m1110, pat.m010}] += 1;
  }
  return out;
}

std::map<Key, PartitionTable> count_sectors(std::size_t L, const Target* target) {
  if (L == 0) throw InvalidArgument("L must be positive");
  if (L > kMaxDpLength)
    throw InvalidArgument("transfer-matrix count supports L <= " + std::to_string(kMaxDpLength));
  if (L < 6) return brute_force_count(L);
  if (L <= 63) return transfer_matrix_count<std::uint64_t>(L, target);
  return transfer_matrix_count<unsigned __int128>(L, target);
}

PartitionTable empty_table(std::size_t L, std::size_t m1, std::size_t m110) {
  PartitionTable t;
  t.scope = PartitionScope::Sector;
  t.length = L;
  t.m1 = m1;
  t.m110 = m110;
  return t;
}

void require_open_unit_interval(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha) +
                          "; use q_deterministic or limit_check at the endpoints");
}

}  // namespace

mpz_class PartitionTable::total() const {
  mpz_class t = 0;
  for (const auto& [k, n] : counts) t += n;
  return t;
}

std::size_t PartitionTable::kmax() const { return ringflux::kmax(length, m1, m110); }

std::size_t PartitionTable::max_support() const {
  std::size_t top = 0;
  for (const auto& [k, n] : counts)
    if (n > 0) top = std::max(top, k.first + k.second);
  return top;
}

std::size_t kmax(std::size_t length, std::size_t m1, std::size_t m110) {
  if (!satisfies_density_bounds(length, m1, m110))
    throw InfeasibleSector("sector (L=" + std::to_string(length) + ", m1=" + std::to_string(m1) +
                           ", m110=" + std::to_string(m110) +
                           ") violates 2*m110 <= m1 <= L - m110");
  return std::min(length - m1, m1 - 2 * m110);
}

PartitionTable partition_omega(const OmegaSet& omega) {
  PartitionTable t;
  t.scope = PartitionScope::Omega;
  t.length = omega.length;
  t.m1 = omega.m1;
  t.m110 = omega.m110;
  for (const auto& c : omega.members) {
    const auto p = flux_patterns(c.representative);
    t.counts[{p.m1110, p.m010}] += static_cast<unsigned long>(c.orbit_size);
  }
  return t;
}

PartitionTable partition_enumerated(const Sector& sector) {
  PartitionTable t = empty_table(sector.length, sector.m1, sector.m110);
  for (const auto& c : sector.classes) {
    const auto p = flux_patterns(c.representative);
    t.counts[{p.m1110, p.m010}] += static_cast<unsigned long>(c.orbit_size);
  }
  return t;
}

PartitionTable partition_sector_dp(std::size_t length, std::size_t m1, std::size_t m110) {
  if (!satisfies_density_bounds(length, m1, m110)) return empty_table(length, m1, m110);
  const Target target{m1, m110};
  auto all = count_sectors(length, &target);
  const auto it = all.find({m1, m110});
  if (it == all.end()) return empty_table(length, m1, m110);
  return it->second;
}

std::map<std::pair<std::size_t, std::size_t>, PartitionTable> partition_all_sectors_dp(
    std::size_t length) {
  return count_sectors(length, nullptr);
}

FluxPoint q_theory(const PartitionTable& table, double alpha) {
  require_open_unit_interval(alpha);
  if (table.empty()) throw InvalidArgument("partition table is empty");
  const std::size_t top = table.max_support();
  std::vector<std::pair<Key, double>> terms;
  for (const auto& [k, n] : table.counts) terms.emplace_back(k, n.get_d());
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.first.first + a.first.second > b.first.first + b.first.second;
  });
  double num = 0.0, den = 0.0;
  for (const auto& [k, n] : terms) {
    const auto [k1, k2] = k;
    const double w = n * std::pow(alpha, static_cast<double>(k2)) *
                     std::pow(1.0 - alpha, static_cast<double>(top - k1 - k2));
    num += (alpha * static_cast<double>(k1) + static_cast<double>(k2)) * w;
    den += w;
  }
  FluxPoint p;
  p.length = table.length;
  p.m1 = table.m1;
  p.m110 = table.m110;
  p.alpha = alpha;
  p.q_v = num / den / static_cast<double>(table.length);
  p.q_u = static_cast<double>(table.m1) / static_cast<double>(table.length) - p.q_v;
  return p;
}

mpq_class q_theory_exact(const PartitionTable& table, const mpq_class& alpha) {
  if (alpha <= 0 || alpha >= 1) throw InvalidArgument("alpha must lie in (0, 1)");
  if (table.empty()) throw InvalidArgument("partition table is empty");
  const mpq_class beta = 1 - alpha;
  mpq_class num = 0, den = 0;
  for (const auto& [k, n] : table.counts) {
    const auto [k1, k2] = k;
    mpq_class w(n);
    for (std::size_t j = 0; j < k2; ++j) w *= alpha;
    for (std::size_t j = 0; j < k1 + k2; ++j) w /= beta;
    num += (alpha * mpq_class(k1) + mpq_class(k2)) * w;
    den += w;
  }
  mpq_class q = num / den / mpq_class(table.length);
  q.canonicalize();
  return q;
}

mpq_class q_deterministic(const mpq_class& rho1, const mpq_class& rho110) {
  if (!(2 * rho110 <= rho1 && rho1 <= 1 - rho110) || rho110 < 0)
    throw InfeasibleSector("densities violate 2*rho110 <= rho1 <= 1 - rho110");
  mpq_class a = 2 * rho1 - 1, b = 2 * rho110;
  mpq_class q = a > b ? a : b;
  q.canonicalize();
  return q;
}

LimitReport limit_check(const PartitionTable& table, std::span<const double> alphas) {
  if (table.empty()) throw InvalidArgument("partition table is empty");
  const mpq_class L(table.length);
  LimitReport r;
  r.length = table.length;
  r.m1 = table.m1;
  r.m110 = table.m110;
  r.deterministic = q_deterministic(mpq_class(table.m1) / L, mpq_class(table.m110) / L);

  const std::size_t km = table.kmax();
  r.kmax_attained = table.max_support() == km;
  // At alpha = 1 only the terms with the largest k1 + k2 survive; each has
  // alpha k1 + k2 = k1 + k2.
  const std::size_t top = table.max_support();
  mpz_class weighted = 0, total = 0;
  for (const auto& [k, n] : table.counts)
    if (k.first + k.second == top) {
      weighted += n * static_cast<unsigned long>(top);
      total += n;
    }
  r.dominant_term = mpq_class(table.m1) / L - mpq_class(weighted, total) / L;
  r.dominant_term.canonicalize();

  const double det = r.deterministic.get_d();
  for (double alpha : alphas) {
    const auto p = q_theory(table, alpha);
    r.rows.push_back(LimitRow{alpha, p.q_u, p.q_u - det});
  }
  if (r.rows.size() >= 2) {
    const auto& a = r.rows[r.rows.size() - 2];
    const auto& b = r.rows.back();
    const double ha = 1.0 - a.alpha, hb = 1.0 - b.alpha;
    r.extrapolated = b.q_u - (a.q_u - b.q_u) * hb / (ha - hb);
  } else if (!r.rows.empty()) {
    r.extrapolated = r.rows.back().q_u;
  }
  r.extrapolated_deviation = r.extrapolated - det;
  return r;
}

LimitReport limit_check(std::size_t length, std::size_t m1, std::size_t m110,
                        std::span<const double> alphas) {
  const auto table = partition_sector_dp(length, m1, m110);
  if (table.empty())
    throw InfeasibleSector("sector (L=" + std::to_string(length) + ", m1=" + std::to_string(m1) +
                           ", m110=" + std::to_string(m110) + ") is empty");
  return limit_check(table, alphas);
}

}  // namespace ringflux
