#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ringflux/errors.hpp"
#include "ringflux/markov.hpp"
#include "ringflux/theory.hpp"

using namespace ringflux;

namespace {

using Counts = std::map<std::pair<std::size_t, std::size_t>, mpz_class>;

Counts counts(std::initializer_list<std::pair<std::pair<std::size_t, std::size_t>, long>> init) {
  Counts c;
  for (const auto& [k, v] : init) c[k] = v;
  return c;
}

}  // namespace

TEST_CASE("partition_omega examples") {
  const auto d = recurrent_classes(enumerate_sector(10, 6, 2));
  const auto p1 = partition_omega(d.recurrent[0]);
  const auto p2 = partition_omega(d.recurrent[1]);
  CHECK(p1.scope == PartitionScope::Omega);
  CHECK(p1.counts == counts({{{0, 2}, 10}, {{1, 0}, 20}, {{1, 1}, 40}, {{2, 0}, 10}}));
  CHECK(p2.counts == counts({{{0, 2}, 5}, {{1, 0}, 10}, {{1, 1}, 20}, {{2, 0}, 5}}));
  CHECK(p1.total() == 80);
  CHECK(p2.total() == 40);
  CHECK(p1.kmax() == 2);
  CHECK(p2.max_support() == 2);

  const auto frozen = recurrent_classes(enumerate_sector(9, 6, 3));
  REQUIRE(frozen.recurrent.size() == 1);
  CHECK(partition_omega(frozen.recurrent[0]).counts == counts({{{0, 0}, 3}}));
}

TEST_CASE("kmax") {
  CHECK(kmax(10, 6, 2) == 2);
  CHECK(kmax(7, 7, 0) == 0);
  CHECK(kmax(60, 36, 7) == 22);
  PartitionTable bad;
  bad.length = 10;
  bad.m1 = 3;
  bad.m110 = 2;
  CHECK_THROWS_AS(bad.kmax(), InfeasibleSector);
}

TEST_CASE("sector DP examples") {
  const auto t = partition_sector_dp(10, 6, 2);
  CHECK(t.scope == PartitionScope::Sector);
  CHECK(t.counts == counts({{{0, 2}, 15}, {{1, 0}, 30}, {{1, 1}, 60}, {{2, 0}, 15}}));
  CHECK(t.total() == 120);
  const auto d = recurrent_classes(enumerate_sector(10, 6, 2));
  Counts sum = partition_omega(d.recurrent[0]).counts;
  for (const auto& [k, v] : partition_omega(d.recurrent[1]).counts) sum[k] += v;
  CHECK(t.counts == sum);
  for (std::size_t L : {3, 8, 17, 64, 100})
    CHECK(partition_sector_dp(L, 0, 0).counts == counts({{{0, 0}, 1}}));
  CHECK(partition_sector_dp(10, 3, 2).empty());
  CHECK(partition_sector_dp(10, 7, 0).empty());
  CHECK_THROWS_AS(partition_sector_dp(kMaxDpLength + 1, 10, 2), InvalidArgument);
}

TEST_CASE("DP equals brute force and the block formula; kmax is attained, for L <= 14") {
  for (std::size_t L = 1; L <= 14; ++L) {
    const auto brute = oracle::brute_force_tables(L);
    const auto all = partition_all_sectors_dp(L);
    for (std::size_t m1 = 0; m1 <= L; ++m1)
      for (std::size_t m110 = 0; 2 * m110 <= m1 && m1 + m110 <= L; ++m110) {
        const auto it = brute.find({m1, m110});
        const Counts want = it == brute.end() ? Counts{} : it->second;
        const auto single = partition_sector_dp(L, m1, m110);
        CHECK(single.counts == want);
        const auto a = all.find({m1, m110});
        CHECK((a == all.end() ? Counts{} : a->second.counts) == want);
        if (L >= 3) CHECK(oracle::block_formula(L, m1, m110) == want);
        if (!want.empty()) CHECK(single.max_support() == single.kmax());
      }
  }
}

TEST_CASE("every recurrent set attains kmax for L <= 14") {
  for (std::size_t L = 3; L <= 14; ++L)
    for (std::size_t m1 = 0; m1 <= L; ++m1)
      for (std::size_t m110 = 0; 2 * m110 <= m1 && m1 + m110 <= L; ++m110)
        for (const auto& w : recurrent_classes(enumerate_sector(L, m1, m110)).recurrent) {
          const auto p = partition_omega(w);
          CHECK(p.max_support() == p.kmax());
        }
}

TEST_CASE("q_theory") {
  PartitionTable single;
  single.length = 9;
  single.m1 = 6;
  single.m110 = 3;
  single.counts[{0, 0}] = 3;
  CHECK(q_theory(single, 0.4).q_v == 0.0);
  CHECK(q_theory(single, 0.4).q_u == doctest::Approx(6.0 / 9.0));

  const auto t = partition_sector_dp(10, 6, 2);
  CHECK_THROWS_AS(q_theory(t, 0.0), InvalidArgument);
  CHECK_THROWS_AS(q_theory(t, 1.0), InvalidArgument);
  CHECK_THROWS_AS(q_theory(PartitionTable{}, 0.5), InvalidArgument);

  auto scaled = t;
  for (auto& [k, v] : scaled.counts) v *= 7;
  for (double a : {0.1, 0.5, 0.95}) {
    const auto p = q_theory(t, a);
    CHECK(p.q_v == doctest::Approx(q_theory(scaled, a).q_v).epsilon(1e-15));
    CHECK(p.q_u == doctest::Approx(0.6 - p.q_v).epsilon(1e-15));
    CHECK(p.q_v >= 0.0);
    CHECK(p.q_v <= 1.0);
    CHECK(p.q_v == doctest::Approx(q_theory_exact(t, mpq_class(a)).get_d()).epsilon(1e-13));
  }
  // Large L near alpha = 1 does not overflow.
  const auto wide = partition_sector_dp(100, 60, 10);
  CHECK(wide.counts == oracle::block_formula(100, 60, 10));
  const auto big = q_theory(wide, 0.99999);
  CHECK(std::isfinite(big.q_v));
}

TEST_CASE("q_theory on an Omega equals the stationary flux exactly") {
  const auto d = recurrent_classes(enumerate_sector(10, 6, 2));
  const mpq_class half(1, 2);
  const auto& w = d.recurrent[1];
  const auto pi = stationary_exact(build_matrix(w), half);
  CHECK(q_theory_exact(partition_omega(w), half) == stationary_flux(w, pi, half));
}

TEST_CASE("q_deterministic") {
  CHECK(q_deterministic(mpq_class(6, 10), mpq_class(2, 10)) == mpq_class(2, 5));
  CHECK(q_deterministic(1, 0) == 1);
  CHECK(q_deterministic(mpq_class(1, 2), 0) == 0);
  CHECK_THROWS_AS(q_deterministic(mpq_class(1, 10), mpq_class(1, 5)), InfeasibleSector);
}

TEST_CASE("limit_check") {
  const auto r = limit_check(10, 6, 2, kDefaultLimitAlphas);
  CHECK(r.dominant_term == mpq_class(2, 5));
  CHECK(r.deterministic == mpq_class(2, 5));
  CHECK(r.kmax_attained);
  CHECK(r.rows.size() == kDefaultLimitAlphas.size());

  const auto full = limit_check(8, 8, 0, kDefaultLimitAlphas);
  CHECK(full.deterministic == 1);
  CHECK(full.dominant_term == 1);
  CHECK(full.rows.back().q_u == doctest::Approx(1.0));

  CHECK(partition_sector_dp(60, 36, 7).counts == oracle::block_formula(60, 36, 7));
  const auto l60 = limit_check(60, 36, 7, kDefaultLimitAlphas);
  CHECK(l60.dominant_term == mpq_class(7, 30));
  CHECK(l60.dominant_term == l60.deterministic);
  CHECK(std::abs(l60.rows.back().deviation) < 1e-3);
}

TEST_CASE("sector-wide and Omega-restricted flux agree for L <= 12") {
  double worst = 0.0;
  std::size_t multi = 0;
  for (std::size_t L = 3; L <= 12; ++L)
    for (std::size_t m1 = 1; m1 < L; ++m1)
      for (std::size_t m110 = 0; 2 * m110 <= m1 && m1 + m110 <= L; ++m110) {
        const auto d = recurrent_classes(enumerate_sector(L, m1, m110));
        if (d.recurrent.size() < 2) continue;
        ++multi;
        const auto sector = partition_sector_dp(L, m1, m110);
        for (const auto& w : d.recurrent)
          worst = std::max(worst, std::abs(q_theory(partition_omega(w), 0.7).q_v -
                                           q_theory(sector, 0.7).q_v));
      }
  MESSAGE("sectors with several recurrent sets: " << multi << ", max |dQ| = " << worst);
  CHECK(multi > 0);
  CHECK(worst < 1e-12);
}
