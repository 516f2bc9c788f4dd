#include <doctest.h>

#include <cmath>

#include "ringflux/errors.hpp"
#include "ringflux/markov.hpp"
#include "ringflux/montecarlo.hpp"
#include "ringflux/theory.hpp"

using namespace ringflux;

TEST_CASE("generate_initial") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK(conserved_pair(generate_initial(10, 6, 2, seed)) == ConservedPair{6, 2});
    CHECK(conserved_pair(generate_initial(60, 36, 7, seed)) == ConservedPair{36, 7});
    CHECK(conserved_pair(generate_initial(60, 25, 0, seed)) == ConservedPair{25, 0});
    const auto c = generate_initial(6, 4, 2, seed);
    CHECK(canonical_rotation(c).to_string() == "011011");
  }
  CHECK(generate_initial(4, 0, 0, 1).to_string() == "0000");
  CHECK(generate_initial(5, 5, 0, 1).to_string() == "11111");
  CHECK(generate_initial(10, 6, 2, 4) == generate_initial(10, 6, 2, 4));
  CHECK_THROWS_AS(generate_initial(10, 3, 2, 1), InfeasibleSector);
  CHECK_THROWS_AS(generate_initial(10, 7, 0, 1), std::invalid_argument);

  // Every feasible sector of a small ring is reachable by the sampler.
  for (std::size_t L = 3; L <= 16; ++L)
    for (std::size_t m1 = 0; m1 <= L; ++m1)
      for (std::size_t m110 = 0; 2 * m110 <= m1 && m1 + m110 <= L; ++m110)
        if (sector_nonempty(L, m1, m110))
          CHECK(conserved_pair(generate_initial(L, m1, m110, L * 31 + m1)) ==
                ConservedPair{m1, m110});
}

TEST_CASE("spec validation") {
  SimulationSpec s;
  s.length = 10;
  s.m1 = 6;
  s.m110 = 2;
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.burn_in = bad.steps;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.rule = "nope";
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.m1 = 8;
  bad.m110 = 0;
  CHECK_THROWS_AS(bad.validate(), InfeasibleSector);
  bad = s;
  bad.initial = RingConfig::parse("0011");
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(s.deterministic() == false);
  s.alpha = 1.0;
  CHECK(s.deterministic());
}

TEST_CASE("deterministic runs reproduce max(2 rho1 - 1, 2 rho110) exactly") {
  for (auto [m1, m110] : {std::pair<std::size_t, std::size_t>{36, 7}, {40, 3}, {20, 9}, {30, 0}}) {
    SimulationSpec s;
    s.rule = "det";
    s.length = 60;
    s.m1 = m1;
    s.m110 = m110;
    s.replicates = 8;
    s.seed = 17;
    const auto e = run_flux(s);
    REQUIRE(e.exact.has_value());
    CHECK(*e.exact == q_deterministic(mpq_class(m1, 60), mpq_class(m110, 60)));
    CHECK(e.std_error < 1e-15);
  }
}

TEST_CASE("empty and full rings") {
  SimulationSpec s;
  s.length = 12;
  s.replicates = 3;
  s.steps = 50;
  s.alpha = 0.4;
  CHECK(run_flux(s).mean == 0.0);
  s.m1 = 12;
  CHECK(run_flux(s).mean == 1.0);
}

TEST_CASE("stoch-u at alpha in {0, 1} equals the deterministic tables site for site") {
  const auto start = generate_initial(40, 24, 5, 3);
  for (bool one : {false, true}) {
    const auto routed = trajectory(start, FluxRule::stochastic_u(), one ? 1.0 : 0.0, 5, 200);
    auto c = start;
    const auto table = FluxRule::stochastic_u().at_certain_alpha(one);
    for (std::size_t n = 1; n < routed.size(); ++n) {
      c = step_deterministic(c, table).next;
      REQUIRE(routed[n] == c);
    }
  }
  auto c = start;
  for (const auto& x : trajectory(start, FluxRule::stochastic_u(), 1.0, 5, 100)) {
    REQUIRE(x == c);
    c = step_deterministic(c);
  }
}

TEST_CASE("reproducibility across seeds and job counts") {
  SimulationSpec s;
  s.length = 30;
  s.m1 = 17;
  s.m110 = 4;
  s.alpha = 0.6;
  s.steps = 400;
  s.replicates = 6;
  s.seed = 123;
  const auto a = run_flux(s);
  s.jobs = 3;
  const auto b = run_flux(s);
  CHECK(a.per_replicate == b.per_replicate);
  CHECK(a.mean == b.mean);
  s.seed = 124;
  CHECK(run_flux(s).per_replicate != a.per_replicate);
  for (double q : a.per_replicate) CHECK((q >= 0.0 && q <= 1.0));
  CHECK(a.std_error >= 0.0);
}

TEST_CASE("stoch-v: realized moves and pattern estimator agree") {
  SimulationSpec s;
  s.rule = "stoch-v";
  s.length = 40;
  s.m1 = 24;
  s.m110 = 5;
  s.alpha = 0.7;
  s.steps = 4000;
  s.burn_in = 500;
  s.replicates = 16;
  s.seed = 77;
  const auto e = run_flux(s);
  REQUIRE(e.pattern_mean.has_value());
  const double combined = std::hypot(e.std_error, *e.pattern_std_error);
  CHECK(std::abs(e.mean - *e.pattern_mean) <= 3.0 * combined + 1e-12);
}

TEST_CASE("keep_series records one value per averaged step") {
  SimulationSpec s;
  s.length = 20;
  s.m1 = 11;
  s.m110 = 3;
  s.steps = 100;
  s.burn_in = 10;
  s.replicates = 2;
  s.keep_series = true;
  const auto e = run_flux(s);
  REQUIRE(e.series.size() == 2);
  CHECK(e.series[0].size() == 90);
  double sum = 0.0;
  for (double x : e.series[1]) sum += x;
  CHECK(sum / 90.0 == doctest::Approx(e.per_replicate[1]).epsilon(1e-12));
}

TEST_CASE("sweep_diagram statuses and per-point seeds") {
  SimulationSpec s;
  s.length = 12;
  s.alpha = 0.7;
  s.steps = 60;
  s.replicates = 2;
  const auto grid = density_grid(12);
  for (auto [m1, m110] : grid) CHECK(satisfies_density_bounds(12, m1, m110));
  auto extended = grid;
  extended.emplace_back(3, 2);
  const auto rows = sweep_diagram(s, extended);
  REQUIRE(rows.size() == extended.size());
  for (const auto& r : rows) {
    if (r.m1 == 3 && r.m110 == 2) {
      CHECK(r.status == "outside-density-bounds");
    } else if (r.m110 == 0 && 2 * r.m1 > 12 && r.m1 < 12) {
      CHECK(r.status == "empty-sector");
      CHECK_FALSE(r.estimate.has_value());
    } else {
      CHECK(r.status == "ok");
      CHECK(r.estimate.has_value());
    }
    if (r.m1 == 12 && r.m110 == 0) CHECK(r.estimate->mean == 1.0);
  }
  std::vector<std::pair<std::size_t, std::size_t>> reversed(grid.rbegin(), grid.rend());
  const auto again = sweep_diagram(s, reversed);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = again[grid.size() - 1 - i];
    if (a.estimate) CHECK(a.estimate->per_replicate == b.estimate->per_replicate);
  }
}

TEST_CASE("long-run class occupancy follows the stationary law") {
  const auto d = recurrent_classes(enumerate_sector(10, 6, 2));
  for (const auto& w : d.recurrent) {
    const double alpha = 0.6;
    const auto pi = stationary(build_matrix(w), alpha);
    const auto occ = class_occupancy(w.members[0].representative, FluxRule::stochastic_v(), alpha,
                                     1'000'000, 1000, 2024);
    double tv = 0.0;
    for (std::size_t i = 0; i < w.members.size(); ++i) {
      const auto it = occ.find(w.members[i].representative);
      tv += std::abs((it == occ.end() ? 0.0 : it->second) - pi.probabilities[i]);
    }
    CHECK(occ.size() == w.members.size());
    CHECK(tv / 2.0 <= 0.02);
  }
}

TEST_CASE("exact_cycle_flux") {
  const auto c = exact_cycle_flux(RingConfig::parse("0011001111"), FluxRule::deterministic());
  CHECK(c.mean == mpq_class(2, 5));
  CHECK(c.period >= 1);
  CHECK_THROWS_AS(exact_cycle_flux(RingConfig::parse("0011"), FluxRule::stochastic_v()),
                  InvalidArgument);
}
