#include <doctest.h>

#include "reference_data.hpp"
#include "ringflux/errors.hpp"
#include "ringflux/markov.hpp"

using namespace ringflux;

namespace {

const Decomposition& sector_10_6_2() {
  static const Decomposition d = recurrent_classes(enumerate_sector(10, 6, 2));
  return d;
}

}  // namespace

TEST_CASE("matrices equal the published ones") {
  const auto& d = sector_10_6_2();
  const auto m1 = build_matrix(d.recurrent[0]);
  const auto m2 = build_matrix(d.recurrent[1]);
  const auto p1 = reference::matrix1();
  const auto p2 = reference::matrix2();
  REQUIRE(m1.order() == 8);
  REQUIRE(m2.order() == 5);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(equivalent(m1.entries[i][j], p1[i][j]));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(equivalent(m2.entries[i][j], p2[i][j]));
}

TEST_CASE("rows sum to one as polynomials; numeric and exact evaluations agree") {
  for (const auto& w : sector_10_6_2().recurrent) {
    const auto m = build_matrix(w);
    for (const auto& row : m.entries) {
      AlphaPoly s;
      for (const auto& e : row) s += e;
      CHECK(equivalent(s, AlphaPoly::one()));
    }
    const auto num = m.evaluate(0.3);
    const auto ex = m.evaluate(mpq_class(3, 10));
    for (std::size_t i = 0; i < m.order(); ++i)
      for (std::size_t j = 0; j < m.order(); ++j)
        CHECK(num(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              doctest::Approx(ex[i][j].get_d()).epsilon(1e-15));
  }
}

TEST_CASE("stationary vectors match the published eigenvectors") {
  const auto& d = sector_10_6_2();
  const auto m1 = build_matrix(d.recurrent[0]);
  const auto m2 = build_matrix(d.recurrent[1]);
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto s1 = stationary(m1, a);
    const auto s2 = stationary(m2, a);
    CHECK(s1.residual <= kStationaryResidual);
    CHECK(s2.residual <= kStationaryResidual);
    CHECK(reference::max_relative_error(s1.probabilities, reference::normalized(reference::eigen1(a))) < 1e-10);
    CHECK(reference::max_relative_error(s2.probabilities, reference::normalized(reference::eigen2(a))) < 1e-10);
    const auto p = stationary_power(m2, a);
    CHECK(p.method == "power");
    CHECK(reference::max_relative_error(p.probabilities, s2.probabilities) < 1e-8);
  }
}

TEST_CASE("exact stationary vector at rational alpha") {
  const auto& d = sector_10_6_2();
  for (const auto& w : d.recurrent) {
    const auto m = build_matrix(w);
    for (const mpq_class a : {mpq_class(1, 2), mpq_class(1, 3), mpq_class(4, 5)}) {
      CHECK(stationary_exact(m, a) == conjecture_vector_exact(w, a));
    }
  }
}

TEST_CASE("conjecture weights") {
  const auto& d = sector_10_6_2();
  const auto w2 = conjecture_weights(d.recurrent[1]);
  CHECK(w2[4].representative.to_string() == "0101101011");
  CHECK(w2[4].orbit_size == 5);
  CHECK(w2[4].exponents == FluxPatterns{0, 2});
  CHECK(w2[2].orbit_size == 5);
  CHECK(w2[2].exponents == FluxPatterns{2, 0});
  for (double a : {0.3, 0.7}) {
    const auto c1 = conjecture_vector(d.recurrent[0], a);
    const auto c2 = conjecture_vector(d.recurrent[1], a);
    CHECK(reference::max_relative_error(c1, reference::normalized(reference::eigen1(a))) < 1e-12);
    CHECK(reference::max_relative_error(c2, reference::normalized(reference::eigen2(a))) < 1e-12);
  }
  for (const auto& w : conjecture_weights(d.recurrent[0])) CHECK(w.orbit_size == 10);
}

TEST_CASE("verify_conjecture") {
  const auto& d = sector_10_6_2();
  const std::vector<double> half{0.5};
  CHECK(verify_conjecture(d.recurrent[0], half, 1e-8).pass);
  const std::vector<double> several{0.3, 0.7, 0.9};
  const auto r = verify_conjecture(d.recurrent[1], several, 1e-8);
  CHECK(r.pass);
  CHECK(r.checks.size() == 3);
  for (const auto& c : r.checks) CHECK(c.max_relative_error < 1e-8);
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(verify_conjecture(d.recurrent[1], bad), InvalidArgument);
}

TEST_CASE("the (16, 11, 4) set reproduces the 30-component vector") {
  const auto d = recurrent_classes(enumerate_sector(16, 11, 4));
  const OmegaSet* target = nullptr;
  for (const auto& w : d.recurrent)
    if (w.members.size() == 30 && w.members[0].representative.to_string() == reference::omega16[0])
      target = &w;
  REQUIRE(target != nullptr);
  const auto m = build_matrix(*target);
  for (double a : {0.3, 0.5, 0.7}) {
    const auto s = stationary(m, a);
    CHECK(reference::max_relative_error(s.probabilities, reference::normalized(reference::eigen16(a))) < 1e-10);
  }
}

TEST_CASE("single fixed-point class") {
  const auto d = recurrent_classes(enumerate_sector(6, 0, 0));
  const auto m = build_matrix(d.recurrent[0]);
  REQUIRE(m.order() == 1);
  CHECK(m.entries[0][0] == AlphaPoly::one());
  const auto s = stationary(m, 0.4);
  CHECK(s.probabilities == std::vector<double>{1.0});
  CHECK(conjecture_vector(d.recurrent[0], 0.4) == std::vector<double>{1.0});
  CHECK_THROWS_AS(stationary(m, 1.0), InvalidArgument);
}

TEST_CASE("stationary flux equals the expectation of the pattern estimator") {
  const auto& d = sector_10_6_2();
  const auto& w = d.recurrent[1];
  const auto pi = conjecture_vector_exact(w, mpq_class(1, 2));
  mpq_class expected = 0;
  for (std::size_t i = 0; i < w.members.size(); ++i) {
    const auto p = flux_patterns(w.members[i].representative);
    expected += pi[i] * (mpq_class(1, 2) * p.m1110 + p.m010) / 10;
  }
  CHECK(stationary_flux(w, pi, mpq_class(1, 2)) == expected);
  std::vector<double> pd;
  for (const auto& x : pi) pd.push_back(x.get_d());
  CHECK(stationary_flux(w, pd, 0.5) == doctest::Approx(expected.get_d()).epsilon(1e-14));
}
