#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "ringflux/alpha_poly.hpp"
#include "ringflux/ensemble.hpp"

namespace ringflux {

// Class-level stoch-v transition probabilities over one recurrent set.
// Row i holds the outcomes of omega.members[i]; rows sum to 1 as polynomials.
struct TransitionMatrix {
  OmegaSet omega;
  std::vector<std::vector<AlphaPoly>> entries;

  std::size_t order() const noexcept { return entries.size(); }
  Eigen::MatrixXd evaluate(double alpha) const;
  std::vector<std::vector<mpq_class>> evaluate(const mpq_class& alpha) const;
};

TransitionMatrix build_matrix(const OmegaSet& omega);

inline constexpr double kStationaryResidual = 1e-12;
inline constexpr double kNegativeSlack = 1e-14;

struct StationaryDistribution {
  double alpha = 0.0;
  std::vector<double> probabilities;  // aligned with omega.members
  double residual = 0.0;              // max_j |(pi P)_j - pi_j|
  std::string method;                 // "direct" or "power"
};

// Dense solve of (P^T - I) pi = 0 with a normalization row; falls back to
// power iteration on the lazy chain (P + I) / 2 if the solve is not clean.
StationaryDistribution stationary(const TransitionMatrix& m, double alpha);
StationaryDistribution stationary_power(const TransitionMatrix& m, double alpha,
                                        std::size_t max_iterations = 2'000'000);
// Exact left null vector at rational alpha, normalized to sum 1.
std::vector<mpq_class> stationary_exact(const TransitionMatrix& m, const mpq_class& alpha);

// Stationary weight of a rotation class under the pattern-count law:
// orbit_size * alpha^m010 / (1 - alpha)^(m1110 + m010). The orbit size turns
// the per-configuration weight into a per-class weight.
struct ConjectureWeight {
  RingConfig representative;
  std::size_t orbit_size;
  FluxPatterns exponents;

  double evaluate(double alpha) const;
  mpq_class evaluate(const mpq_class& alpha) const;
};

std::vector<ConjectureWeight> conjecture_weights(const OmegaSet& omega);
std::vector<double> conjecture_vector(const OmegaSet& omega, double alpha);
std::vector<mpq_class> conjecture_vector_exact(const OmegaSet& omega, const mpq_class& alpha);

inline constexpr double kConjectureTolerance = 1e-8;

struct ConjectureCheck {
  double alpha = 0.0;
  double max_relative_error = 0.0;  // max_i |pi_i - w_i| / w_i
  double residual = 0.0;
  bool pass = false;
};

struct ConjectureReport {
  OmegaSet omega;
  double tolerance = kConjectureTolerance;
  std::vector<ConjectureCheck> checks;
  bool pass = true;
};

ConjectureReport verify_conjecture(const OmegaSet& omega, std::span<const double> alphas,
                                   double tolerance = kConjectureTolerance);

// sum_x pi(x) (alpha rho1110(x) + rho010(x)): the v-side mean flux under pi.
double stationary_flux(const OmegaSet& omega, std::span<const double> pi, double alpha);
mpq_class stationary_flux(const OmegaSet& omega, std::span<const mpq_class> pi,
                          const mpq_class& alpha);

}  // namespace ringflux
