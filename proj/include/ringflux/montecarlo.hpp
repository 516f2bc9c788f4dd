#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "ringflux/dynamics.hpp"
#include "ringflux/ring.hpp"

namespace ringflux {

// m110 blocks of length >= 2 plus as many isolated particles as the sector
// admits, block sizes and gap sizes drawn as uniform compositions, block
// order shuffled and the ring rotated at random. Not uniform over the sector.
RingConfig generate_initial(std::size_t length, std::size_t m1, std::size_t m110,
                            std::uint64_t seed);

struct SimulationSpec {
  std::string rule = "stoch-u";
  std::size_t length = 0;
  std::optional<RingConfig> initial;  // otherwise generated from (m1, m110)
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  double alpha = 0.5;  // 0 and 1 select the deterministic specializations
  std::size_t steps = 3000;
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  std::size_t replicates = 32;
  bool keep_series = false;
  // Deterministic runs average over the detected periodic orbit instead of
  // the [burn_in, steps) window.
  bool cycle_average = true;
  std::size_t jobs = 1;

  void validate() const;
  bool deterministic() const;
};

struct FluxEstimate {
  double mean = 0.0;    // time and replicate average of (1/L) sum_j F[j]
  double std_error = 0.0;  // across replicates
  std::vector<double> per_replicate;
  // stoch-v only: average of alpha rho1110 + rho010 before each step.
  std::optional<double> pattern_mean;
  std::optional<double> pattern_std_error;
  std::vector<double> pattern_per_replicate;
  // Deterministic runs with cycle averaging: exact orbit mean shared by all
  // replicates (unset if replicates disagree).
  std::optional<mpq_class> exact;
  std::vector<std::vector<double>> series;  // per replicate, when requested
};

FluxEstimate run_flux(const SimulationSpec& spec);

struct CycleFlux {
  mpq_class mean;  // total hops over one period / (L * period)
  std::size_t transient = 0;
  std::size_t period = 0;
};

// Iterates a rule without stochastic entries until a state repeats.
CycleFlux exact_cycle_flux(const RingConfig& initial, const FluxRule& rule,
                           std::size_t max_steps = 1'000'000);

struct DiagramRow {
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  std::optional<FluxEstimate> estimate;  // unset for empty sectors
  std::string status;                    // "ok" or the reason the point was skipped
};

// All (m1, m110) with 2 m110 <= m1 <= L - m110, m110 ascending then m1.
std::vector<std::pair<std::size_t, std::size_t>> density_grid(std::size_t length);

// One estimate per grid point. Each point derives its seed from
// (template_spec.seed, m1, m110), so rows do not depend on grid order.
std::vector<DiagramRow> sweep_diagram(const SimulationSpec& template_spec,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& grid);

// Fraction of steps spent in each rotation class along one trajectory.
std::map<RingConfig, double> class_occupancy(const RingConfig& initial, const FluxRule& rule,
                                             double alpha, std::size_t steps, std::size_t burn_in,
                                             std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ringflux
