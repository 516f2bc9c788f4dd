#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ringflux/alpha_poly.hpp"
#include "ringflux/ring.hpp"

namespace ringflux {

// Entry of a flux rule table. A is 0 with probability alpha (else 1);
// B is 1 with probability alpha (else 0).
enum class FluxSymbol : std::uint8_t { Zero, One, A, B };

// Which four sites feed the flux F[j] carried from site j-1 into site j.
//   U: (j-2, j-1, j, j+1)     V: (j-3, j-2, j-1, j)
// Every rule updates x_j <- x_j + F[j] - F[j+1].
enum class Stencil : std::uint8_t { U, V };

struct FluxRule {
  std::string name;
  Stencil stencil;
  std::array<FluxSymbol, 16> table;  // index = window bits wxyz, w most significant

  static FluxRule deterministic();  // "det"
  static FluxRule stochastic_u();   // "stoch-u"
  static FluxRule stochastic_v();   // "stoch-v"
  static FluxRule by_name(std::string_view name);

  bool is_stochastic() const noexcept;
  // Replace A/B by the values they take with certainty at alpha = 1 or alpha = 0.
  FluxRule at_certain_alpha(bool alpha_is_one) const;
  std::ptrdiff_t window_offset() const noexcept { return stencil == Stencil::U ? 2 : 3; }
  FluxSymbol symbol_at(const RingConfig& c, std::ptrdiff_t j) const noexcept;
};

// Counter-based uniform stream: the value for (seed, step, window) does not
// depend on any other draw, so trajectories are reproducible window by window.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}
  std::uint64_t bits(std::uint64_t step, std::uint64_t window) const noexcept;
  double uniform(std::uint64_t step, std::uint64_t window) const noexcept;  // [0, 1)
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

struct StepResult {
  RingConfig next;
  std::size_t moves = 0;  // sum_j F[j]: particles that hopped this step
};

// Windows of c whose table entry is A or B, in increasing site order.
std::vector<std::size_t> stochastic_windows(const RingConfig& c, const FluxRule& rule);

// Update with the given draw per stochastic window: draws[t] == true means the
// probability-alpha branch was taken at stochastic_windows(c, rule)[t].
StepResult step_with_draws(const RingConfig& c, const FluxRule& rule,
                           const std::vector<bool>& draws);

RingConfig step_deterministic(const RingConfig& c);
StepResult step_deterministic(const RingConfig& c, const FluxRule& rule);

// One draw per stochastic window per step; alpha must lie in (0, 1).
StepResult step_stochastic(const RingConfig& c, const FluxRule& rule, double alpha,
                           const CounterRng& rng, std::uint64_t step);

// Routes alpha in {0, 1} and rules without stochastic entries to the
// deterministic tables; everything else to step_stochastic.
StepResult advance(const RingConfig& c, const FluxRule& rule, double alpha,
                   const CounterRng& rng, std::uint64_t step);

struct StepOutcome {
  RingConfig next;
  AlphaPoly probability;
};

// All successors of c with exact probabilities, merged by successor string
// and sorted. Rejects more than kMaxBranchWindows stochastic windows.
inline constexpr std::size_t kMaxBranchWindows = 24;
std::vector<StepOutcome> branch_outcomes(const RingConfig& c, const FluxRule& rule);
// Same, with successors replaced by their canonical rotations before merging.
std::vector<StepOutcome> class_outcomes(const RingConfig& c, const FluxRule& rule);

// Expected number of hops in one step, as a polynomial in alpha; the mean
// flux is moves / length.
struct ExpectedFlux {
  AlphaPoly moves;
  std::size_t length;

  double evaluate(double alpha) const { return moves.evaluate(alpha) / static_cast<double>(length); }
  mpq_class evaluate(const mpq_class& alpha) const {
    return moves.evaluate(alpha) / mpq_class(length);
  }
};

ExpectedFlux expected_flux(const RingConfig& c, const FluxRule& rule);

std::vector<RingConfig> trajectory(const RingConfig& initial, const FluxRule& rule, double alpha,
                                   std::uint64_t seed, std::size_t steps);

}  // namespace ringflux
