#include "ringflux/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "ringflux/errors.hpp"
#include "ringflux/parallel.hpp"

namespace ringflux {

namespace {

#ifdef NDEBUG
constexpr std::size_t kConservationStride = 97;
#else
constexpr std::size_t kConservationStride = 1;
#endif

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform composition of `total` into `parts` nonnegative summands.
std::vector<std::size_t> random_composition(std::size_t total, std::size_t parts,
                                            std::mt19937_64& rng) {
  if (parts == 0) return {};
  std::vector<std::uint8_t> slots(total + parts - 1, 0);
  std::fill(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(parts - 1), 1);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<std::size_t> out(parts, 0);
  std::size_t part = 0;
  for (auto s : slots) {
    if (s)
      ++part;
    else
      ++out[part];
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void check_conservation(const RingConfig& c, const ConservedPair& expected) {
  if (conserved_pair(c) != expected)
    throw InternalContradiction("conserved pair changed along trajectory at " + c.to_string());
}

struct ReplicateResult {
  double flux = 0.0;
  double pattern = 0.0;
  std::optional<mpq_class> exact;
  std::vector<double> series;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix(seed ^ mix(a ^ mix(b + 0x2545f4914f6cdd1dULL)));
}

RingConfig generate_initial(std::size_t length, std::size_t m1, std::size_t m110,
                            std::uint64_t seed) {
  if (!sector_nonempty(length, m1, m110))
    throw InfeasibleSector("no configuration with L=" + std::to_string(length) +
                           ", m1=" + std::to_string(m1) + ", m110=" + std::to_string(m110));
  if (m1 == 0) return RingConfig::zeros(length);
  if (m1 == length) return RingConfig(std::vector<std::uint8_t>(length, 1));

  std::mt19937_64 rng(seed);
  const std::size_t singles =
      m110 == 0 ? m1 : std::min(length - m1 - m110, m1 - 2 * m110);
  std::vector<std::size_t> blocks(singles, 1);
  const auto extra = random_composition(m1 - singles - 2 * m110, m110, rng);
  for (std::size_t b = 0; b < m110; ++b) blocks.push_back(2 + extra[b]);
  std::shuffle(blocks.begin(), blocks.end(), rng);

  const std::size_t n_blocks = blocks.size();
  auto gaps = random_composition(length - m1 - n_blocks, n_blocks, rng);
  std::vector<std::uint8_t> sites;
  sites.reserve(length);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    sites.insert(sites.end(), blocks[b], 1);
    sites.insert(sites.end(), gaps[b] + 1, 0);
  }
  std::uniform_int_distribution<std::size_t> offset(0, length - 1);
  return RingConfig(std::move(sites)).rotated(static_cast<std::ptrdiff_t>(offset(rng)));
}

void SimulationSpec::validate() const {
  FluxRule::by_name(rule);
  if (length == 0) throw InvalidArgument("L must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (steps == 0) throw InvalidArgument("steps must be positive");
  if (burn_in >= steps) throw InvalidArgument("burn-in must be smaller than the step count");
  if (replicates == 0) throw InvalidArgument("replicates must be positive");
  if (initial) {
    if (initial->size() != length)
      throw InvalidArgument("initial configuration length " + std::to_string(initial->size()) +
                            " does not match L = " + std::to_string(length));
  } else if (!sector_nonempty(length, m1, m110)) {
    throw InfeasibleSector("no configuration with L=" + std::to_string(length) +
                           ", m1=" + std::to_string(m1) + ", m110=" + std::to_string(m110));
  }
}

bool SimulationSpec::deterministic() const {
  return !FluxRule::by_name(rule).is_stochastic() || alpha == 0.0 || alpha == 1.0;
}

CycleFlux exact_cycle_flux(const RingConfig& initial, const FluxRule& rule, std::size_t max_steps) {
  if (rule.is_stochastic()) throw InvalidArgument("cycle detection needs a deterministic rule");
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::size_t> moves;
  RingConfig c = initial;
  for (std::size_t n = 0; n <= max_steps; ++n) {
    auto [it, fresh] = seen.emplace(c.to_string(), n);
    if (!fresh) {
      const std::size_t start = it->second;
      std::size_t hops = 0;
      for (std::size_t t = start; t < n; ++t) hops += moves[t];
      CycleFlux out{mpq_class(hops, c.size() * (n - start)), start, n - start};
      out.mean.canonicalize();
      return out;
    }
    auto r = step_deterministic(c, rule);
    moves.push_back(r.moves);
    c = std::move(r.next);
  }
  throw NumericalFailure("no periodic orbit within " + std::to_string(max_steps) + " steps", 0.0);
}

FluxEstimate run_flux(const SimulationSpec& spec) {
  spec.validate();
  const FluxRule base = FluxRule::by_name(spec.rule);
  const bool det = spec.deterministic();
  const FluxRule rule =
      det && base.is_stochastic() ? base.at_certain_alpha(spec.alpha == 1.0) : base;
  const bool pattern_estimator = spec.rule == "stoch-v";
  const double L = static_cast<double>(spec.length);

  std::vector<ReplicateResult> results(spec.replicates);
  parallel_for(spec.replicates, spec.jobs, [&](std::size_t r) {
    RingConfig c = spec.initial ? *spec.initial
                                : generate_initial(spec.length, spec.m1, spec.m110,
                                                   derive_seed(spec.seed, r, 1));
    const ConservedPair invariant = conserved_pair(c);
    ReplicateResult& out = results[r];
    if (det && spec.cycle_average) {
      auto cyc = exact_cycle_flux(c, rule);
      out.flux = cyc.mean.get_d();
      out.exact = std::move(cyc.mean);
      return;
    }
    const CounterRng rng(derive_seed(spec.seed, r, 2));
    double flux_sum = 0.0, pattern_sum = 0.0;
    for (std::size_t n = 0; n < spec.steps; ++n) {
      if (pattern_estimator && n >= spec.burn_in) {
        const auto p = flux_patterns(c);
        pattern_sum += (spec.alpha * static_cast<double>(p.m1110) + static_cast<double>(p.m010)) / L;
      }
      auto step = advance(c, rule, spec.alpha, rng, n);
      c = std::move(step.next);
      if (n % kConservationStride == 0 || n + 1 == spec.steps) check_conservation(c, invariant);
      if (n < spec.burn_in) continue;
      const double f = static_cast<double>(step.moves) / L;
      flux_sum += f;
      if (spec.keep_series) out.series.push_back(f);
    }
    const double window = static_cast<double>(spec.steps - spec.burn_in);
    out.flux = flux_sum / window;
    out.pattern = pattern_sum / window;
  });

  FluxEstimate est;
  std::vector<double> patterns;
  for (auto& r : results) {
    est.per_replicate.push_back(r.flux);
    patterns.push_back(r.pattern);
    if (spec.keep_series) est.series.push_back(std::move(r.series));
  }
  est.mean = mean_of(est.per_replicate);
  est.std_error = std_error_of(est.per_replicate);
  if (pattern_estimator && !(det && spec.cycle_average)) {
    est.pattern_per_replicate = patterns;
    est.pattern_mean = mean_of(patterns);
    est.pattern_std_error = std_error_of(patterns);
  }
  if (det && spec.cycle_average) {
    est.exact = results.front().exact;
    for (const auto& r : results)
      if (r.exact != est.exact) est.exact.reset();
  }
  return est;
}

std::vector<std::pair<std::size_t, std::size_t>> density_grid(std::size_t length) {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t m110 = 0; 3 * m110 <= length; ++m110)
    for (std::size_t m1 = 2 * m110; m1 + m110 <= length; ++m1) grid.emplace_back(m1, m110);
  return grid;
}

std::vector<DiagramRow> sweep_diagram(const SimulationSpec& template_spec,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& grid) {
  std::vector<DiagramRow> rows(grid.size());
  const std::size_t jobs = template_spec.jobs;
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const auto [m1, m110] = grid[i];
    DiagramRow& row = rows[i];
    row.m1 = m1;
    row.m110 = m110;
    if (!satisfies_density_bounds(template_spec.length, m1, m110)) {
      row.status = "outside-density-bounds";
      return;
    }
    if (!sector_nonempty(template_spec.length, m1, m110)) {
      row.status = "empty-sector";
      return;
    }
    SimulationSpec spec = template_spec;
    spec.initial.reset();
    spec.m1 = m1;
    spec.m110 = m110;
    spec.seed = derive_seed(template_spec.seed, m1, m110);
    spec.jobs = 1;
    row.estimate = run_flux(spec);
    row.status = "ok";
  });
  return rows;
}

std::map<RingConfig, double> class_occupancy(const RingConfig& initial, const FluxRule& rule,
                                             double alpha, std::size_t steps, std::size_t burn_in,
                                             std::uint64_t seed) {
  if (burn_in >= steps) throw InvalidArgument("burn-in must be smaller than the step count");
  const CounterRng rng(seed);
  std::map<RingConfig, double> counts;
  RingConfig c = initial;
  for (std::size_t n = 0; n < steps; ++n) {
    c = advance(c, rule, alpha, rng, n).next;
    if (n >= burn_in) counts[canonical_rotation(c)] += 1.0;
  }
  const double total = static_cast<double>(steps - burn_in);
  for (auto& [k, v] : counts) v /= total;
  return counts;
}

}  // namespace ringflux
