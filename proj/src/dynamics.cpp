#include "ringflux/dynamics.hpp"

#include <algorithm>
#include <map>

#include "ringflux/errors.hpp"

namespace ringflux {

namespace {

constexpr std::size_t window_index(const char* w) {
  std::size_t v = 0;
  for (int t = 0; t < 4; ++t) v = (v << 1) | static_cast<std::size_t>(w[t] - '0');
  return v;
}

std::array<FluxSymbol, 16> zero_table() {
  std::array<FluxSymbol, 16> t{};
  t.fill(FluxSymbol::Zero);
  return t;
}

std::array<FluxSymbol, 16> table_one() {
  auto t = zero_table();
  for (const char* w : {"1111", "1110", "1101", "1100", "0110"}) t[window_index(w)] = FluxSymbol::One;
  return t;
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Flux array for one step. alpha_branch(j) is consulted once per stochastic
// window, and the single value is what both update terms read.
template <class Branch>
StepResult apply_rule(const RingConfig& c, const FluxRule& rule, Branch&& alpha_branch) {
  const auto L = static_cast<std::ptrdiff_t>(c.size());
  std::vector<std::uint8_t> flux(c.size());
  std::size_t moves = 0;
  for (std::ptrdiff_t j = 0; j < L; ++j) {
    std::uint8_t f = 0;
    switch (rule.symbol_at(c, j)) {
      case FluxSymbol::Zero: f = 0; break;
      case FluxSymbol::One: f = 1; break;
      case FluxSymbol::A: f = alpha_branch(static_cast<std::size_t>(j)) ? 0 : 1; break;
      case FluxSymbol::B: f = alpha_branch(static_cast<std::size_t>(j)) ? 1 : 0; break;
    }
    flux[static_cast<std::size_t>(j)] = f;
    moves += f;
  }
  std::vector<std::uint8_t> next(c.size());
  for (std::ptrdiff_t j = 0; j < L; ++j) {
    const int v = c[j] + flux[static_cast<std::size_t>(j)] -
                  flux[static_cast<std::size_t>((j + 1) % L)];
    if (v < 0 || v > 1)
      throw InternalContradiction("rule " + rule.name + " produced site value " +
                                  std::to_string(v) + " from " + c.to_string());
    next[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(v);
  }
  return StepResult{RingConfig(std::move(next)), moves};
}

}  // namespace

FluxRule FluxRule::deterministic() { return FluxRule{"det", Stencil::U, table_one()}; }

FluxRule FluxRule::stochastic_u() {
  auto t = table_one();
  t[window_index("0111")] = FluxSymbol::A;
  return FluxRule{"stoch-u", Stencil::U, t};
}

FluxRule FluxRule::stochastic_v() {
  auto t = zero_table();
  t[window_index("1110")] = FluxSymbol::B;
  t[window_index("1010")] = FluxSymbol::One;
  t[window_index("0010")] = FluxSymbol::One;
  return FluxRule{"stoch-v", Stencil::V, t};
}

FluxRule FluxRule::by_name(std::string_view name) {
  if (name == "det") return deterministic();
  if (name == "stoch-u") return stochastic_u();
  if (name == "stoch-v") return stochastic_v();
  throw InvalidArgument("unknown rule '" + std::string(name) + "' (expected det|stoch-u|stoch-v)");
}

bool FluxRule::is_stochastic() const noexcept {
  return std::any_of(table.begin(), table.end(),
                     [](FluxSymbol s) { return s == FluxSymbol::A || s == FluxSymbol::B; });
}

FluxRule FluxRule::at_certain_alpha(bool alpha_is_one) const {
  FluxRule r = *this;
  r.name = name + (alpha_is_one ? "@alpha=1" : "@alpha=0");
  for (auto& s : r.table) {
    if (s == FluxSymbol::A) s = alpha_is_one ? FluxSymbol::Zero : FluxSymbol::One;
    if (s == FluxSymbol::B) s = alpha_is_one ? FluxSymbol::One : FluxSymbol::Zero;
  }
  return r;
}

FluxSymbol FluxRule::symbol_at(const RingConfig& c, std::ptrdiff_t j) const noexcept {
  const std::ptrdiff_t s = j - window_offset();
  const std::size_t w = (std::size_t{c[s]} << 3) | (std::size_t{c[s + 1]} << 2) |
                        (std::size_t{c[s + 2]} << 1) | std::size_t{c[s + 3]};
  return table[w];
}

std::uint64_t CounterRng::bits(std::uint64_t step, std::uint64_t window) const noexcept {
  return splitmix(seed_ ^ splitmix(step ^ splitmix(window + 0x632be59bd9b4e019ULL)));
}

double CounterRng::uniform(std::uint64_t step, std::uint64_t window) const noexcept {
  return static_cast<double>(bits(step, window) >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> stochastic_windows(const RingConfig& c, const FluxRule& rule) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const auto s = rule.symbol_at(c, static_cast<std::ptrdiff_t>(j));
    if (s == FluxSymbol::A || s == FluxSymbol::B) out.push_back(j);
  }
  return out;
}

StepResult step_with_draws(const RingConfig& c, const FluxRule& rule,
                           const std::vector<bool>& draws) {
  const auto windows = stochastic_windows(c, rule);
  if (windows.size() != draws.size())
    throw InvalidArgument("expected " + std::to_string(windows.size()) + " draws, got " +
                          std::to_string(draws.size()));
  return apply_rule(c, rule, [&](std::size_t j) {
    const auto it = std::lower_bound(windows.begin(), windows.end(), j);
    return static_cast<bool>(draws[static_cast<std::size_t>(it - windows.begin())]);
  });
}

StepResult step_deterministic(const RingConfig& c, const FluxRule& rule) {
  if (rule.is_stochastic())
    throw InvalidArgument("rule " + rule.name + " has stochastic entries; specialize it first");
  return apply_rule(c, rule, [](std::size_t) { return false; });
}

RingConfig step_deterministic(const RingConfig& c) {
  return step_deterministic(c, FluxRule::deterministic()).next;
}

StepResult step_stochastic(const RingConfig& c, const FluxRule& rule, double alpha,
                           const CounterRng& rng, std::uint64_t step) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("stochastic step needs alpha in (0, 1), got " + std::to_string(alpha));
  return apply_rule(c, rule, [&](std::size_t j) { return rng.uniform(step, j) < alpha; });
}

StepResult advance(const RingConfig& c, const FluxRule& rule, double alpha, const CounterRng& rng,
                   std::uint64_t step) {
  if (!rule.is_stochastic()) return step_deterministic(c, rule);
  if (alpha == 1.0 || alpha == 0.0) return step_deterministic(c, rule.at_certain_alpha(alpha == 1.0));
  return step_stochastic(c, rule, alpha, rng, step);
}

std::vector<StepOutcome> branch_outcomes(const RingConfig& c, const FluxRule& rule) {
  const auto windows = stochastic_windows(c, rule);
  const std::size_t s = windows.size();
  if (s > kMaxBranchWindows)
    throw InvalidArgument("configuration has " + std::to_string(s) +
                          " stochastic windows; branch enumeration is limited to " +
                          std::to_string(kMaxBranchWindows));
  std::map<RingConfig, AlphaPoly> merged;
  std::vector<bool> draws(s);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
    int taken = 0;
    for (std::size_t t = 0; t < s; ++t) {
      draws[t] = (mask >> t) & 1u;
      taken += draws[t];
    }
    auto r = step_with_draws(c, rule, draws);
    merged[std::move(r.next)] += AlphaPoly::term(1, taken, static_cast<int>(s) - taken);
  }
  std::vector<StepOutcome> out;
  out.reserve(merged.size());
  for (auto& [next, p] : merged) out.push_back(StepOutcome{next, std::move(p)});
  return out;
}

std::vector<StepOutcome> class_outcomes(const RingConfig& c, const FluxRule& rule) {
  std::map<RingConfig, AlphaPoly> merged;
  for (auto& o : branch_outcomes(c, rule)) merged[canonical_rotation(o.next)] += o.probability;
  std::vector<StepOutcome> out;
  out.reserve(merged.size());
  for (auto& [next, p] : merged) out.push_back(StepOutcome{next, std::move(p)});
  return out;
}

ExpectedFlux expected_flux(const RingConfig& c, const FluxRule& rule) {
  ExpectedFlux e{AlphaPoly{}, c.size()};
  for (std::size_t j = 0; j < c.size(); ++j) {
    switch (rule.symbol_at(c, static_cast<std::ptrdiff_t>(j))) {
      case FluxSymbol::Zero: break;
      case FluxSymbol::One: e.moves += AlphaPoly::one(); break;
      case FluxSymbol::A: e.moves += AlphaPoly::term(1, 0, 1); break;
      case FluxSymbol::B: e.moves += AlphaPoly::term(1, 1, 0); break;
    }
  }
  return e;
}

std::vector<RingConfig> trajectory(const RingConfig& initial, const FluxRule& rule, double alpha,
                                   std::uint64_t seed, std::size_t steps) {
  const CounterRng rng(seed);
  std::vector<RingConfig> out{initial};
  out.reserve(steps + 1);
  for (std::size_t n = 0; n < steps; ++n) out.push_back(advance(out.back(), rule, alpha, rng, n).next);
  return out;
}

}  // namespace ringflux
