#include "ringflux/ensemble.hpp"

#include <algorithm>
#include <numeric>

#include "ringflux/dynamics.hpp"
#include "ringflux/errors.hpp"

namespace ringflux {

namespace {

template <class Classes>
std::optional<std::size_t> find_class(const Classes& classes, const RingConfig& canonical) {
  const auto it = std::lower_bound(
      classes.begin(), classes.end(), canonical,
      [](const OrbitClass& a, const RingConfig& b) { return a.representative < b; });
  if (it == classes.end() || it->representative != canonical) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

template <class Classes>
std::size_t sum_orbits(const Classes& classes) {
  return std::accumulate(classes.begin(), classes.end(), std::size_t{0},
                         [](std::size_t s, const OrbitClass& c) { return s + c.orbit_size; });
}

// Next integer with the same popcount (Gosper's hack).
std::uint64_t next_combination(std::uint64_t x) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

}  // namespace

std::optional<std::size_t> Sector::index_of(const RingConfig& canonical) const {
  return find_class(classes, canonical);
}

std::size_t Sector::raw_count() const { return sum_orbits(classes); }

std::optional<std::size_t> OmegaSet::index_of(const RingConfig& canonical) const {
  return find_class(members, canonical);
}

std::size_t OmegaSet::raw_count() const { return sum_orbits(members); }

Sector enumerate_sector(std::size_t length, std::size_t m1, std::size_t m110, std::size_t bound) {
  if (length == 0) throw InvalidArgument("L must be positive");
  if (m1 > length) throw InvalidArgument("m1 exceeds L");
  if (length > bound || length > kMaxPackedLength)
    throw InvalidArgument("L = " + std::to_string(length) + " exceeds the enumeration bound " +
                          std::to_string(std::min(bound, kMaxPackedLength)) +
                          "; use the transfer-matrix partition function for large rings");
  Sector sector{length, m1, m110, {}};
  if (!satisfies_density_bounds(length, m1, m110)) return sector;

  const std::uint64_t full = packed::mask(length);
  std::uint64_t x = m1 == 0 ? 0 : packed::mask(m1);
  while (true) {
    if (packed::canonical(x, length) == x &&
        packed::count_pattern(x, length, 0b110, 3) == m110)
      sector.classes.push_back(
          OrbitClass{RingConfig::from_packed(x, length), packed::orbit_size(x, length)});
    if (x == 0 || m1 == length) break;
    const std::uint64_t nx = next_combination(x);
    if (nx > full || nx < x) break;
    x = nx;
  }
  std::sort(sector.classes.begin(), sector.classes.end());
  return sector;
}

TransitionGraph transition_graph(const Sector& sector) {
  const auto rule = FluxRule::stochastic_v();
  TransitionGraph g;
  g.successors.resize(sector.classes.size());
  for (std::size_t i = 0; i < sector.classes.size(); ++i) {
    for (const auto& o : class_outcomes(sector.classes[i].representative, rule)) {
      if (o.probability.identically_zero()) continue;
      const auto j = sector.index_of(o.next);
      if (!j)
        throw InternalContradiction("successor " + o.next.to_string() +
                                    " left the sector; conservation violated");
      g.successors[i].push_back(*j);
    }
    std::sort(g.successors[i].begin(), g.successors[i].end());
  }
  return g;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& successors) {
  // Iterative Tarjan.
  const std::size_t n = successors.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      const auto v = f.node;
      if (f.next_edge < successors[v].size()) {
        const auto w = successors[v][f.next_edge++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
    }
  }
  return components;
}

Decomposition recurrent_classes(const Sector& sector) {
  const auto graph = transition_graph(sector);
  const auto components = strongly_connected_components(graph.successors);
  std::vector<std::size_t> component_of(sector.classes.size());
  for (std::size_t c = 0; c < components.size(); ++c)
    for (auto v : components[c]) component_of[v] = c;

  Decomposition d;
  std::vector<std::vector<std::size_t>> closed;
  std::vector<std::size_t> transient;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool is_closed = true;
    for (auto v : components[c])
      for (auto w : graph.successors[v]) is_closed = is_closed && component_of[w] == c;
    if (is_closed)
      closed.push_back(components[c]);
    else
      transient.insert(transient.end(), components[c].begin(), components[c].end());
  }
  std::sort(closed.begin(), closed.end());
  std::sort(transient.begin(), transient.end());
  for (const auto& comp : closed) {
    OmegaSet omega{d.recurrent.size(), sector.length, sector.m1, sector.m110, {}};
    for (auto v : comp) omega.members.push_back(sector.classes[v]);
    d.recurrent.push_back(std::move(omega));
  }
  for (auto v : transient) d.transient.push_back(sector.classes[v]);
  return d;
}

}  // namespace ringflux
