#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ringflux/ring.hpp"

namespace ringflux {

inline constexpr std::size_t kDefaultEnumerationBound = 20;

// All rotation classes with the given length and conserved pair, sorted by
// canonical representative.
struct Sector {
  std::size_t length = 0;
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  std::vector<OrbitClass> classes;

  std::optional<std::size_t> index_of(const RingConfig& canonical) const;
  std::size_t raw_count() const;  // sum of orbit sizes
};

Sector enumerate_sector(std::size_t length, std::size_t m1, std::size_t m110,
                        std::size_t bound = kDefaultEnumerationBound);

// successors[i] lists the class indices reachable from class i in one
// stoch-v step with a probability not identically zero; sorted, self loops kept.
struct TransitionGraph {
  std::vector<std::vector<std::size_t>> successors;
};

TransitionGraph transition_graph(const Sector& sector);

// Closed communicating class of the class-level stoch-v chain.
struct OmegaSet {
  std::size_t id = 0;
  std::size_t length = 0;
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  std::vector<OrbitClass> members;  // sorted

  std::optional<std::size_t> index_of(const RingConfig& canonical) const;
  std::size_t raw_count() const;
};

struct Decomposition {
  std::vector<OmegaSet> recurrent;   // ordered by smallest member
  std::vector<OrbitClass> transient; // members of non-closed components
};

Decomposition recurrent_classes(const Sector& sector);

// Strongly connected components, each sorted; components in reverse
// topological order (sinks first).
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& successors);

}  // namespace ringflux
