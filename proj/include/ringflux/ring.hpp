#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ringflux {

// Cyclic binary occupation string. Site indices are taken modulo size()
// everywhere; text form is one character per site, site 0 leftmost.
class RingConfig {
 public:
  explicit RingConfig(std::vector<std::uint8_t> sites);

  static RingConfig parse(std::string_view text);
  static RingConfig zeros(std::size_t length);
  // Bit (L-1-i) of `bits` holds site i, so integer order equals string order.
  static RingConfig from_packed(std::uint64_t bits, std::size_t length);

  std::size_t size() const noexcept { return sites_.size(); }
  std::uint8_t operator[](std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(sites_.size());
    return sites_[static_cast<std::size_t>(((i % n) + n) % n)];
  }
  std::span<const std::uint8_t> sites() const noexcept { return sites_; }

  std::size_t particles() const noexcept;
  std::string to_string() const;
  std::uint64_t packed() const;  // requires size() <= 64

  // Site i of the result is site i+k of this ring.
  RingConfig rotated(std::ptrdiff_t k) const;

  auto operator<=>(const RingConfig&) const = default;
  bool operator==(const RingConfig&) const = default;

 private:
  std::vector<std::uint8_t> sites_;
};

inline constexpr std::size_t kMaxPackedLength = 64;

struct PatternCount {
  std::string pattern;
  std::size_t count = 0;
  std::size_t length = 0;  // ring length L

  mpq_class density() const {
    mpq_class d(count, length);
    d.canonicalize();
    return d;
  }
};

PatternCount count_cyclic_pattern(const RingConfig& c, std::string_view pattern);
std::size_t count_cyclic(const RingConfig& c, std::string_view pattern);

struct ConservedPair {
  std::size_t m1 = 0;
  std::size_t m110 = 0;
  bool operator==(const ConservedPair&) const = default;
};

ConservedPair conserved_pair(const RingConfig& c);

// Exponents of the stationary weight: m1110 and m010.
struct FluxPatterns {
  std::size_t m1110 = 0;
  std::size_t m010 = 0;
  bool operator==(const FluxPatterns&) const = default;
};

FluxPatterns flux_patterns(const RingConfig& c);

RingConfig canonical_rotation(const RingConfig& c);
std::size_t orbit_size(const RingConfig& c);
RingConfig reflect(const RingConfig& c);

// Rotation class: lexicographically least rotation plus its orbit size.
struct OrbitClass {
  RingConfig representative;
  std::size_t orbit_size;

  static OrbitClass of(const RingConfig& c);
  auto operator<=>(const OrbitClass& o) const { return representative <=> o.representative; }
  bool operator==(const OrbitClass& o) const { return representative == o.representative; }
};

// A sector (L, m1, m110) can only be nonempty when 2*m110 <= m1 <= L - m110.
bool satisfies_density_bounds(std::size_t length, std::size_t m1, std::size_t m110) noexcept;
// Exact emptiness test. Beyond the density bounds, m110 = 0 with L/2 < m1 < L
// is empty: every block would be an isolated particle needing its own zero.
bool sector_nonempty(std::size_t length, std::size_t m1, std::size_t m110) noexcept;

// Packed helpers for L <= 64 (bit convention as in RingConfig::from_packed).
namespace packed {

std::uint64_t mask(std::size_t length) noexcept;
std::uint64_t rotate_left(std::uint64_t bits, std::size_t k, std::size_t length) noexcept;
std::size_t count_pattern(std::uint64_t bits, std::size_t length, std::uint64_t pattern,
                          std::size_t pattern_length) noexcept;
std::uint64_t canonical(std::uint64_t bits, std::size_t length) noexcept;
std::size_t orbit_size(std::uint64_t bits, std::size_t length) noexcept;

}  // namespace packed

}  // namespace ringflux
