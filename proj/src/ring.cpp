#include "ringflux/ring.hpp"

#include <algorithm>

#include "ringflux/errors.hpp"

namespace ringflux {

RingConfig::RingConfig(std::vector<std::uint8_t> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw InvalidArgument("ring length must be at least 1");
  for (auto s : sites_)
    if (s > 1) throw InvalidArgument("site values must be 0 or 1");
}

RingConfig RingConfig::parse(std::string_view text) {
  std::vector<std::uint8_t> sites;
  sites.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1')
      throw InvalidArgument("configuration must be a string over {0,1}, got '" +
                            std::string(text) + "'");
    sites.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return RingConfig(std::move(sites));
}

RingConfig RingConfig::zeros(std::size_t length) {
  return RingConfig(std::vector<std::uint8_t>(length, 0));
}

RingConfig RingConfig::from_packed(std::uint64_t bits, std::size_t length) {
  if (length == 0 || length > kMaxPackedLength)
    throw InvalidArgument("packed length must be in [1, 64]");
  std::vector<std::uint8_t> sites(length);
  for (std::size_t i = 0; i < length; ++i)
    sites[i] = static_cast<std::uint8_t>((bits >> (length - 1 - i)) & 1u);
  return RingConfig(std::move(sites));
}

std::size_t RingConfig::particles() const noexcept {
  return static_cast<std::size_t>(std::count(sites_.begin(), sites_.end(), 1));
}

std::string RingConfig::to_string() const {
  std::string s(sites_.size(), '0');
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i]) s[i] = '1';
  return s;
}

std::uint64_t RingConfig::packed() const {
  if (sites_.size() > kMaxPackedLength)
    throw InvalidArgument("packed form needs L <= 64");
  std::uint64_t bits = 0;
  for (auto s : sites_) bits = (bits << 1) | s;
  return bits;
}

RingConfig RingConfig::rotated(std::ptrdiff_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(sites_.size());
  std::vector<std::uint8_t> out(sites_.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = (*this)[i + k];
  return RingConfig(std::move(out));
}

namespace {

// Window scan with wrap-around; windows longer than the ring revisit sites.
std::size_t count_windows(const RingConfig& c, std::string_view pattern) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    bool match = true;
    for (std::size_t t = 0; t < pattern.size() && match; ++t)
      match = c[static_cast<std::ptrdiff_t>(i + t)] == pattern[t] - '0';
    count += match;
  }
  return count;
}

}  // namespace

std::size_t count_cyclic(const RingConfig& c, std::string_view pattern) {
  if (pattern.empty() || pattern.size() > c.size())
    throw InvalidArgument("pattern length must be in [1, L]");
  for (char ch : pattern)
    if (ch != '0' && ch != '1') throw InvalidArgument("pattern must be over {0,1}");
  return count_windows(c, pattern);
}

PatternCount count_cyclic_pattern(const RingConfig& c, std::string_view pattern) {
  return PatternCount{std::string(pattern), count_cyclic(c, pattern), c.size()};
}


ConservedPair conserved_pair(const RingConfig& c) {
  return {c.particles(), count_windows(c, "110")};
}

FluxPatterns flux_patterns(const RingConfig& c) {
  return {count_windows(c, "1110"), count_windows(c, "010")};
}

RingConfig canonical_rotation(const RingConfig& c) {
  RingConfig best = c;
  for (std::size_t k = 1; k < c.size(); ++k) {
    auto r = c.rotated(static_cast<std::ptrdiff_t>(k));
    if (r < best) best = std::move(r);
  }
  return best;
}

std::size_t orbit_size(const RingConfig& c) {
  const std::size_t L = c.size();
  for (std::size_t p = 1; p < L; ++p) {
    if (L % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = 0; i < L && periodic; ++i)
      periodic = c[static_cast<std::ptrdiff_t>(i)] == c[static_cast<std::ptrdiff_t>(i + p)];
    if (periodic) return p;
  }
  return L;
}

RingConfig reflect(const RingConfig& c) {
  std::vector<std::uint8_t> out(c.sites().rbegin(), c.sites().rend());
  return RingConfig(std::move(out));
}

OrbitClass OrbitClass::of(const RingConfig& c) {
  return OrbitClass{canonical_rotation(c), ringflux::orbit_size(c)};
}

bool satisfies_density_bounds(std::size_t length, std::size_t m1, std::size_t m110) noexcept {
  return 2 * m110 <= m1 && m1 + m110 <= length;
}

bool sector_nonempty(std::size_t length, std::size_t m1, std::size_t m110) noexcept {
  if (length == 0 || !satisfies_density_bounds(length, m1, m110)) return false;
  if (m110 == 0) return m1 == length || 2 * m1 <= length;
  // Rings of length < 3 have no 110 window at all.
  return length >= 3;
}

namespace packed {

std::uint64_t mask(std::size_t length) noexcept {
  return length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
}

std::uint64_t rotate_left(std::uint64_t bits, std::size_t k, std::size_t length) noexcept {
  k %= length;
  if (k == 0) return bits;
  return ((bits << k) | (bits >> (length - k))) & mask(length);
}

std::size_t count_pattern(std::uint64_t bits, std::size_t length, std::uint64_t pattern,
                          std::size_t pattern_length) noexcept {
  auto site = [&](std::size_t i) { return (bits >> (length - 1 - i % length)) & 1u; };
  std::size_t count = 0;
  for (std::size_t i = 0; i < length; ++i) {
    std::uint64_t w = 0;
    for (std::size_t t = 0; t < pattern_length; ++t) w = (w << 1) | site(i + t);
    count += w == pattern;
  }
  return count;
}

std::uint64_t canonical(std::uint64_t bits, std::size_t length) noexcept {
  std::uint64_t best = bits, r = bits;
  for (std::size_t k = 1; k < length; ++k) {
    r = rotate_left(r, 1, length);
    best = std::min(best, r);
  }
  return best;
}

std::size_t orbit_size(std::uint64_t bits, std::size_t length) noexcept {
  std::uint64_t r = bits;
  for (std::size_t p = 1; p < length; ++p) {
    r = rotate_left(r, 1, length);
    if (r == bits) return p;
  }
  return length;
}

}  // namespace packed

}  // namespace ringflux
