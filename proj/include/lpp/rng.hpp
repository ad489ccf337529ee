#pragma once

#include <cmath>
#include <cstdint>

namespace lpp {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent key from a parent key and up to two indices.
/// Used for per-sample and per-cell streams.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t a,
                                   std::uint64_t b = 0) noexcept {
  return mix64(mix64(key ^ 0x6A09E667F3BCC909ULL) ^ mix64(a + 0x3C6EF372FE94F82BULL) ^
               mix64(mix64(b) + 0xA54FF53A5F1D36F1ULL));
}

/// Maps 64 random bits to a double uniform on the open interval (0,1).
/// 52 bits keep the largest value at 1 - 2^-53, which is representable.
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Counter-based generator: the n-th output is a pure function of (key, n),
/// so streams can be split and replayed without shared state.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive_key(seed, stream, 0x5EED)) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ ^ mix64(counter_++)); }
  constexpr double uniform() noexcept { return bits_to_open_unit(next()); }
  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  constexpr CounterRng split(std::uint64_t sub) const noexcept {
    CounterRng out(0);
    out.key_ = derive_key(key_, sub, counter_);
    return out;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform on (0,1) attached to lattice cell (i,j) of the environment keyed by `key`.
/// Cells are addressed directly, so enlarging a grid never changes existing cells.
constexpr double cell_uniform(std::uint64_t key, std::uint64_t i, std::uint64_t j) noexcept {
  return bits_to_open_unit(mix64(mix64(key) ^ mix64((i << 32) ^ j)));
}

/// P[w = k] = (1-q) q^k, k >= 0, by inversion.
inline double geometric_from_uniform(double u, double log_q) noexcept {
  return std::floor(std::log(u) / log_q);
}

/// Rate-one exponential by inversion.
inline double exponential_from_uniform(double u) noexcept { return -std::log(u); }

}  // namespace lpp
