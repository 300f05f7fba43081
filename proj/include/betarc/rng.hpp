#pragma once

// Counter-based random streams.
//
// Every stream is addressed by a 64-bit key; the i-th output is a pure
// function of (key, i). Streams for Monte Carlo replicates are derived by
// hash-mixing (master seed, cell, replicate) into a key, so results do not
// depend on the order in which replicates are executed.

#include <cmath>
#include <cstdint>
#include <limits>

namespace betarc {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (a bijection on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Satisfies UniformRandomBitGenerator. Output i is mix(key ^ mix(i * golden)).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0) noexcept
      : key_(detail::mix64(key + detail::kGolden)), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ ^ detail::mix64(counter_ * detail::kGolden));
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

  friend constexpr bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Key for replicate `replicate` of cell `cell` under `master`.
constexpr std::uint64_t derive_stream_key(std::uint64_t master, std::uint64_t cell,
                                          std::uint64_t replicate) noexcept {
  std::uint64_t h = detail::mix64(master ^ 0x6a09e667f3bcc909ULL);
  h = detail::mix64(h ^ (cell * 0xd1b54a32d192ed03ULL + 1));
  h = detail::mix64(h ^ (replicate * 0x8cb92ba72f3d8dd7ULL + 2));
  return h;
}

/// Uniform draw strictly inside (0,1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw (Marsaglia polar method, second variate discarded so
/// the generator state is the only state).
template <class Rng>
double standard_normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace betarc
