#pragma once

// Seeding contract and per-stream random engines.
//
// Every random draw in the library comes from a Xoshiro256pp engine whose
// seed is derived from a 64-bit parent seed, an index and a role:
//
//   replication seed  = derive_seed(master, replication, Role::replication)
//   particle stream   = derive_seed(replication seed, particle, Role::brownian
//                                   | Role::jump_decision)
//   system stream     = derive_seed(replication seed, 0, Role::proposals)
//
// derive_seed is a pure function (SplitMix64 finaliser chain), so any stream
// can be reconstructed without touching its siblings. This is what makes the
// naive and improved particle algorithms consume identical randomness and
// lets replications run in any order or in parallel.

#include <boost/random/normal_distribution.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sli {

enum class StreamRole : std::uint64_t {
  replication = 1,
  proposals = 2,
  brownian = 3,
  jump_decision = 4,
  initial_law = 5,
  path = 6,
  study_point = 7,
  reference = 8,
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index,
                                    StreamRole role) noexcept {
  const auto r = static_cast<std::uint64_t>(role);
  return mix64(mix64(parent ^ (r * 0xd1b54a32d192ed03ULL)) + mix64(index));
}

/// xoshiro256++ (Blackman & Vigna). 32 bytes of state, so one engine per
/// particle and per role is affordable at N = 10^5.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t w = z;
      w = (w ^ (w >> 30)) * 0xbf58476d1ce4e5b9ULL;
      w = (w ^ (w >> 27)) * 0x94d049bb133111ebULL;
      s = w ^ (w >> 31);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

using Rng = Xoshiro256pp;

inline Rng make_stream(std::uint64_t parent, std::uint64_t index, StreamRole role) {
  return Rng{derive_seed(parent, index, role)};
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& g) noexcept {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; safe argument for a logarithm.
inline double uniform_open0(Rng& g) noexcept { return 1.0 - uniform01(g); }

/// Exp(rate) by inversion: -ln(u) / rate with u on (0, 1].
inline double exponential(Rng& g, double rate) noexcept {
  return -std::log(uniform_open0(g)) / rate;
}

/// Uniform integer on {0, ..., n-1} (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(Rng& g, std::uint64_t n) noexcept {
  std::uint64_t x = g();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = g();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal (Boost ziggurat; stateless between calls).
inline double std_normal(Rng& g) {
  boost::random::normal_distribution<double> nd;
  return nd(g);
}

}  // namespace sli
