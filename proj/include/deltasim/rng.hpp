#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "deltasim/geometry.hpp"

namespace deltasim {

// Counter-based randomness. Every stream is derived by key mixing, so a draw
// at (seed, rollout, timestep, agent) is a pure function of those values and
// independent of execution order or thread count.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  return splitmix64_next(s);
}

template <typename... Rest>
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_key(mix_key(a, b), static_cast<std::uint64_t>(rest)...);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in (0, 1); never returns 0 so it is log-safe.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // Integer in [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool next_bernoulli(double p) { return next_uniform() < p; }

  // Box-Muller; consumes exactly two uniforms per draw.
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double next_normal(double mean, double sigma) {
    return mean + sigma * next_normal();
  }

 private:
  std::uint64_t state_;
};

}  // namespace deltasim
