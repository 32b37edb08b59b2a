#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace memwalk {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the random stream used by ensemble member `member` under `seed`.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t member) {
  return mix64(mix64(seed) ^ mix64(member + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the n-th draw is a pure function of (key, n).
/// Normals come from Box-Muller; the second variate of each pair is cached.
class Rng {
 public:
  struct State {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;
    bool has_spare = false;
    double spare = 0.0;
  };

  explicit Rng(std::uint64_t key = 0) { state_.key = key; }
  explicit Rng(const State& s) : state_(s) {}

  std::uint64_t next_u64() {
    ++state_.counter;
    return mix64(state_.key ^ mix64(state_.counter));
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal() {
    if (state_.has_spare) {
      state_.has_spare = false;
      return state_.spare;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    state_.spare = radius * std::sin(angle);
    state_.has_spare = true;
    return radius * std::cos(angle);
  }

  const State& state() const { return state_; }

 private:
  State state_;
};

}  // namespace memwalk
