#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "levy/demand_model.hpp"

namespace levy {

// xoshiro256++ generator seeded through SplitMix64. Streams for individual
// Monte Carlo paths are derived from (master seed, path index) alone, so any
// path can be reproduced in isolation and results never depend on how paths
// are scheduled across threads. Samplers are hand-rolled because the standard
// library's distributions are implementation-defined and would break
// byte-stable output across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = split_mix(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = 0x9E3779B97F4A7C15ULL;
    }
  }

  static Rng for_path(std::uint64_t master_seed, std::uint64_t path_index) {
    std::uint64_t x = master_seed;
    const std::uint64_t base = split_mix(x);
    return Rng(base ^ (0xD1B54A32D192ED03ULL * (path_index + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next_u64() {
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

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Box-Muller; one draw per call, no cached spare.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Marsaglia-Tsang for shape >= 1; smaller shapes use the boosting identity
  // Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      const double u = 1.0 - uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = 1.0 - uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  // shape == 1 goes through the exponential sampler so Exponential(rate) and
  // Gamma(1, rate) consume identical draws and produce identical paths.
  double sample_jump(const JumpDistribution& dist) {
    return dist.shape == 1.0 ? exponential(dist.rate) : gamma(dist.shape, dist.rate);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  static std::uint64_t split_mix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace levy
