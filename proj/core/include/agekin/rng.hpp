#pragma once

#include <cstdint>
#include <random>

namespace agekin {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Per-path random stream: mt19937_64 seeded through splitmix64 so that
/// (seed, path) pairs give decorrelated streams, with hand-rolled variate
/// transforms for platform-stable output.
class PathRng {
 public:
  explicit PathRng(std::uint64_t seed_material) : engine_(seed_material) {}

  static PathRng for_path(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (path + 1));
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    PathRng r(0);
    r.engine_.seed(seq);
    return r;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = std::cos(6.283185307179586477 * u2);
    const double s = std::sin(6.283185307179586477 * u2);
    cache_ = r * s;
    have_cache_ = true;
    return r * c;
  }

  /// Marsaglia-Tsang; any shape > 0, unit rate.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

inline constexpr const char* kRngDescription = "mt19937_64/splitmix64-streams";

}  // namespace agekin
