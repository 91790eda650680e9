#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace odeco {

// Seedable generator with platform-stable uniform/gaussian draws.
// Distributions are implemented directly (not via std::*_distribution) so
// that file outputs are reproducible for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Independent sub-stream for (seed, stream): used for per-trial and
  // per-instance randomness so trials can be reordered or parallelized.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::vector<double> gaussian_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = gaussian();
    return v;
  }

  // Uniform on the unit sphere via normalized gaussians.
  std::vector<double> unit_vector(std::size_t n) {
    for (;;) {
      std::vector<double> v = gaussian_vector(n);
      double s = 0.0;
      for (double x : v) s += x * x;
      if (s > 1e-24) {
        double inv = 1.0 / std::sqrt(s);
        for (double& x : v) x *= inv;
        return v;
      }
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace odeco
