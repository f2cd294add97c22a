#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace weyllab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Mixes a base seed with cell indices so that parallel Monte-Carlo cells get
// independent, schedule-invariant streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i, std::uint64_t j = 0) {
  std::uint64_t s = base;
  splitmix64(s);
  s ^= 0x632be59bd9b4e019ull * (i + 1);
  splitmix64(s);
  s ^= 0x9e6c63d0876a9a47ull * (j + 1);
  return splitmix64(s);
}

// xoshiro256++ seeded through splitmix64. Self-contained so that MC output is
// reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eedba5e5eedba5eull) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
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

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return mag * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Isotropic direction on the unit sphere S^{n-1}; n = dir.size().
  void unit_sphere(std::span<double> dir) {
    const std::size_t n = dir.size();
    if (n == 1) {
      dir[0] = (next_u64() & 1u) ? 1.0 : -1.0;
      return;
    }
    if (n == 2) {
      const double phi = uniform(0.0, 6.283185307179586476925286766559);
      dir[0] = std::cos(phi);
      dir[1] = std::sin(phi);
      return;
    }
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& d : dir) {
        d = gaussian();
        norm2 += d * d;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& d : dir) d *= inv;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace weyllab
