#pragma once

#include <cmath>
#include <cstdint>

namespace kelcap {

// splitmix64 (Vigna). Used only to key the per-path generators.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ (Blackman & Vigna, 2019).
class Xoshiro256pp {
 public:
  Xoshiro256pp(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3)
      : s_{s0, s1, s2, s3} {}

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in (0, 1]; never 0 so log() is safe
  double uniform_oc() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  // uniform in [0, 1)
  double uniform_co() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Per-path stream as a pure function of (master_seed, path_index): the key is
// derived by counter mixing, never by sequential jump-ahead, so any path can
// be regenerated in isolation.
inline Xoshiro256pp path_stream(std::uint64_t master_seed, std::int64_t path_index) {
  SplitMix64 master(master_seed);
  const std::uint64_t base = master.next();
  SplitMix64 key(base ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(path_index) +
                                                  0x632BE59BD9B4E019ULL)));
  const std::uint64_t s0 = key.next();
  const std::uint64_t s1 = key.next();
  const std::uint64_t s2 = key.next();
  const std::uint64_t s3 = key.next();
  return Xoshiro256pp(s0, s1, s2, s3);
}

// Exact standard Gaussians via Box-Muller on 53-bit uniforms.
class NormalSampler {
 public:
  explicit NormalSampler(Xoshiro256pp gen) : gen_(gen) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = gen_.uniform_oc();
    const double u2 = gen_.uniform_co();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  Xoshiro256pp gen_;
  bool has_spare_{false};
  double spare_{0.0};
};

}  // namespace kelcap
