#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ucf::rng {

  /// splitmix64 step (Steele, Lea, Flood 2014). Used both as the core
  /// generator and as the seed-mixing function for derived streams.
  inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Derive an independent stream seed from (master seed, stream index).
  /// Workers seeded this way produce identical results for any worker count.
  inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL + stream * 0xd1b54a32d192ed03ULL);
    splitmix64(s);
    return splitmix64(s);
  }

  /// Small deterministic generator. Distribution helpers are hand-rolled so
  /// that output is identical across standard libraries and platforms.
  class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Lemire multiply-shift with rejection,
    /// exact (unbiased) for any bound.
    std::uint64_t next_index(std::uint64_t bound) {
      std::uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * bound;
      auto lo = static_cast<std::uint64_t>(m);
      if (lo < bound) {
        const std::uint64_t t = (0 - bound) % bound;
        while (lo < t) {
          x = next_u64();
          m = static_cast<__uint128_t>(x) * bound;
          lo = static_cast<std::uint64_t>(m);
        }
      }
      return static_cast<std::uint64_t>(m >> 64);
    }

    /// Fisher-Yates shuffle.
    template<typename T>
    void shuffle(std::vector<T>& v) {
      for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(next_index(i));
        std::swap(v[i - 1], v[j]);
      }
    }

  private:
    std::uint64_t state_;
  };

} // namespace ucf::rng
