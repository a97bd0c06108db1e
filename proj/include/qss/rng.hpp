#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qss {

// splitmix64 step; used to derive engine seeds from (seed, stream).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream. Streams with distinct indices derived from the
/// same seed are independent; the generator identifier goes into sample
/// metadata so runs can be reproduced.
class Rng {
 public:
  static constexpr std::string_view kName = "splitmix64:mt19937_64";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    engine_.seed(splitmix64_next(s));
  }

  // uniform on (0,1); never returns 0 or 1
  double uniform() {
    double u;
    do {
      u = unit_(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double gaussian() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qss
