#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cds {

/// xoshiro256** seeded by four splitmix64 outputs of the user seed.
///
/// Bit stream (reproducible across implementations):
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   normal()   = Box-Muller on u1 = 1 - uniform(), u2 = uniform():
///                r = sqrt(-2 ln u1); returns r cos(2 pi u2), then r sin(2 pi u2)
///   index(n)   = floor(uniform() * n)
///   permutation(n): Fisher-Yates, i from n-1 down to 1, swap(i, index(i + 1))
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  double normal();
  double exponential();
  std::size_t index(std::size_t n);
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for replication r of an experiment seeded with `base`.
inline std::uint64_t replication_seed(std::uint64_t base, std::uint64_t r) { return base + r; }

}  // namespace cds
