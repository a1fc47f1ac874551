// Counter-based normal draws: the value for (seed, path, step) is a pure
// function of those three integers, so results do not depend on how paths
// are distributed over threads.
#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace gexp {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Standard normal draw number `step` of path `path` under `seed`.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

/// Fills out[k] = standard_normal(seed, path, k) for k = 0..out.size()-1.
void fill_standard_normals(std::uint64_t seed, std::uint64_t path, std::span<double> out);

}  // namespace gexp
