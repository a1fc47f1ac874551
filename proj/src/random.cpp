#include "gexp/random.hpp"

#include <cmath>
#include <numbers>

namespace gexp {

namespace {

constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// Uniform on (0, 1] with 53 random bits from two words.
inline double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  bits &= (std::uint64_t{1} << 53) - 1;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

inline Philox4x32::Key key_of(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Box-Muller pair for counter (path, pair index).
inline void normal_pair(std::uint64_t seed, std::uint64_t path, std::uint64_t pair, double& z0,
                        double& z1) {
  Philox4x32::Counter ctr{static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                          static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32)};
  auto r = Philox4x32::block(ctr, key_of(seed));
  double u1 = to_unit_open_closed(r[0], r[1]);
  double u2 = to_unit_open_closed(r[2], r[3]);
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  double z0, z1;
  normal_pair(seed, path, step / 2, z0, z1);
  return (step % 2 == 0) ? z0 : z1;
}

void fill_standard_normals(std::uint64_t seed, std::uint64_t path, std::span<double> out) {
  std::size_t n = out.size();
  std::size_t k = 0;
  for (; k + 1 < n; k += 2) normal_pair(seed, path, k / 2, out[k], out[k + 1]);
  if (k < n) {
    double z1;
    normal_pair(seed, path, k / 2, out[k], z1);
  }
}

}  // namespace gexp
