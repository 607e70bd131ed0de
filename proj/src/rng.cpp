#include "fracshe/rng.hpp"

#include <cmath>
#include <numbers>

namespace fracshe {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi,
                    std::uint32_t &lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// 53-bit uniform in the open interval (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 2> &key,
                                   StreamTag tag, std::uint64_t step,
                                   std::uint64_t pair) {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32),
      static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>(step >> 32) ^
          (static_cast<std::uint32_t>(tag) << 24)};
  return philox4x32(counter, key);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> RngStream::key() const {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(member + 0x632BE59BD9B4E019ull));
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

void RngStream::normals(StreamTag tag, std::uint64_t step,
                        std::span<double> out) const {
  // Box-Muller: one Philox block gives two uniforms and hence two normals.
  const std::size_t n = out.size();
  const auto k = key();
  for (std::size_t pair = 0; 2 * pair < n; ++pair) {
    const auto r = block(k, tag, step, pair);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = radius * std::cos(angle);
    if (2 * pair + 1 < n) out[2 * pair + 1] = radius * std::sin(angle);
  }
}

void RngStream::uniforms(StreamTag tag, std::uint64_t step,
                         std::span<double> out) const {
  const std::size_t n = out.size();
  const auto k = key();
  for (std::size_t pair = 0; 2 * pair < n; ++pair) {
    const auto r = block(k, tag, step, pair);
    out[2 * pair] = to_open_unit(r[0], r[1]);
    if (2 * pair + 1 < n) out[2 * pair + 1] = to_open_unit(r[2], r[3]);
  }
}

}  // namespace fracshe
