#ifndef FRACSHE_RNG_HPP_
#define FRACSHE_RNG_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace fracshe {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Purposes drawn from one member stream never overlap.
enum class StreamTag : std::uint32_t {
  kNoise = 0,
  kInitialData = 1,
  kFbm = 2,
  kAuxiliary = 3,
};

/// Identifies one reproducible random stream: stream = hash(seed, member).
/// Every draw is a pure function of (stream, tag, step, index), so draws can
/// be generated in any order or on any thread.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t member = 0;

  std::array<std::uint32_t, 2> key() const;

  /// Fills `out` with i.i.d. standard normals for the given (tag, step).
  /// Entry i depends only on (stream, tag, step, i).
  void normals(StreamTag tag, std::uint64_t step, std::span<double> out) const;

  /// Uniform doubles in (0, 1), same addressing as `normals`.
  void uniforms(StreamTag tag, std::uint64_t step, std::span<double> out) const;
};

}  // namespace fracshe

#endif  // FRACSHE_RNG_HPP_
