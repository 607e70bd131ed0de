#ifndef FRACSHE_NOISE_HPP_
#define FRACSHE_NOISE_HPP_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fracshe/model.hpp"
#include "fracshe/rng.hpp"
#include "fracshe/spectral_grid.hpp"

namespace fracshe {

/// Spectral weights of the discrete Riesz noise over the half spectrum:
/// S_k is the average of ‖ξ‖^{-γ} over the lattice cell
/// ξ_k + [-π/L, π/L)^d. The zero cell is integrable for γ < d and keeps
/// its finite average, so the discrete covariance converges to the
/// continuum one including its low-frequency part.
///
/// d = 1 uses the exact antiderivative; d = 2 uses 8x8 Gauss-Legendre on
/// each cell and the polar closed form on the zero cell.
std::vector<double> spectral_weights(const Grid &grid, double gamma);

struct NoisePath {
  std::uint64_t seed = 0;
  std::uint64_t member = 0;
  std::uint64_t step = 0;
};

/// One time slab of noise: values(x) = ∫_slab Ḟ(s, x) ds, Gaussian with
/// E[values(x) values(y)] = dt · C(x - y) and C from discrete_covariance.
struct NoiseIncrement {
  double dt = 0.0;
  std::vector<double> values;
  NoisePath seed_path;
};

/// Reusable sampler: holds the weights and a transform workspace.
/// Not thread-safe; use one per thread.
class NoiseSampler {
 public:
  NoiseSampler(const Grid &grid, const ModelParams &params);

  NoiseIncrement sample(double dt, const RngStream &stream, std::uint64_t step);
  /// Same draw as `sample`, written into `out` (size n^d).
  void sample_into(double dt, const RngStream &stream, std::uint64_t step,
                   std::span<double> out);

  /// Half-spectrum coefficients of the same draw (before the inverse
  /// transform), in the unnormalized convention of SpectralTransform.
  void spectral_into(double dt, const RngStream &stream, std::uint64_t step,
                     std::span<std::complex<double>> out);

  const Grid &grid() const { return grid_; }
  const std::vector<double> &weights() const { return weights_; }

 private:
  Grid grid_;
  std::vector<double> weights_;
  std::vector<double> amplitude_;
  SpectralTransform transform_;
  std::vector<double> white_;
  std::vector<std::complex<double>> spec_;
};

NoiseIncrement sample_noise(const Grid &grid, const ModelParams &params,
                            double dt, const RngStream &stream,
                            std::uint64_t step);

/// Exact covariance of the discrete field per unit time,
/// C(r) = L^{-d} Σ_k S_k e^{iξ_k·r}, for every lattice lag r. Entry j is
/// the lag with multi-index point_index(j), i.e. lag 0 at index 0 and
/// negative lags wrapped to the upper half of each axis.
std::vector<double> discrete_covariance(const Grid &grid,
                                        const ModelParams &params);

}  // namespace fracshe

#endif  // FRACSHE_NOISE_HPP_
