#ifndef FRACSHE_SPECTRAL_GRID_HPP_
#define FRACSHE_SPECTRAL_GRID_HPP_

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracshe {

/// Periodic box [-L/2, L/2)^d sampled at n points per axis. Grid index i
/// along an axis sits at x_i = -L/2 + i h. Multi-dimensional arrays are
/// row-major with axis 0 slowest.
///
/// The angular frequency lattice is ξ_k = 2πk/L, k ∈ {-n/2, ..., n/2-1}^d.
/// Real fields are transformed to the half spectrum (last axis k ≥ 0, with
/// k = n/2 the Nyquist entry) as FFTW's r2c layout does; the Nyquist
/// coefficient of a real field is real, which keeps the lattice symmetric
/// under ξ → -ξ.
struct Grid {
  int dim = 1;
  double extent = 1.0;
  int points_per_axis = 8;
  double spacing = 0.125;

  std::size_t size() const;           ///< n^d
  std::size_t spectral_size() const;  ///< n^{d-1} (n/2 + 1)
  double cell_volume() const;         ///< h^d
  double box_volume() const;          ///< L^d
  double frequency_step() const;      ///< 2π/L
  double nyquist() const;             ///< π/h
  double coordinate(int index) const { return -0.5 * extent + index * spacing; }

  /// Integer wave vector of half-spectrum entry `m`.
  std::array<int, 2> wave_index(std::size_t m) const;
  /// How many full-lattice modes entry `m` stands for (1 or 2): sums of
  /// even functions over the full lattice are Σ_m multiplicity(m) f_m.
  double multiplicity(std::size_t m) const;
  /// ‖ξ‖ for every half-spectrum entry.
  std::vector<double> frequency_norms() const;
  /// Multi-index of a physical grid point.
  std::array<int, 2> point_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> idx) const;
  /// Grid index shifted by an integer lattice vector with torus wrap.
  std::size_t shifted(std::size_t flat, std::span<const int> shift) const;
};

inline constexpr std::size_t kDefaultMaxGridPoints = std::size_t{1} << 24;

/// Validates d ∈ {1,2}, n even, n ≥ 8, L > 0 and n^d ≤ max_points.
Grid make_grid(int dim, double extent, int points_per_axis,
               std::size_t max_points = kDefaultMaxGridPoints);

/// Real-to-half-complex transform pair for one grid. Owns FFTW plans and
/// aligned buffers; one instance per thread. Plans are built with
/// FFTW_ESTIMATE and executed single-threaded, so output is bitwise
/// reproducible for a fixed input.
class SpectralTransform {
 public:
  explicit SpectralTransform(const Grid &grid);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform &) = delete;
  SpectralTransform &operator=(const SpectralTransform &) = delete;
  SpectralTransform(SpectralTransform &&other) noexcept;
  SpectralTransform &operator=(SpectralTransform &&other) noexcept;

  const Grid &grid() const { return grid_; }

  /// out[k] = Σ_x in[x] e^{-i ξ_k · (x - x_0)} (unnormalized).
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out);
  /// Inverse of `forward` (includes the 1/n^d factor).
  void backward(std::span<const std::complex<double>> in,
                std::span<double> out);

 private:
  void release();

  Grid grid_;
  double *real_ = nullptr;
  std::complex<double> *spec_ = nullptr;
  void *forward_plan_ = nullptr;
  void *backward_plan_ = nullptr;
};

/// Physical-space Green kernel G^α_t on the grid together with its symbol
/// e^{-t‖ξ‖^α} over the half spectrum. `values` are in grid order, so
/// values[i] = G(x_i) with x_i the grid coordinate (origin at index n/2).
/// On the torus G is the periodization Σ_m G(x + mL) of the kernel on R^d.
struct KernelSlice {
  Grid grid;
  double alpha = 2.0;
  double t = 1.0;
  std::vector<double> values;
  std::vector<double> symbol;
};

/// Evaluates G^α_t by inverse transform of its symbol. Requires α ∈ (0,2],
/// t > 0 and e^{-t (π/h)^α} < 0.5 (the kernel must decay within the
/// frequency band); throws ResolutionError otherwise, or when spectral
/// truncation produces negative lobes below -1e-8 max G.
KernelSlice green_kernel(const Grid &grid, double alpha, double t);

/// Fourier-series value of the periodized kernel at an arbitrary point,
/// G(x) = L^{-d} Σ_k e^{-t‖ξ_k‖^α} cos(ξ_k · x).
double kernel_at(const Grid &grid, double alpha, double t,
                 std::span<const double> x);

struct KernelBoundsReport {
  double k_lower = 0.0;   ///< fitted K'_α
  double k_upper = 0.0;   ///< fitted K_α
  double ratio = 0.0;     ///< K_α / K'_α
  double max_relative_violation = 0.0;
  std::size_t points = 0;
};

/// Fits the two-sided stable-kernel bound
///   K' t / (t^{1/α} + ‖x‖)^{d+α} ≤ G_t(x) ≤ K t / (t^{1/α} + ‖x‖)^{d+α}
/// over the grid and reports the worst relative violation. The bound holds
/// only for α ∈ (1,2); other α raise ParameterDomainError.
KernelBoundsReport kernel_bounds_check(const KernelSlice &slice, double alpha);

/// Swaps the two halves of every axis (maps FFT order to grid order and
/// back; the map is an involution for even n).
void center_shift(const Grid &grid, std::span<double> values);

}  // namespace fracshe

#endif  // FRACSHE_SPECTRAL_GRID_HPP_
