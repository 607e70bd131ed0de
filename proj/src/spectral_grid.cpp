#include "fracshe/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <limits>
#include <sstream>
#include <utility>

#include "fracshe/error.hpp"

namespace fracshe {

namespace {

// FFTW's planner and plan destruction are not thread-safe.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_wave(int i, int n) { return i < n / 2 ? i : i - n; }

}  // namespace

std::size_t Grid::size() const {
  std::size_t n = static_cast<std::size_t>(points_per_axis);
  return dim == 1 ? n : n * n;
}

std::size_t Grid::spectral_size() const {
  std::size_t n = static_cast<std::size_t>(points_per_axis);
  std::size_t half = n / 2 + 1;
  return dim == 1 ? half : n * half;
}

double Grid::cell_volume() const { return std::pow(spacing, dim); }
double Grid::box_volume() const { return std::pow(extent, dim); }
double Grid::frequency_step() const {
  return 2.0 * std::numbers::pi / extent;
}
double Grid::nyquist() const { return std::numbers::pi / spacing; }

std::array<int, 2> Grid::wave_index(std::size_t m) const {
  const int n = points_per_axis;
  const int half = n / 2 + 1;
  if (dim == 1) return {static_cast<int>(m), 0};
  const int row = static_cast<int>(m / half);
  const int col = static_cast<int>(m % half);
  return {signed_wave(row, n), col};
}

double Grid::multiplicity(std::size_t m) const {
  const std::size_t half = points_per_axis / 2 + 1;
  const std::size_t col = m % half;
  return (col == 0 || col == half - 1) ? 1.0 : 2.0;
}

std::vector<double> Grid::frequency_norms() const {
  std::vector<double> out(spectral_size());
  const double dk = frequency_step();
  for (std::size_t m = 0; m < out.size(); ++m) {
    auto k = wave_index(m);
    out[m] = dk * std::hypot(static_cast<double>(k[0]),
                             static_cast<double>(k[1]));
  }
  return out;
}

std::array<int, 2> Grid::point_index(std::size_t flat) const {
  if (dim == 1) return {static_cast<int>(flat), 0};
  const std::size_t n = points_per_axis;
  return {static_cast<int>(flat / n), static_cast<int>(flat % n)};
}

std::size_t Grid::flat_index(std::span<const int> idx) const {
  const int n = points_per_axis;
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    int i = ((idx[a] % n) + n) % n;
    flat = flat * n + static_cast<std::size_t>(i);
  }
  return flat;
}

std::size_t Grid::shifted(std::size_t flat, std::span<const int> shift) const {
  auto idx = point_index(flat);
  for (int a = 0; a < dim; ++a) idx[a] += shift[a];
  return flat_index(std::span<const int>(idx.data(), dim));
}

Grid make_grid(int dim, double extent, int points_per_axis,
               std::size_t max_points) {
  if (dim != 1 && dim != 2) {
    throw ConfigurationError("grid dim must be 1 or 2 (got " +
                             std::to_string(dim) + ")");
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw ConfigurationError("grid extent must be positive and finite");
  }
  if (points_per_axis % 2 != 0) {
    throw ConfigurationError("n must be even (got " +
                             std::to_string(points_per_axis) + ")");
  }
  if (points_per_axis < 8) {
    throw ConfigurationError("n must be at least 8 (got " +
                             std::to_string(points_per_axis) + ")");
  }
  Grid g;
  g.dim = dim;
  g.extent = extent;
  g.points_per_axis = points_per_axis;
  g.spacing = extent / points_per_axis;
  if (g.size() > max_points) {
    std::ostringstream os;
    os << "grid has " << g.size() << " points, above the memory cap of "
       << max_points;
    throw ConfigurationError(os.str());
  }
  return g;
}

SpectralTransform::SpectralTransform(const Grid &grid) : grid_(grid) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = static_cast<double *>(fftw_malloc(sizeof(double) * grid.size()));
  spec_ = static_cast<std::complex<double> *>(
      fftw_malloc(sizeof(fftw_complex) * grid.spectral_size()));
  if (!real_ || !spec_) {
    fftw_free(real_);
    fftw_free(spec_);
    throw NumericError("fftw_malloc failed");
  }
  auto *cplx = reinterpret_cast<fftw_complex *>(spec_);
  const int n = grid.points_per_axis;
  int dims[2] = {n, n};
  forward_plan_ = fftw_plan_dft_r2c(grid.dim, dims, real_, cplx,
                                    FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  backward_plan_ = fftw_plan_dft_c2r(grid.dim, dims, cplx, real_,
                                     FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  if (!forward_plan_ || !backward_plan_) {
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_)
      fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    fftw_free(real_);
    fftw_free(spec_);
    throw NumericError("FFTW plan creation failed");
  }
}

void SpectralTransform::release() {
  if (!real_ && !spec_ && !forward_plan_ && !backward_plan_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(real_);
  fftw_free(spec_);
  real_ = nullptr;
  spec_ = nullptr;
  forward_plan_ = nullptr;
  backward_plan_ = nullptr;
}

SpectralTransform::~SpectralTransform() { release(); }

SpectralTransform::SpectralTransform(SpectralTransform &&other) noexcept
    : grid_(other.grid_),
      real_(std::exchange(other.real_, nullptr)),
      spec_(std::exchange(other.spec_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

SpectralTransform &SpectralTransform::operator=(
    SpectralTransform &&other) noexcept {
  if (this != &other) {
    release();
    grid_ = other.grid_;
    real_ = std::exchange(other.real_, nullptr);
    spec_ = std::exchange(other.spec_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void SpectralTransform::forward(std::span<const double> in,
                                std::span<std::complex<double>> out) {
  if (in.size() != grid_.size() || out.size() != grid_.spectral_size()) {
    throw ConfigurationError("forward transform: buffer size mismatch");
  }
  std::memcpy(real_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(out.data(), spec_, sizeof(fftw_complex) * out.size());
}

void SpectralTransform::backward(std::span<const std::complex<double>> in,
                                 std::span<double> out) {
  if (in.size() != grid_.spectral_size() || out.size() != grid_.size()) {
    throw ConfigurationError("backward transform: buffer size mismatch");
  }
  std::memcpy(spec_, in.data(), sizeof(fftw_complex) * in.size());
  // Self-conjugate entries (zero and Nyquist on every axis) of a real
  // field's spectrum are real; pin them so c2r is an exact inverse.
  const std::size_t n = grid_.points_per_axis;
  const std::size_t half = n / 2 + 1;
  if (grid_.dim == 1) {
    spec_[0].imag(0.0);
    spec_[n / 2].imag(0.0);
  } else {
    for (std::size_t r : {std::size_t{0}, n / 2}) {
      for (std::size_t c : {std::size_t{0}, n / 2}) spec_[r * half + c].imag(0.0);
    }
  }
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * scale;
}

void center_shift(const Grid &grid, std::span<double> values) {
  const std::size_t n = grid.points_per_axis;
  const std::size_t half = n / 2;
  if (grid.dim == 1) {
    std::rotate(values.begin(), values.begin() + half, values.end());
    return;
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto row = values.subspan(r * n, n);
    std::rotate(row.begin(), row.begin() + half, row.end());
  }
  std::rotate(values.begin(), values.begin() + half * n, values.end());
}

KernelSlice green_kernel(const Grid &grid, double alpha, double t) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterDomainError("green_kernel requires alpha in (0, 2]");
  }
  if (!(t > 0.0)) throw ParameterDomainError("green_kernel requires t > 0");
  const double edge = std::exp(-t * std::pow(grid.nyquist(), alpha));
  if (!(edge < 0.5)) {
    std::ostringstream os;
    os << "kernel not resolved: symbol at Nyquist is " << edge
       << " >= 0.5; increase n or t";
    throw ResolutionError(os.str());
  }
  KernelSlice slice;
  slice.grid = grid;
  slice.alpha = alpha;
  slice.t = t;
  auto norms = grid.frequency_norms();
  slice.symbol.resize(norms.size());
  std::vector<std::complex<double>> spec(norms.size());
  // backward() divides by n^d; the kernel density needs 1/L^d.
  const double scale = static_cast<double>(grid.size()) / grid.box_volume();
  for (std::size_t m = 0; m < norms.size(); ++m) {
    slice.symbol[m] = std::exp(-t * std::pow(norms[m], alpha));
    spec[m] = slice.symbol[m] * scale;
  }
  slice.values.resize(grid.size());
  SpectralTransform tr(grid);
  tr.backward(spec, slice.values);
  center_shift(grid, slice.values);

  const double peak = *std::max_element(slice.values.begin(), slice.values.end());
  const double low = *std::min_element(slice.values.begin(), slice.values.end());
  if (low < -1e-8 * peak) {
    std::ostringstream os;
    os << "kernel has negative lobes down to " << low << " (max " << peak
       << "); increase n or t";
    throw ResolutionError(os.str());
  }
  return slice;
}

double kernel_at(const Grid &grid, double alpha, double t,
                 std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.dim) {
    throw ConfigurationError("kernel_at: point dimension mismatch");
  }
  const int n = grid.points_per_axis;
  const double dk = grid.frequency_step();
  double sum = 0.0;
  if (grid.dim == 1) {
    // Symmetric pairs ±k plus k = 0 and the unpaired -n/2 entry.
    sum = 1.0;
    for (int k = 1; k < n / 2; ++k) {
      double xi = dk * k;
      sum += 2.0 * std::exp(-t * std::pow(xi, alpha)) * std::cos(xi * x[0]);
    }
    double xi = dk * (n / 2);
    sum += std::exp(-t * std::pow(xi, alpha)) * std::cos(xi * x[0]);
  } else {
    for (int k0 = -n / 2; k0 < n / 2; ++k0) {
      for (int k1 = -n / 2; k1 < n / 2; ++k1) {
        double a = dk * k0, b = dk * k1;
        sum += std::exp(-t * std::pow(std::hypot(a, b), alpha)) *
               std::cos(a * x[0] + b * x[1]);
      }
    }
  }
  return sum / grid.box_volume();
}

KernelBoundsReport kernel_bounds_check(const KernelSlice &slice, double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw ParameterDomainError(
        "kernel bounds hold only for alpha in (1, 2) (got alpha=" +
        std::to_string(alpha) + ")");
  }
  const Grid &g = slice.grid;
  const double t = slice.t;
  const double scale = std::pow(t, 1.0 / alpha);
  const double power = g.dim + alpha;
  std::vector<double> envelope(g.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.point_index(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double x = g.coordinate(idx[a]);
      r2 += x * x;
    }
    envelope[i] = t / std::pow(scale + std::sqrt(r2), power);
    double f = slice.values[i] / envelope[i];
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  KernelBoundsReport rep;
  rep.k_lower = lo;
  rep.k_upper = hi;
  rep.ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  rep.points = g.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double below = lo * envelope[i] - slice.values[i];
    double above = slice.values[i] - hi * envelope[i];
    worst = std::max({worst, below / (hi * envelope[i]),
                      above / (hi * envelope[i])});
  }
  rep.max_relative_violation = worst;
  return rep;
}

}  // namespace fracshe
