#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fracshe/error.hpp"
#include "fracshe/rng.hpp"
#include "fracshe/spectral_grid.hpp"

using namespace fracshe;
using std::numbers::pi;

namespace {

double periodized_gaussian(double x, double t, double L) {
  double s = 0.0;
  for (int k = -20; k <= 20; ++k) {
    const double y = x + k * L;
    s += std::exp(-y * y / (4.0 * t));
  }
  return s / std::sqrt(4.0 * pi * t);
}

// Poisson kernel on the circle: the periodized Cauchy density.
double periodized_cauchy(double x, double t, double L) {
  const double a = 2.0 * pi / L;
  return std::sinh(a * t) / (L * (std::cosh(a * t) - std::cos(a * x)));
}

}  // namespace

TEST_SUITE("spectral_grid") {
TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_grid(3, 1.0, 16), ConfigurationError);
  CHECK_THROWS_AS(make_grid(1, 1.0, 15), ConfigurationError);
  CHECK_THROWS_AS(make_grid(1, 1.0, 4), ConfigurationError);
  CHECK_THROWS_AS(make_grid(1, -1.0, 16), ConfigurationError);
  CHECK_THROWS_AS(make_grid(2, 1.0, 8192, 1 << 20), ConfigurationError);
  auto g = make_grid(2, 4.0, 16);
  CHECK(g.size() == 256);
  CHECK(g.spectral_size() == 16 * 9);
  CHECK(g.spacing == 0.25);
  CHECK(g.coordinate(8) == 0.0);
}

TEST_CASE("half-spectrum multiplicities cover every mode once") {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 2.0, 16);
    double total = 0.0;
    for (std::size_t m = 0; m < g.spectral_size(); ++m) total += g.multiplicity(m);
    CHECK(total == static_cast<double>(g.size()));
  }
  auto g = make_grid(2, 2.0, 8);
  auto w = g.wave_index(5 * 5 + 2);  // row 5 -> -3, column 2
  CHECK(w[0] == -3);
  CHECK(w[1] == 2);
}

TEST_CASE("flat indexing wraps on the torus") {
  auto g = make_grid(2, 1.0, 8);
  std::vector<int> idx{7, 0};
  auto f = g.flat_index(idx);
  CHECK(g.point_index(f)[0] == 7);
  std::vector<int> shift{1, -1};
  auto s = g.point_index(g.shifted(f, shift));
  CHECK(s[0] == 0);
  CHECK(s[1] == 7);
}

TEST_CASE("forward then backward is the identity") {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 3.0, 32);
    SpectralTransform tr(g);
    std::vector<double> u(g.size()), v(g.size());
    RngStream{7, 1}.normals(StreamTag::kAuxiliary, 0, u);
    std::vector<std::complex<double>> spec(g.spectral_size());
    tr.forward(u, spec);
    tr.backward(spec, v);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - v[i]));
    CHECK(err < 1e-13);
  }
}

TEST_CASE("gaussian and cauchy kernels match the periodized closed forms") {
  const double L = 16.0;
  auto g = make_grid(1, L, 1024);
  for (double t : {0.25, 1.0}) {
    auto k2 = green_kernel(g, 2.0, t);
    auto k1 = green_kernel(g, 1.0, t);
    double e2 = 0.0, e1 = 0.0;
    for (int i = 0; i < g.points_per_axis; ++i) {
      const double x = g.coordinate(i);
      e2 = std::max(e2, std::abs(k2.values[i] - periodized_gaussian(x, t, L)));
      e1 = std::max(e1, std::abs(k1.values[i] - periodized_cauchy(x, t, L)));
    }
    CHECK(e2 < 1e-8);
    CHECK(e1 < 1e-8);
  }
}

TEST_CASE("kernel has unit mass and is even") {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 16.0, dim == 1 ? 512 : 128);
    auto k = green_kernel(g, 1.5, 0.5);
    double mass = 0.0;
    for (double v : k.values) mass += v * g.cell_volume();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    if (dim == 1) {
      const int n = g.points_per_axis;
      for (int i = 1; i < n / 2; ++i) {
        CHECK(k.values[n / 2 + i] == doctest::Approx(k.values[n / 2 - i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("semigroup property under discrete convolution") {
  auto g = make_grid(1, 8.0, 128);
  auto a = green_kernel(g, 1.5, 0.3);
  auto b = green_kernel(g, 1.5, 0.5);
  auto c = green_kernel(g, 1.5, 0.8);
  const int n = g.points_per_axis;
  double err = 0.0, peak = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      // values are centred: index n/2 is the origin
      const int k = ((i - j + n / 2) % n + n) % n;
      s += a.values[j] * b.values[k] * g.spacing;
    }
    err = std::max(err, std::abs(s - c.values[i]));
    peak = std::max(peak, c.values[i]);
  }
  CHECK(err < 1e-12 * peak * n);
}

TEST_CASE("off-grid evaluation agrees with the grid kernel") {
  auto g = make_grid(1, 16.0, 256);
  auto k = green_kernel(g, 1.5, 1.0);
  for (int i : {0, 17, 128, 200}) {
    std::vector<double> x{g.coordinate(i)};
    CHECK(kernel_at(g, 1.5, 1.0, x) == doctest::Approx(k.values[i]).epsilon(1e-10));
  }
}

TEST_CASE("scaling identity") {
  // G_t(x) = t^{-d/α} G_1(t^{-1/α} x) on a torus wide enough that images
  // are negligible.
  auto g = make_grid(1, 512.0, 16384);
  const double alpha = 1.5;
  for (double t : {0.25, 4.0}) {
    for (double x : {0.0, 0.3, 1.1}) {
      std::vector<double> xs{x}, ys{x * std::pow(t, -1.0 / alpha)};
      const double lhs = kernel_at(g, alpha, t, xs);
      const double rhs = std::pow(t, -1.0 / alpha) * kernel_at(g, alpha, 1.0, ys);
      CHECK(std::abs(lhs - rhs) < 1e-5 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("resolution and domain errors") {
  auto g = make_grid(1, 16.0, 64);
  CHECK_THROWS_AS(green_kernel(g, 1.5, 1e-6), ResolutionError);
  CHECK_THROWS_AS(green_kernel(g, 2.5, 1.0), ParameterDomainError);
  CHECK_THROWS_AS(green_kernel(g, 1.5, -1.0), ParameterDomainError);
  auto k = green_kernel(make_grid(1, 32.0, 2048), 2.0, 1.0);
  CHECK_THROWS_AS(kernel_bounds_check(k, 2.0), ParameterDomainError);
}

TEST_CASE("two-sided bounds for the stable kernel") {
  auto g = make_grid(1, 64.0, 4096);
  auto k = green_kernel(g, 1.5, 1.0);
  auto r = kernel_bounds_check(k, 1.5);
  CHECK(r.k_lower > 0.0);
  CHECK(r.k_upper >= r.k_lower);
  CHECK(r.ratio >= 1.0);
  CHECK(r.ratio < 10.0);
  CHECK(r.points > 0);
}

TEST_CASE("center shift puts the origin at n/2") {
  auto g = make_grid(1, 1.0, 8);
  std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7};
  center_shift(g, v);
  CHECK(v[4] == 0.0);
  CHECK(v[5] == 1.0);
  CHECK(v[0] == 4.0);
}
}
