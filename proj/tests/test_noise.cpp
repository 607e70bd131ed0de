#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "fracshe/ensemble.hpp"
#include "fracshe/model.hpp"
#include "fracshe/noise.hpp"
#include "fracshe/rng.hpp"
#include "fracshe/stats.hpp"

using namespace fracshe;

TEST_SUITE("noise") {
TEST_CASE("counter-based draws are addressable") {
  RngStream s{42, 3};
  std::vector<double> a(100), b(40);
  s.normals(StreamTag::kNoise, 5, a);
  s.normals(StreamTag::kNoise, 5, b);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(a[i] == b[i]);
  std::vector<double> c(100);
  s.normals(StreamTag::kNoise, 6, c);
  CHECK(a[0] != c[0]);
  RngStream{42, 4}.normals(StreamTag::kNoise, 5, c);
  CHECK(a[0] != c[0]);
  std::vector<double> u(1000);
  s.uniforms(StreamTag::kAuxiliary, 0, u);
  for (double x : u) CHECK((x > 0.0 && x < 1.0));
  // Philox4x32-10 known-answer vector (Random123 kat_vectors)
  auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);
}

TEST_CASE("normals have unit variance") {
  std::vector<double> v(200000);
  RngStream{1, 0}.normals(StreamTag::kAuxiliary, 0, v);
  CHECK(std::abs(stats::mean(v)) < 0.01);
  CHECK(stats::variance(v) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("spectral weights") {
  auto g = make_grid(1, 16.0, 256);
  auto w = spectral_weights(g, 0.5);
  REQUIRE(w.size() == g.spectral_size());
  CHECK(std::isfinite(w[0]));
  for (std::size_t m = 1; m + 1 < w.size(); ++m) CHECK(w[m] > w[m + 1]);
  // away from the origin the cell average is close to the point value
  const double xi = 100 * g.frequency_step();
  CHECK(w[100] == doctest::Approx(std::pow(xi, -0.5)).epsilon(1e-4));
}

TEST_CASE("same path reproduces bit for bit") {
  auto g = make_grid(1, 8.0, 128);
  auto p = make_model(1.5, 0.5, 1);
  auto a = sample_noise(g, p, 0.01, RngStream{9, 2}, 17);
  auto b = sample_noise(g, p, 0.01, RngStream{9, 2}, 17);
  CHECK(a.values == b.values);
  CHECK(a.seed_path.seed == 9);
  CHECK(a.seed_path.member == 2);
  CHECK(a.seed_path.step == 17);
  auto c = sample_noise(g, p, 0.01, RngStream{9, 2}, 18);
  CHECK(a.values != c.values);
}

TEST_CASE("empirical covariance matches the discrete covariance") {
  auto g = make_grid(1, 8.0, 128);
  auto p = make_model(1.5, 0.5, 1);
  auto cov = discrete_covariance(g, p);
  NoiseSampler sampler(g, p);
  const double dt = 0.5;
  const std::size_t draws = 2000;
  const int n = g.points_per_axis;
  std::vector<double> lag0, lag3;
  for (std::size_t k = 0; k < draws; ++k) {
    auto w = sampler.sample(dt, RngStream{5, k}, 0);
    double s0 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
      s0 += w.values[i] * w.values[i];
      s3 += w.values[i] * w.values[(i + 3) % n];
    }
    lag0.push_back(s0 / (n * dt));
    lag3.push_back(s3 / (n * dt));
  }
  CHECK(std::abs(stats::mean(lag0) - cov[0]) < 4 * stats::standard_error(lag0));
  CHECK(std::abs(stats::mean(lag3) - cov[3]) < 4 * stats::standard_error(lag3));
}

TEST_CASE("ensembles are independent of the thread count") {
  auto g = make_grid(1, 8.0, 256);
  auto p = make_model(1.5, 0.5, 1);
  auto draw = [&](int threads) {
    return run_ensemble<NoiseSampler, std::vector<double>>(
        64, threads, [&] { return NoiseSampler(g, p); },
        [](NoiseSampler &s, std::size_t m) {
          return s.sample(0.01, RngStream{3, m}, m % 5).values;
        });
  };
  auto one = draw(1);
  auto four = draw(4);
  CHECK(one == four);
}
}
