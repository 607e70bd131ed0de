#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracshe/stats.hpp"

using namespace fracshe;

// Kolmogorov distribution references: scipy.stats.kstwo.

TEST_SUITE("stats") {
TEST_CASE("moments") {
  std::vector<double> x{1, 2, 3, 4};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(stats::median(x) == 2.5);
  CHECK(stats::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(stats::skewness(x) == doctest::Approx(0.0));
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = stats::linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0));
}

TEST_CASE("block jackknife of the mean") {
  std::vector<double> x;
  for (int i = 0; i < 100; ++i) x.push_back(i % 7);
  auto est = [&](std::size_t lo, std::size_t hi) {
    // mean with the block [lo, hi) removed
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i >= lo && i < hi) continue;
      s += x[i];
      ++c;
    }
    return s / c;
  };
  const double se = stats::block_jackknife_stderr(x.size(), 100, est);
  CHECK(se == doctest::Approx(stats::standard_error(x)).epsilon(1e-9));
}

TEST_CASE("normal cdf") {
  CHECK(stats::normal_cdf(0.0) == 0.5);
  CHECK(stats::normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(stats::normal_cdf(-0.5) == doctest::Approx(0.3085375387259869).epsilon(1e-14));
}

TEST_CASE("kolmogorov distribution") {
  CHECK(stats::kolmogorov_cdf(10, 0.274) == doctest::Approx(0.6284796154565043).epsilon(1e-10));
  CHECK(stats::kolmogorov_cdf(20, 0.2) == doctest::Approx(0.647279826376585).epsilon(1e-10));
  CHECK(stats::kolmogorov_cdf(100, 0.1) == doctest::Approx(0.7473072429936126).epsilon(1e-9));
  CHECK(stats::kolmogorov_cdf(2000, 0.03) == doctest::Approx(0.9464530520606744).epsilon(1e-8));
  CHECK(stats::ks_critical_value(10, 0.05) == doctest::Approx(0.4092460847775048).epsilon(1e-8));
  CHECK(stats::ks_critical_value(20, 0.05) == doctest::Approx(0.2940753144343292).epsilon(1e-8));
  CHECK(stats::ks_critical_value(10, 0.01) == doctest::Approx(0.48893165941109273).epsilon(1e-8));
  CHECK(stats::ks_critical_value(2000, 0.01) == doctest::Approx(0.036308207396644955).epsilon(1e-7));
}

TEST_CASE("ks statistic") {
  // Sample at the midpoints of n equal-probability cells: D = 1/(2n).
  std::vector<double> u;
  for (int i = 0; i < 10; ++i) u.push_back((i + 0.5) / 10);
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(stats::ks_statistic(u, uniform) == doctest::Approx(0.05));
  // ties are counted with the strict-inequality convention
  std::vector<double> tied(4, 0.5);
  CHECK(stats::ks_statistic(tied, uniform) == doctest::Approx(0.5));
  CHECK(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(stats::ks_two_sample({1, 2}, {3, 4}) == 1.0);
}
}
