#include "fracshe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracshe/error.hpp"

namespace fracshe::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double median(std::vector<double> x) {
  if (x.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double skewness(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigurationError("linear_fit needs at least two (x, y) pairs");
  }
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigurationError("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

double block_jackknife_stderr(
    std::size_t count, std::size_t blocks,
    const std::function<double(std::size_t, std::size_t)> &estimate) {
  blocks = std::min(blocks, count);
  if (blocks < 2) return 0.0;
  std::vector<double> theta(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t lo = b * count / blocks;
    std::size_t hi = (b + 1) * count / blocks;
    theta[b] = estimate(lo, hi);
  }
  const double m = mean(theta);
  double s = 0.0;
  for (double t : theta) s += (t - m) * (t - m);
  const double g = static_cast<double>(blocks);
  return std::sqrt((g - 1.0) / g * s);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)> &cdf) {
  if (sample.empty()) throw ConfigurationError("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ConfigurationError("KS statistic of an empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

namespace {

using Matrix = std::vector<double>;

void mat_mul(const Matrix &a, const Matrix &b, Matrix &c, int m) {
  std::fill(c.begin(), c.end(), 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const double aik = a[i * m + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < m; ++j) c[i * m + j] += aik * b[k * m + j];
    }
}

// Computes A^n with a running power-of-ten exponent to avoid overflow.
void mat_pow(const Matrix &a, int &ea, Matrix &v, int &ev, int m, std::size_t n) {
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  mat_pow(a, ea, v, ev, m, n / 2);
  Matrix b(m * m);
  mat_mul(v, v, b, m);
  int eb = 2 * ev;
  if (n % 2 == 0) {
    v = b;
    ev = eb;
  } else {
    mat_mul(a, b, v, m);
    ev = ea + eb;
  }
  if (v[(m / 2) * m + m / 2] > 1e140) {
    for (double &x : v) x *= 1e-140;
    ev += 140;
  }
}

}  // namespace

double kolmogorov_cdf(std::size_t n, double d) {
  if (n == 0) throw ConfigurationError("kolmogorov_cdf needs n >= 1");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  // Far tail: Marsaglia-Tsang-Wang's own shortcut, accurate to ~7 digits.
  const double s2 = nd * d;
  if (s2 > 7.24 || (s2 > 3.76 && n > 99)) {
    const double rn = static_cast<double>(n);
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(rn) + 1.409 / rn) * s2);
  }
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;
  Matrix H(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) H[i * m + j] = (i - j + 1 < 0) ? 0.0 : 1.0;
  for (int i = 0; i < m; ++i) {
    H[i * m] -= std::pow(h, i + 1);
    H[(m - 1) * m + i] -= std::pow(h, m - i);
  }
  H[(m - 1) * m] += (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g) H[i * m + j] /= g;
  int eh = 0, eq = 0;
  Matrix Q(m * m);
  mat_pow(H, eh, Q, eq, m, n);
  double s = Q[(k - 1) * m + k - 1];
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      eq -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, eq), 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double significance) {
  if (!(significance > 0.0 && significance < 1.0)) {
    throw ConfigurationError("significance must lie in (0, 1)");
  }
  // The DKW bound P(D > d) <= 2 exp(-2 n d^2) caps the bracket, which keeps
  // the matrix in kolmogorov_cdf small.
  double lo = 0.0;
  double hi = std::min(1.0, std::sqrt(std::log(2.0 / significance) /
                                      (2.0 * static_cast<double>(n))) * 1.0001);
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (1.0 - kolmogorov_cdf(n, mid) > significance) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace fracshe::stats
