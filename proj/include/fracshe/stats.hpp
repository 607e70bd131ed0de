#ifndef FRACSHE_STATS_HPP_
#define FRACSHE_STATS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracshe::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
/// Standard error of the mean.
double standard_error(std::span<const double> x);
double median(std::vector<double> x);
double skewness(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Delete-one-block jackknife over `blocks` contiguous groups of the index
/// range [0, count). `estimate(lo, hi)` must return the statistic computed
/// with members [lo, hi) removed (lo == hi means the full sample). Returns
/// the jackknife standard error.
double block_jackknife_stderr(
    std::size_t count, std::size_t blocks,
    const std::function<double(std::size_t, std::size_t)> &estimate);

double normal_cdf(double x);

/// sup_x |F_n(x) - F(x)| for a continuous F, with F_n right-continuous.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)> &cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// P(D_n < d) for the one-sample statistic under the null, exact for every
/// n (Marsaglia, Tsang & Wang 2003).
double kolmogorov_cdf(std::size_t n, double d);

/// Smallest d with P(D_n ≥ d) ≤ significance.
double ks_critical_value(std::size_t n, double significance);

}  // namespace fracshe::stats

#endif  // FRACSHE_STATS_HPP_
