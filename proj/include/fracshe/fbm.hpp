#ifndef FRACSHE_FBM_HPP_
#define FRACSHE_FBM_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracshe/rng.hpp"

namespace fracshe {

/// Lévy (isotropic multiparameter) fBm covariance
/// (‖x‖^{2H} + ‖y‖^{2H} - ‖x-y‖^{2H}) / 2.
double fbm_covariance(std::span<const double> x, std::span<const double> y,
                      double hurst);

enum class FbmMethod { kCholesky, kCirculant1d };
std::string to_string(FbmMethod method);

/// Sites are stored row-wise: points[i*dim + a] is coordinate a of site i.
struct FbmField {
  double hurst = 0.5;
  int dim = 1;
  std::vector<double> points;
  std::vector<double> values;
  FbmMethod method = FbmMethod::kCholesky;

  std::size_t size() const { return values.size(); }
};

inline constexpr std::size_t kMaxFactorizationPoints = 4096;

/// Exact sampler on an arbitrary point set via pivoted LDLT of the
/// covariance matrix. Factorizes once; each draw costs O(m^2).
class FbmFactorSampler {
 public:
  /// Throws NumericError when the matrix is indefinite beyond 1e-10
  /// relative to its largest pivot, ConfigurationError above 4096 sites.
  FbmFactorSampler(int dim, std::vector<double> points, double hurst);

  FbmField sample(const RngStream &stream, std::uint64_t draw = 0) const;
  const Eigen::MatrixXd &covariance() const { return cov_; }

 private:
  int dim_;
  std::vector<double> points_;
  double hurst_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;  // cov = factor * factor^T
};

/// Exact sampler of standard fBm on the lattice {0, Δ, ..., nΔ} by
/// circulant embedding of fractional Gaussian noise (the stationary
/// increments) followed by a cumulative sum, so B(0) = 0.
class FbmCirculantSampler {
 public:
  /// Throws NumericError when an embedding eigenvalue is below -1e-10 of
  /// the largest (suggesting a larger padding).
  FbmCirculantSampler(std::size_t n, double spacing, double hurst,
                      std::size_t padding = 0);

  /// n+1 values B(0), B(Δ), ..., B(nΔ).
  std::vector<double> path(const RngStream &stream,
                           std::uint64_t draw = 0) const;
  std::size_t size() const { return n_; }
  double spacing() const { return spacing_; }
  double hurst() const { return hurst_; }

 private:
  std::size_t n_;
  double spacing_;
  double hurst_;
  std::size_t embed_;
  std::vector<double> amplitude_;
};

/// One-shot sampler. Uses the circulant path when the sites form the 1-D
/// lattice {0, Δ, ..., nΔ} (in order), the exact factorization otherwise.
FbmField sample_fbm(int dim, std::span<const double> points, double hurst,
                    const RngStream &stream);

/// V^{n, 1/H}_{[0,1]} of one fBm path sampled on {0, 1/n, ..., 1}.
/// Its expectation is E|N|^{1/H} for every n.
double fbm_variation_oracle(double hurst, std::size_t n,
                            const RngStream &stream, std::uint64_t draw = 0);

}  // namespace fracshe

#endif  // FRACSHE_FBM_HPP_
