#include "fracshe/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "fracshe/error.hpp"
#include "fracshe/spectral_grid.hpp"

namespace fracshe {

namespace {

double norm_pow(std::span<const double> x, double p) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s == 0.0 ? 0.0 : std::pow(s, 0.5 * p);
}

void check_hurst(double h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw ParameterDomainError("fBm requires H in (0, 1)");
  }
}

}  // namespace

double fbm_covariance(std::span<const double> x, std::span<const double> y,
                      double hurst) {
  check_hurst(hurst);
  if (x.size() != y.size()) {
    throw ConfigurationError("fbm_covariance: dimension mismatch");
  }
  std::vector<double> diff(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) diff[a] = x[a] - y[a];
  const double p = 2.0 * hurst;
  return 0.5 * (norm_pow(x, p) + norm_pow(y, p) - norm_pow(diff, p));
}

std::string to_string(FbmMethod method) {
  return method == FbmMethod::kCholesky ? "cholesky" : "circulant1d";
}

FbmFactorSampler::FbmFactorSampler(int dim, std::vector<double> points,
                                   double hurst)
    : dim_(dim), points_(std::move(points)), hurst_(hurst) {
  check_hurst(hurst);
  if (dim < 1 || points_.size() % dim != 0) {
    throw ConfigurationError("fBm sites: coordinate count not a multiple of dim");
  }
  const std::size_t m = points_.size() / dim;
  if (m > kMaxFactorizationPoints) {
    throw ConfigurationError("exact fBm factorization is limited to 4096 sites");
  }
  cov_.resize(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    std::span<const double> xi(points_.data() + i * dim, dim);
    for (std::size_t j = 0; j <= i; ++j) {
      std::span<const double> xj(points_.data() + j * dim, dim);
      cov_(i, j) = cov_(j, i) = fbm_covariance(xi, xj, hurst);
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_);
  Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = m ? d.maxCoeff() : 0.0;
  const double dmin = m ? d.minCoeff() : 0.0;
  if (dmin < -1e-10 * std::max(dmax, 0.0)) {
    std::ostringstream os;
    os << "fBm covariance is indefinite: pivot " << dmin << " vs max " << dmax
       << " (degenerate point set?)";
    throw NumericError(os.str());
  }
  Eigen::MatrixXd lower = ldlt.matrixL();
  for (std::size_t k = 0; k < m; ++k) {
    lower.col(k) *= std::sqrt(std::max(d(k), 0.0));
  }
  factor_ = ldlt.transpositionsP().transpose() * lower;
  for (std::size_t i = 0; i < m; ++i) {
    if (cov_(i, i) == 0.0) factor_.row(i).setZero();
  }
}

FbmField FbmFactorSampler::sample(const RngStream &stream,
                                  std::uint64_t draw) const {
  const std::size_t m = static_cast<std::size_t>(cov_.rows());
  Eigen::VectorXd z(m);
  stream.normals(StreamTag::kFbm, draw, std::span<double>(z.data(), m));
  Eigen::VectorXd v = factor_ * z;
  FbmField f;
  f.hurst = hurst_;
  f.dim = dim_;
  f.points = points_;
  f.values.assign(v.data(), v.data() + m);
  f.method = FbmMethod::kCholesky;
  return f;
}

FbmCirculantSampler::FbmCirculantSampler(std::size_t n, double spacing,
                                         double hurst, std::size_t padding)
    : n_(n), spacing_(spacing), hurst_(hurst) {
  check_hurst(hurst);
  if (n < 1) throw ConfigurationError("circulant fBm needs n >= 1");
  if (!(spacing > 0.0)) throw ConfigurationError("circulant fBm needs spacing > 0");
  std::size_t half = 4;
  while (half < std::max(n, padding)) half *= 2;
  embed_ = 2 * half;

  const double p = 2.0 * hurst;
  const double level = 0.5 * std::pow(spacing, p);
  auto gam = [&](double k) {
    return level * (std::pow(k + 1.0, p) - 2.0 * std::pow(k, p) +
                    std::pow(std::abs(k - 1.0), p));
  };
  std::vector<double> row(embed_);
  for (std::size_t j = 0; j < embed_; ++j) {
    std::size_t k = j <= half ? j : embed_ - j;
    row[j] = gam(static_cast<double>(k));
  }
  Grid g = make_grid(1, static_cast<double>(embed_), static_cast<int>(embed_),
                     embed_);
  SpectralTransform tr(g);
  std::vector<std::complex<double>> lambda(g.spectral_size());
  tr.forward(row, lambda);
  double lmax = 0.0, lmin = 0.0;
  for (auto &l : lambda) {
    lmax = std::max(lmax, l.real());
    lmin = std::min(lmin, l.real());
  }
  if (lmin < -1e-10 * lmax) {
    std::ostringstream os;
    os << "circulant embedding has negative eigenvalue " << lmin
       << "; retry with padding >= " << 2 * half;
    throw NumericError(os.str());
  }
  amplitude_.resize(lambda.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    amplitude_[k] = std::sqrt(std::max(lambda[k].real(), 0.0));
  }
}

std::vector<double> FbmCirculantSampler::path(const RngStream &stream,
                                              std::uint64_t draw) const {
  Grid g = make_grid(1, static_cast<double>(embed_), static_cast<int>(embed_),
                     embed_);
  SpectralTransform tr(g);
  std::vector<double> w(embed_);
  stream.normals(StreamTag::kFbm, draw, w);
  std::vector<std::complex<double>> spec(g.spectral_size());
  tr.forward(w, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= amplitude_[k];
  // Real white noise filtered by sqrt(λ) has covariance exactly the
  // circulant row; its first n entries are fGn.
  tr.backward(spec, w);
  std::vector<double> out(n_ + 1);
  out[0] = 0.0;
  for (std::size_t i = 0; i < n_; ++i) out[i + 1] = out[i] + w[i];
  return out;
}

FbmField sample_fbm(int dim, std::span<const double> points, double hurst,
                    const RngStream &stream) {
  check_hurst(hurst);
  const std::size_t m = dim > 0 ? points.size() / dim : 0;
  bool lattice = dim == 1 && m >= 2 && points[0] == 0.0 && points[1] > 0.0;
  if (lattice) {
    const double step = points[1];
    for (std::size_t i = 2; i < m && lattice; ++i) {
      lattice = std::abs(points[i] - step * i) <= 1e-12 * step * i;
    }
  }
  if (lattice) {
    FbmCirculantSampler s(m - 1, points[1], hurst);
    FbmField f;
    f.hurst = hurst;
    f.dim = 1;
    f.points.assign(points.begin(), points.end());
    f.values = s.path(stream);
    f.method = FbmMethod::kCirculant1d;
    return f;
  }
  FbmFactorSampler s(dim, std::vector<double>(points.begin(), points.end()),
                     hurst);
  return s.sample(stream);
}

double fbm_variation_oracle(double hurst, std::size_t n,
                            const RngStream &stream, std::uint64_t draw) {
  if (n < 2) throw ConfigurationError("variation oracle needs n >= 2");
  FbmCirculantSampler s(n, 1.0 / static_cast<double>(n), hurst);
  auto b = s.path(stream, draw);
  const double q = 1.0 / hurst;
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) v += std::pow(std::abs(b[i + 1] - b[i]), q);
  return v;
}

}  // namespace fracshe
