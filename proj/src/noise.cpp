#include "fracshe/noise.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

#include "fracshe/error.hpp"

namespace fracshe {

namespace {

double signed_antiderivative(double xi, double gamma) {
  double a = std::pow(std::abs(xi), 1.0 - gamma) / (1.0 - gamma);
  return xi < 0.0 ? -a : a;
}

double cell_average_1d(double center, double width, double gamma) {
  return (signed_antiderivative(center + 0.5 * width, gamma) -
          signed_antiderivative(center - 0.5 * width, gamma)) /
         width;
}

// Average of r^{-γ} over the square [-a, a]^2.
double zero_cell_average_2d(double a, double gamma) {
  auto f = [gamma](double th) { return std::pow(std::cos(th), gamma - 2.0); };
  double angular = boost::math::quadrature::gauss<double, 20>::integrate(
      f, 0.0, std::numbers::pi / 4);
  double integral = 8.0 / (2.0 - gamma) * std::pow(a, 2.0 - gamma) * angular;
  return integral / (4.0 * a * a);
}

double cell_average_2d(double cx, double cy, double width, double gamma) {
  using rule = boost::math::quadrature::gauss<double, 8>;
  const auto &x = rule::abscissa();
  const auto &w = rule::weights();
  // Nodes are stored for the positive half; expand symmetrically.
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back(x[i]);
    weights.push_back(w[i]);
    if (x[i] != 0.0) {
      nodes.push_back(-x[i]);
      weights.push_back(w[i]);
    }
  }
  const double half = 0.5 * width;
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double px = cx + half * nodes[i];
      double py = cy + half * nodes[j];
      sum += weights[i] * weights[j] * std::pow(std::hypot(px, py), -gamma);
    }
  }
  return sum / 4.0;
}

}  // namespace

std::vector<double> spectral_weights(const Grid &grid, double gamma) {
  if (!(gamma > 0.0 && gamma < grid.dim)) {
    throw ParameterDomainError("noise requires gamma in (0, d)");
  }
  const double dk = grid.frequency_step();
  std::vector<double> out(grid.spectral_size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    auto k = grid.wave_index(m);
    if (grid.dim == 1) {
      out[m] = cell_average_1d(dk * k[0], dk, gamma);
    } else if (k[0] == 0 && k[1] == 0) {
      out[m] = zero_cell_average_2d(0.5 * dk, gamma);
    } else {
      out[m] = cell_average_2d(dk * k[0], dk * k[1], dk, gamma);
    }
  }
  return out;
}

NoiseSampler::NoiseSampler(const Grid &grid, const ModelParams &params)
    : grid_(grid),
      weights_(spectral_weights(grid, params.gamma)),
      transform_(grid),
      white_(grid.size()),
      spec_(grid.spectral_size()) {
  amplitude_.resize(weights_.size());
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    amplitude_[m] = std::sqrt(weights_[m]);
  }
}

void NoiseSampler::spectral_into(double dt, const RngStream &stream,
                                 std::uint64_t step,
                                 std::span<std::complex<double>> out) {
  if (!(dt > 0.0)) throw ConfigurationError("noise requires dt > 0");
  stream.normals(StreamTag::kNoise, step, white_);
  transform_.forward(white_, out);
  // backward() carries 1/N; the target covariance is dt/L^d Σ S_k e^{iξr}.
  const double scale =
      std::sqrt(dt * static_cast<double>(grid_.size()) / grid_.box_volume());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= amplitude_[m] * scale;
}

void NoiseSampler::sample_into(double dt, const RngStream &stream,
                               std::uint64_t step, std::span<double> out) {
  spectral_into(dt, stream, step, spec_);
  transform_.backward(spec_, out);
}

NoiseIncrement NoiseSampler::sample(double dt, const RngStream &stream,
                                    std::uint64_t step) {
  NoiseIncrement inc;
  inc.dt = dt;
  inc.values.resize(grid_.size());
  inc.seed_path = {stream.seed, stream.member, step};
  sample_into(dt, stream, step, inc.values);
  return inc;
}

NoiseIncrement sample_noise(const Grid &grid, const ModelParams &params,
                            double dt, const RngStream &stream,
                            std::uint64_t step) {
  NoiseSampler sampler(grid, params);
  return sampler.sample(dt, stream, step);
}

std::vector<double> discrete_covariance(const Grid &grid,
                                        const ModelParams &params) {
  auto w = spectral_weights(grid, params.gamma);
  const double scale = static_cast<double>(grid.size()) / grid.box_volume();
  std::vector<std::complex<double>> spec(w.size());
  for (std::size_t m = 0; m < w.size(); ++m) spec[m] = w[m] * scale;
  std::vector<double> out(grid.size());
  SpectralTransform tr(grid);
  tr.backward(spec, out);
  return out;
}

}  // namespace fracshe
