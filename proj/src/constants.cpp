#include "fracshe/constants.hpp"

#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracshe/error.hpp"

namespace fracshe {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTolerance = 1e-13;

void require_riesz_range(int dim, double gamma) {
  if (dim < 1) throw ParameterDomainError("dimension must satisfy d >= 1");
  if (!(gamma > 0.0 && gamma < dim)) {
    std::ostringstream msg;
    msg << "gamma must satisfy 0 < gamma < d (got gamma=" << gamma
        << ", d=" << dim << ")";
    throw ParameterDomainError(msg.str());
  }
}

void require_finite_c21(double alpha, double gamma, int dim) {
  require_riesz_range(dim, gamma);
  if (!(dim - gamma < alpha)) {
    std::ostringstream msg;
    msg << "c21 is finite only for d - gamma < alpha (got d-gamma="
        << dim - gamma << ", alpha=" << alpha << ")";
    throw ParameterDomainError(msg.str());
  }
}

// Spherical average of cos(r θ·e) over θ ∈ S^{d-1}.
double spherical_cos_average(int dim, double r) {
  if (dim == 1) return std::cos(r);
  if (dim == 3) return r == 0.0 ? 1.0 : std::sin(r) / r;
  const double nu = 0.5 * dim - 1.0;
  if (r == 0.0) return 1.0;
  return std::tgamma(0.5 * dim) * std::pow(2.0 / r, nu) *
         boost::math::cyl_bessel_j(nu, r);
}

// 1 - spherical average, accurate near r = 0.
double one_minus_average(int dim, double r) {
  if (dim == 1) {
    const double s = std::sin(0.5 * r);
    return 2.0 * s * s;
  }
  if (r < 1.0) {
    // Σ_{m≥1} (-1)^{m+1} Γ(d/2) (r/2)^{2m} / (m! Γ(m + d/2))
    const double half_d = 0.5 * dim;
    const double q = 0.25 * r * r;
    double term = q / half_d;  // m = 1
    double sum = term;
    for (int m = 2; m < 30; ++m) {
      term *= -q / (m * (m - 1 + half_d));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return 1.0 - spherical_cos_average(dim, r);
}

// k-th positive zero (k ≥ 1) of the spherical average.
double average_zero(int dim, int k) {
  if (dim == 1) return (k - 0.5) * kPi;
  if (dim == 3) return k * kPi;
  return boost::math::cyl_bessel_j_zero(0.5 * dim - 1.0, k);
}

// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
// estimate and sets `error` to the change between the last two even-column
// extrapolants.
double wynn_epsilon(const std::vector<double> &partial, double &error) {
  const std::size_t n = partial.size();
  std::vector<double> prev(n + 1, 0.0);  // ε_{-1}
  std::vector<double> cur(partial.begin(), partial.end());  // ε_0
  double best = partial.back();
  double last_best = partial.size() > 1 ? partial[n - 2] : best;
  for (std::size_t col = 1; col < n; ++col) {
    std::vector<double> next(n - col);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0) {
        ok = false;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (!ok) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0 && !cur.empty()) {
      last_best = best;
      best = cur.back();
      if (cur.size() < 3) break;
    }
  }
  error = std::abs(best - last_best);
  return best;
}

struct Integral {
  double value;
  double error;
};

// ∫_0^∞ r^{d-1-p} (1 - Ω_d(r)) dr for d < p < d + 2.
Integral radial_increment_integral(int dim, double p) {
  const double power = dim - 1.0 - p;
  auto integrand = [&](double r) {
    if (r <= 0.0) return 0.0;
    if (r < 1e-4) {
      // r^{power} (r²/(2d) - r⁴/(8d(d+2))), kept as one power to avoid 0·∞.
      return std::pow(r, power + 2.0) *
             (1.0 / (2.0 * dim) - r * r / (8.0 * dim * (dim + 2.0)));
    }
    return std::pow(r, power) * one_minus_average(dim, r);
  };

  int first = 1;
  while (average_zero(dim, first) < 1.0) ++first;
  const double split = average_zero(dim, first);

  boost::math::quadrature::tanh_sinh<double> near;
  double near_err = 0.0;
  double near_l1 = 0.0;
  const double head =
      near.integrate(integrand, 0.0, split, kQuadTolerance, &near_err, &near_l1);

  // ∫_R^∞ r^{d-1-p} dr
  const double smooth_tail = std::pow(split, dim - p) / (p - dim);

  // ∫_R^∞ r^{d-1-p} Ω(r) dr over zero-to-zero segments.
  auto oscillatory = [&](double r) {
    return std::pow(r, power) * spherical_cos_average(dim, r);
  };
  constexpr int kSegments = 48;
  std::vector<double> partial;
  partial.reserve(kSegments);
  double sum = 0.0;
  double segment_err = 0.0;
  double a = split;
  for (int k = first + 1; k <= first + kSegments; ++k) {
    const double b = average_zero(dim, k);
    double err = 0.0;
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        oscillatory, a, b, 10, 1e-15, &err);
    segment_err += err;
    partial.push_back(sum);
    a = b;
  }
  double wynn_err = 0.0;
  const double osc_tail = wynn_epsilon(partial, wynn_err);

  const double value = head + smooth_tail - osc_tail;
  const double error = near_err * std::max(1.0, std::abs(head)) + segment_err +
                       wynn_err +
                       8.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(head) + std::abs(smooth_tail));
  if (!std::isfinite(value)) {
    throw NumericError("increment integral did not converge (non-finite)");
  }
  return {value, error};
}

}  // namespace

std::string to_string(ConstantName name) {
  switch (name) {
    case ConstantName::kC11: return "c11";
    case ConstantName::kCAlphaGammaD: return "c_agd";
    case ConstantName::kC21: return "c21";
    case ConstantName::kC26: return "c26";
    case ConstantName::kC14: return "c14";
    case ConstantName::kHurst: return "hurst";
  }
  return "hurst";
}

std::string to_string(ConstantMethod method) {
  return method == ConstantMethod::kClosedForm ? "closed_form" : "quadrature";
}

double riesz_c11(int dim, double gamma) {
  require_riesz_range(dim, gamma);
  const double d = dim;
  return std::pow(2.0, d - gamma) * std::pow(kPi, 0.5 * d) *
         std::tgamma(0.5 * (d - gamma)) / std::tgamma(0.5 * gamma);
}

double gaussian_abs_moment(double p) {
  if (!(p > -1.0)) throw ParameterDomainError("E|N|^p requires p > -1");
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) /
         std::sqrt(kPi);
}

ConstantReport c_alpha_gamma_d(double alpha, double gamma, int dim) {
  validate(make_model(alpha, gamma, dim));
  const double p = alpha + gamma;
  const Integral radial = radial_increment_integral(dim, p);
  const double area = sphere_area(dim);
  const double integral = area * radial.value;
  const double integral_err = area * radial.error;
  if (!(integral > 0.0)) {
    throw NumericError("increment integral is not positive; last bracket [" +
                       std::to_string(integral - integral_err) + ", " +
                       std::to_string(integral + integral_err) + "]");
  }
  const double scale = std::pow(2.0 * kPi, -0.5 * dim);
  const double value = scale * std::sqrt(integral);
  const double err = scale * integral_err / (2.0 * std::sqrt(integral));
  if (!(err < 1e-8)) {
    throw NumericError("c_agd quadrature missed the 1e-8 target; bracket [" +
                       std::to_string(value - err) + ", " +
                       std::to_string(value + err) + "]");
  }
  return {ConstantName::kCAlphaGammaD, value, ConstantMethod::kQuadrature, err};
}

ConstantReport c_alpha_gamma_d(const ModelParams &params) {
  validate(params);
  return c_alpha_gamma_d(params.alpha, params.gamma, params.dim);
}

double c_alpha_gamma_d_along(const ModelParams &params,
                             std::span<const double> e) {
  validate(params);
  if (static_cast<int>(e.size()) != params.dim) {
    throw ConfigurationError("direction has wrong dimension");
  }
  double norm2 = 0.0;
  for (double v : e) norm2 += v * v;
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw ConfigurationError("direction must be a unit vector");
  }
  const double p = params.alpha + params.gamma;
  if (params.dim == 1) {
    // Both half-lines contribute the same integral, ∫ |w|^{-p}(1-cos(w e)).
    const double integral = 2.0 * radial_increment_integral(1, p).value;
    return std::sqrt(integral / (2.0 * kPi));
  }
  if (params.dim != 2) {
    throw ConfigurationError("directional evaluation supports d in {1, 2}");
  }
  // Polar coordinates w = r(cos θ, sin θ). For fixed θ the radial integral
  // scales as |cos(θ - θ_e)|^{p-2} times the one-dimensional integral with
  // exponent p - 1; the angular integral is done numerically with breaks at
  // the zeros of cos(θ - θ_e), which depend on e.
  const double radial = radial_increment_integral(1, p - 1.0).value;
  const double theta_e = std::atan2(e[1], e[0]);
  auto angular = [&](double theta) {
    return std::pow(std::abs(std::cos(theta - theta_e)), p - 2.0);
  };
  std::vector<double> breaks = {0.0, 2.0 * kPi};
  for (double z : {theta_e + 0.5 * kPi, theta_e - 0.5 * kPi,
                   theta_e + 1.5 * kPi, theta_e - 1.5 * kPi}) {
    if (z > 0.0 && z < 2.0 * kPi) breaks.push_back(z);
  }
  std::sort(breaks.begin(), breaks.end());
  boost::math::quadrature::tanh_sinh<double> rule;
  double angle_integral = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (breaks[i] - breaks[i - 1] < 1e-15) continue;
    angle_integral +=
        rule.integrate(angular, breaks[i - 1], breaks[i], kQuadTolerance);
  }
  return std::sqrt(radial * angle_integral) / (2.0 * kPi);
}

ConstantReport c21(double alpha, double gamma, int dim) {
  require_finite_c21(alpha, gamma, dim);
  const double a = (dim - gamma) / alpha;
  const double value =
      sphere_area(dim) * std::tgamma(a) / (alpha * std::pow(2.0, a));
  return {ConstantName::kC21, value, ConstantMethod::kClosedForm, 0.0};
}

ConstantReport c21(const ModelParams &params) {
  validate(params);
  return c21(params.alpha, params.gamma, params.dim);
}

ConstantReport c21_quadrature(double alpha, double gamma, int dim) {
  require_finite_c21(alpha, gamma, dim);
  const double m = dim - gamma;
  // On [0,1] substitute v = r^{d-γ}: r^{d-1-γ} dr = dv/(d-γ).
  auto inner = [&](double v) {
    return std::exp(-2.0 * std::pow(v, alpha / m)) / m;
  };
  auto outer = [&](double r) {
    return std::pow(r, m - 1.0) * std::exp(-2.0 * std::pow(r, alpha));
  };
  boost::math::quadrature::tanh_sinh<double> finite;
  boost::math::quadrature::exp_sinh<double> infinite;
  double err_a = 0.0;
  double err_b = 0.0;
  const double part_a = finite.integrate(inner, 0.0, 1.0, kQuadTolerance, &err_a);
  const double part_b = infinite.integrate(outer, 1.0,
                                           std::numeric_limits<double>::infinity(),
                                           kQuadTolerance, &err_b);
  const double area = sphere_area(dim);
  return {ConstantName::kC21, area * (part_a + part_b),
          ConstantMethod::kQuadrature,
          area * (err_a * std::abs(part_a) + err_b * std::abs(part_b))};
}

ConstantReport c26(const ModelParams &params) {
  validate(params);
  const double d = params.dim;
  const double a = (d - params.gamma) / params.alpha;
  // ∫ ‖ξ‖^{-γ} e^{-‖ξ‖^α} dξ = |S^{d-1}| Γ((d-γ)/α) / α
  const double integral =
      sphere_area(params.dim) * std::tgamma(a) / params.alpha;
  const double prefactor =
      params.alpha / (std::pow(2.0 * kPi, d) * std::pow(2.0, a) *
                      (params.alpha - d + params.gamma));
  return {ConstantName::kC26, std::sqrt(prefactor * integral),
          ConstantMethod::kClosedForm, 0.0};
}

ConstantReport c14(const ModelParams &params) {
  const double h = hurst(params);
  const ConstantReport c = c_alpha_gamma_d(params);
  const double q = 1.0 / h;
  const double moment = gaussian_abs_moment(q);
  const double value = std::pow(c.value, q) * moment;
  const double err = q * std::pow(c.value, q - 1.0) * moment * c.est_abs_error;
  return {ConstantName::kC14, value, ConstantMethod::kQuadrature, err};
}

std::vector<ConstantReport> constant_table(const ModelParams &params) {
  std::vector<ConstantReport> out;
  out.push_back({ConstantName::kHurst, hurst(params),
                 ConstantMethod::kClosedForm, 0.0});
  out.push_back({ConstantName::kC11, riesz_c11(params.dim, params.gamma),
                 ConstantMethod::kClosedForm, 0.0});
  out.push_back(c_alpha_gamma_d(params));
  out.push_back(c21(params));
  out.push_back(c26(params));
  out.push_back(c14(params));
  return out;
}

}  // namespace fracshe
