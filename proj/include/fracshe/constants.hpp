#ifndef FRACSHE_CONSTANTS_HPP_
#define FRACSHE_CONSTANTS_HPP_

#include <span>
#include <string>
#include <vector>

#include "fracshe/model.hpp"

namespace fracshe {

enum class ConstantName { kC11, kCAlphaGammaD, kC21, kC26, kC14, kHurst };
enum class ConstantMethod { kClosedForm, kQuadrature };

std::string to_string(ConstantName name);
std::string to_string(ConstantMethod method);

struct ConstantReport {
  ConstantName name = ConstantName::kHurst;
  double value = 0.0;
  ConstantMethod method = ConstantMethod::kClosedForm;
  double est_abs_error = 0.0;
};

/// Riesz normalization c_{1,1} = 2^{d-γ} π^{d/2} Γ((d-γ)/2) / Γ(γ/2),
/// requires 0 < γ < d.
double riesz_c11(int dim, double gamma);

/// E|N|^p = 2^{p/2} Γ((p+1)/2) / √π for a standard Gaussian N.
double gaussian_abs_moment(double p);

/// Gradient constant
///   c_{α,γ,d} = (2π)^{-d/2} ( ∫_{R^d} ‖w‖^{-(α+γ)} (1 - cos(w·e)) dw )^{1/2}.
///
/// The integral is reduced by rotational symmetry to a radial integral
/// against the spherical average of cos(w·e), Γ(d/2) (2/r)^ν J_ν(r) with
/// ν = d/2 - 1. The range [0, R] (R the first zero of the spherical
/// average beyond r = 1) is done by tanh-sinh quadrature. Beyond R the
/// non-oscillatory part is exact and the oscillatory part is summed over
/// zero-to-zero segments with Wynn-epsilon acceleration.
ConstantReport c_alpha_gamma_d(const ModelParams &params);
ConstantReport c_alpha_gamma_d(double alpha, double gamma, int dim);

/// Same constant evaluated along an explicit unit vector e without using
/// rotational symmetry of the angular integral (polar coordinates for
/// d = 2). Used to check e-independence. Supports d ∈ {1, 2}.
double c_alpha_gamma_d_along(const ModelParams &params,
                             std::span<const double> e);

/// c_{2,1} = ∫ ‖ξ‖^{-γ} e^{-2‖ξ‖^α} dξ = |S^{d-1}| Γ((d-γ)/α) / (α 2^{(d-γ)/α}).
/// Finite iff d - γ < α.
ConstantReport c21(const ModelParams &params);
ConstantReport c21(double alpha, double gamma, int dim);
/// Radial quadrature of the same integral.
ConstantReport c21_quadrature(double alpha, double gamma, int dim);

/// c_{2,6} = [ α / ((2π)^d 2^{(d-γ)/α} (α-d+γ)) ∫ ‖ξ‖^{-γ} e^{-‖ξ‖^α} dξ ]^{1/2}.
ConstantReport c26(const ModelParams &params);

/// c_{1,4} = c_{α,γ,d}^{1/H} E|N|^{1/H}.
ConstantReport c14(const ModelParams &params);

/// All constants for an admissible parameter set, in a fixed order:
/// hurst, c11, c_agd, c21, c26, c14.
std::vector<ConstantReport> constant_table(const ModelParams &params);

}  // namespace fracshe

#endif  // FRACSHE_CONSTANTS_HPP_
