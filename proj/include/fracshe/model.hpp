#ifndef FRACSHE_MODEL_HPP_
#define FRACSHE_MODEL_HPP_

#include <string>
#include <vector>

namespace fracshe {

enum class FunctionKind { kZero, kConstant, kLinear, kAffine, kSine, kTable };

/// Descriptor of a scalar nonlinearity (the drift b or the diffusion σ).
///
///   zero      f(u) = 0
///   constant  f(u) = offset
///   linear    f(u) = slope * u
///   affine    f(u) = offset + slope * u
///   sine      f(u) = offset + amplitude * sin(frequency * u)
///   table     piecewise-linear through (knots, values), flat outside
struct FunctionSpec {
  FunctionKind kind = FunctionKind::kZero;
  double offset = 0.0;
  double slope = 0.0;
  double amplitude = 0.0;
  double frequency = 1.0;
  std::vector<double> knots;
  std::vector<double> values;

  static FunctionSpec zero() { return {}; }
  static FunctionSpec constant(double c);
  static FunctionSpec linear(double lambda);
  static FunctionSpec affine(double intercept, double slope);
  static FunctionSpec sine(double offset, double amplitude, double frequency);
  static FunctionSpec table(std::vector<double> knots,
                            std::vector<double> values);

  double operator()(double u) const;
  double lipschitz() const;
  bool is_constant() const;
  /// Throws ConfigurationError if the descriptor is malformed.
  void validate(const std::string &name) const;
};

std::string to_string(FunctionKind kind);
FunctionKind function_kind_from_string(const std::string &name);

enum class InitKind { kZero, kConstant, kBump, kHolder };

/// Initial data u_0.
///   constant: u_0 = value
///   bump:     u_0(x) = value * exp(-|x|^2 / (2 width^2))
///   holder:   stationary Gaussian field with local Hölder exponent `holder`
///             and unit marginal variance scaled by `value`
struct InitSpec {
  InitKind kind = InitKind::kZero;
  double value = 0.0;
  double width = 1.0;
  double holder = 1.0;
};

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string &name);

/// Parameters of the stochastic fractional heat equation
///   ∂_t u = -(-Δ)^{α/2} u + b(u) + σ(u) Ḟ
/// with Riesz-colored noise of exponent γ on R^d.
struct ModelParams {
  double alpha = 1.5;
  double gamma = 0.5;
  int dim = 1;
  FunctionSpec drift;
  FunctionSpec diffusion = FunctionSpec::constant(1.0);
  InitSpec init;
  double lip_drift = 0.0;
  double lip_diffusion = 0.0;
  double init_holder = 1.0;
};

/// Builds parameters, filling the Lipschitz constants from the descriptors
/// and checking admissibility.
ModelParams make_model(double alpha, double gamma, int dim,
                       FunctionSpec drift = FunctionSpec::zero(),
                       FunctionSpec diffusion = FunctionSpec::constant(1.0),
                       InitSpec init = {});

/// Checks α ∈ (1,2], γ ∈ ((d-α)_+, d), finite Lipschitz constants and the
/// initial-data Hölder exponent. Throws ParameterDomainError naming the
/// violated inequality.
void validate(const ModelParams &params);

/// H = (α - d + γ)/2.
double hurst(const ModelParams &params);

/// Unit-sphere surface area |S^{d-1}| = 2π^{d/2}/Γ(d/2).
double sphere_area(int dim);

}  // namespace fracshe

#endif  // FRACSHE_MODEL_HPP_
