#include "fracshe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracshe/error.hpp"

namespace fracshe {

FunctionSpec FunctionSpec::constant(double c) {
  FunctionSpec f;
  f.kind = FunctionKind::kConstant;
  f.offset = c;
  return f;
}

FunctionSpec FunctionSpec::linear(double lambda) {
  FunctionSpec f;
  f.kind = FunctionKind::kLinear;
  f.slope = lambda;
  return f;
}

FunctionSpec FunctionSpec::affine(double intercept, double slope) {
  FunctionSpec f;
  f.kind = FunctionKind::kAffine;
  f.offset = intercept;
  f.slope = slope;
  return f;
}

FunctionSpec FunctionSpec::sine(double offset, double amplitude,
                                double frequency) {
  FunctionSpec f;
  f.kind = FunctionKind::kSine;
  f.offset = offset;
  f.amplitude = amplitude;
  f.frequency = frequency;
  return f;
}

FunctionSpec FunctionSpec::table(std::vector<double> knots,
                                 std::vector<double> values) {
  FunctionSpec f;
  f.kind = FunctionKind::kTable;
  f.knots = std::move(knots);
  f.values = std::move(values);
  f.validate("table");
  return f;
}

double FunctionSpec::operator()(double u) const {
  switch (kind) {
    case FunctionKind::kZero:
      return 0.0;
    case FunctionKind::kConstant:
      return offset;
    case FunctionKind::kLinear:
      return slope * u;
    case FunctionKind::kAffine:
      return offset + slope * u;
    case FunctionKind::kSine:
      return offset + amplitude * std::sin(frequency * u);
    case FunctionKind::kTable: {
      if (u <= knots.front()) return values.front();
      if (u >= knots.back()) return values.back();
      const auto it = std::upper_bound(knots.begin(), knots.end(), u);
      const auto i = static_cast<std::size_t>(it - knots.begin());
      const double w = (u - knots[i - 1]) / (knots[i] - knots[i - 1]);
      return (1.0 - w) * values[i - 1] + w * values[i];
    }
  }
  return 0.0;
}

double FunctionSpec::lipschitz() const {
  switch (kind) {
    case FunctionKind::kZero:
    case FunctionKind::kConstant:
      return 0.0;
    case FunctionKind::kLinear:
    case FunctionKind::kAffine:
      return std::abs(slope);
    case FunctionKind::kSine:
      return std::abs(amplitude * frequency);
    case FunctionKind::kTable: {
      double lip = 0.0;
      for (std::size_t i = 1; i < knots.size(); ++i) {
        lip = std::max(lip, std::abs(values[i] - values[i - 1]) /
                                (knots[i] - knots[i - 1]));
      }
      return lip;
    }
  }
  return 0.0;
}

bool FunctionSpec::is_constant() const {
  return kind == FunctionKind::kZero || kind == FunctionKind::kConstant ||
         (kind != FunctionKind::kTable && lipschitz() == 0.0);
}

void FunctionSpec::validate(const std::string &name) const {
  auto bad = [&](const std::string &why) {
    throw ConfigurationError(name + ": " + why);
  };
  if (!std::isfinite(offset) || !std::isfinite(slope) ||
      !std::isfinite(amplitude) || !std::isfinite(frequency)) {
    bad("coefficients must be finite");
  }
  if (kind == FunctionKind::kTable) {
    if (knots.size() < 2 || knots.size() != values.size()) {
      bad("table needs >= 2 knots and as many values");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1])) bad("table knots must increase strictly");
    }
    for (double v : values) {
      if (!std::isfinite(v)) bad("table values must be finite");
    }
  }
}

std::string to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::kZero: return "zero";
    case FunctionKind::kConstant: return "constant";
    case FunctionKind::kLinear: return "linear";
    case FunctionKind::kAffine: return "affine";
    case FunctionKind::kSine: return "sine";
    case FunctionKind::kTable: return "table";
  }
  return "zero";
}

FunctionKind function_kind_from_string(const std::string &name) {
  if (name == "zero") return FunctionKind::kZero;
  if (name == "constant") return FunctionKind::kConstant;
  if (name == "linear") return FunctionKind::kLinear;
  if (name == "affine") return FunctionKind::kAffine;
  if (name == "sine") return FunctionKind::kSine;
  if (name == "table") return FunctionKind::kTable;
  throw ConfigurationError("unknown function kind '" + name + "'");
}

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kZero: return "zero";
    case InitKind::kConstant: return "constant";
    case InitKind::kBump: return "bump";
    case InitKind::kHolder: return "holder";
  }
  return "zero";
}

InitKind init_kind_from_string(const std::string &name) {
  if (name == "zero") return InitKind::kZero;
  if (name == "constant") return InitKind::kConstant;
  if (name == "bump") return InitKind::kBump;
  if (name == "holder") return InitKind::kHolder;
  throw ConfigurationError("unknown initial-data kind '" + name + "'");
}

ModelParams make_model(double alpha, double gamma, int dim, FunctionSpec drift,
                       FunctionSpec diffusion, InitSpec init) {
  ModelParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.dim = dim;
  p.drift = std::move(drift);
  p.diffusion = std::move(diffusion);
  p.init = init;
  p.lip_drift = p.drift.lipschitz();
  p.lip_diffusion = p.diffusion.lipschitz();
  p.init_holder = init.kind == InitKind::kHolder ? init.holder : 1.0;
  validate(p);
  return p;
}

void validate(const ModelParams &p) {
  std::ostringstream msg;
  if (p.dim < 1) {
    msg << "dimension must satisfy d >= 1 (got d=" << p.dim << ")";
    throw ParameterDomainError(msg.str());
  }
  if (!(p.alpha > 1.0 && p.alpha <= 2.0)) {
    msg << "alpha must satisfy 1 < alpha <= 2 (got alpha=" << p.alpha << ")";
    throw ParameterDomainError(msg.str());
  }
  const double d = p.dim;
  const double lower = std::max(d - p.alpha, 0.0);
  if (!(p.gamma > lower)) {
    msg << "gamma must satisfy gamma > (d-alpha)_+ = " << lower
        << " (got gamma=" << p.gamma << ")";
    throw ParameterDomainError(msg.str());
  }
  if (!(p.gamma < d)) {
    msg << "gamma must satisfy gamma < d = " << d << " (got gamma=" << p.gamma
        << ")";
    throw ParameterDomainError(msg.str());
  }
  if (!(std::isfinite(p.lip_drift) && p.lip_drift >= 0.0)) {
    throw ParameterDomainError("Lipschitz constant of b must be finite and >= 0");
  }
  if (!(std::isfinite(p.lip_diffusion) && p.lip_diffusion >= 0.0)) {
    throw ParameterDomainError(
        "Lipschitz constant of sigma must be finite and >= 0");
  }
  p.drift.validate("drift");
  p.diffusion.validate("diffusion");
  const double eta_min = (p.alpha - d + p.gamma) / p.alpha;
  if (p.init.kind == InitKind::kHolder &&
      !(p.init_holder > eta_min && p.init_holder <= 1.0)) {
    msg << "initial Hölder exponent must satisfy (alpha-d+gamma)/alpha = "
        << eta_min << " < eta0 <= 1 (got eta0=" << p.init_holder << ")";
    throw ParameterDomainError(msg.str());
  }
  if (p.init.kind == InitKind::kBump && !(p.init.width > 0.0)) {
    throw ParameterDomainError("bump width must be > 0");
  }
}

double hurst(const ModelParams &params) {
  validate(params);
  return (params.alpha - params.dim + params.gamma) / 2.0;
}

double sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

}  // namespace fracshe
