#ifndef FRACSHE_CONFIG_HPP_
#define FRACSHE_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracshe/estimators.hpp"
#include "fracshe/model.hpp"
#include "fracshe/solver.hpp"
#include "fracshe/spectral_grid.hpp"

namespace fracshe {

/// Settings for the experiment battery beyond the estimator contract:
/// probe locations, regression lags and pass thresholds.
struct ProbeConfig {
  double t = 1.0;                         ///< evaluation time (a record time)
  std::vector<double> anchor{0.0};        ///< site x for the CLT test
  std::size_t anchors = 64;               ///< sites averaged in moment estimates
  std::size_t lil_anchors = 256;
  std::vector<int> holder_space_lags{4, 8, 16, 32, 64};
  std::vector<int> holder_time_steps{2, 4, 8, 16, 32, 64};
  std::vector<double> variance_times{0.5, 1.0};
  FunctionSpec phi = FunctionSpec::constant(1.0);
  double ks_threshold = 0.05;
  double variance_tolerance = 0.05;
  double increment_tolerance = 0.07;
  double holder_tolerance = 0.05;
  double variation_tolerance = 0.10;
  double lil_fraction = 0.90;
  double localization_margin = 0.1;
  double fbm_tolerance = 0.03;
};

struct EnsembleConfig {
  std::size_t members = 100;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::vector<std::string> experiments{"constants"};
  ModelParams model;
  double grid_extent = 16.0;
  int grid_n = 1024;
  SolverConfig solver;
  EstimatorConfig estimator;
  ProbeConfig probe;
  std::optional<LocalizationConfig> localization;
  EnsembleConfig ensemble;
  std::string output_dir = "runs";
};

/// Known experiment names, in battery order.
const std::vector<std::string> &experiment_names();

/// Parses and validates; unknown keys anywhere raise ConfigurationError.
/// Missing keys take the defaults above.
ExperimentConfig config_from_json(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

/// Fully resolved form (every field present); round-trips exactly through
/// config_from_json.
nlohmann::json to_json(const ExperimentConfig &cfg);

/// Config without output_dir: the part that defines the computation.
nlohmann::json resolved_content(const ExperimentConfig &cfg);

nlohmann::json to_json(const FunctionSpec &f);
FunctionSpec function_from_json(const nlohmann::json &j, const std::string &where);

Grid grid_of(const ExperimentConfig &cfg);

/// Cross-field checks (model admissibility, solver timing, estimator
/// ladder against the grid, probe times among record times).
void validate(const ExperimentConfig &cfg);

}  // namespace fracshe

#endif  // FRACSHE_CONFIG_HPP_
