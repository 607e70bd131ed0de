#ifndef FRACSHE_ESTIMATORS_HPP_
#define FRACSHE_ESTIMATORS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fracshe/model.hpp"
#include "fracshe/noise.hpp"
#include "fracshe/rng.hpp"
#include "fracshe/solver.hpp"
#include "fracshe/spectral_grid.hpp"

namespace fracshe {

struct EstimatorConfig {
  std::vector<std::vector<double>> probe_dirs{{1.0}};
  std::vector<double> eps_ladder;
  int moment_order = 2;
  std::vector<std::size_t> variation_levels;  ///< n = 2^m subintervals
  double a1 = 0.0;
  double a2 = 4.0;
  std::size_t ensemble_size = 2000;
  double significance = 0.01;
};

/// Checks the ladder against the grid: every ε a multiple of h in
/// [4h, L/16], unit probe directions mapping ε-steps to lattice shifts,
/// dyadic variation levels and A2 > A1.
void validate(const EstimatorConfig &cfg, const Grid &grid);

struct LocalizationConfig {
  std::vector<double> beta_ladder;
  double eps = 1.0 / 16;
  double anchor_t = 1.0;
  std::vector<double> anchor_x{0.0};
};

/// δ = 1 + β^{1 + 1/H}.
double localization_delta(double beta, double hurst);

struct EnsembleStats {
  std::string name;
  std::vector<double> values;
  double mean = 0.0;
  double std_error = 0.0;
  std::map<std::string, double> extras;
  std::string label;  ///< "QUANTITATIVE" or "QUALITATIVE"
};

/// Fills mean and standard error from `values`.
void summarize(EnsembleStats &stats);

/// Lattice shift of ε e in grid steps; ConfigurationError if ε e is not
/// a lattice vector.
std::array<int, 2> lattice_shift(const Grid &grid, std::span<const double> e,
                                 double eps);

/// u(x) - u(x - ε e) with torus wrap; x is a flat grid index.
double gradient(std::span<const double> values, const Grid &grid,
                std::size_t x, std::span<const double> e, double eps);
double gradient(const FieldState &state, const Grid &grid, std::size_t x,
                std::span<const double> e, double eps);

/// One member's input to the CLT test: u_t(x) and the gradient at every
/// ladder ε (same order as cfg.eps_ladder).
struct GradientSample {
  double u = 0.0;
  std::vector<double> grad;
};

GradientSample gradient_sample(const FieldState &state, const Grid &grid,
                               std::size_t x, std::span<const double> e,
                               const std::vector<double> &eps_ladder);

/// Distributional test of ε^{-H} ∇_{εe} u_t(x) → c σ(u_t(x)) N.
///
/// For every ε the paired statistic T_i = ε^{-H} ∇_i / (c σ(u_i)) is
/// compared with Φ (extras "ks_eps<j>"); the exact finite-sample critical
/// value at cfg.significance is "ks_critical". The same ε is also compared
/// against the mixture law of c σ(u_i) N_i with fresh Gaussian draws
/// N_i ("ks_mix_eps<j>", two-sample), and, as a negative control, with the
/// σ pairing shuffled ("ks_shuffled"). `values` holds T_i at the smallest ε.
EnsembleStats gradient_clt_test(const std::vector<GradientSample> &samples,
                                const ModelParams &params,
                                const EstimatorConfig &cfg,
                                const RngStream &aux);

/// Law of the iterated logarithm diagnostic on one field. For each anchor
/// the maximum over the ladder of
///   |∇_{εe} u(x)| / (ε^H sqrt(2 log log(1/ε)))
/// is divided by c |σ(u(x))|. Needs at least 6 ladder levels, all below
/// 1/e. Reported as QUALITATIVE with the fraction of anchors inside
/// [0.3, 3] in extras "fraction_in_band".
EnsembleStats lil_diagnostic(std::span<const double> values, const Grid &grid,
                             const ModelParams &params,
                             std::span<const double> e,
                             const std::vector<double> &eps_ladder,
                             const std::vector<std::size_t> &anchors);

/// Σ_{i<n} |p_{i+1} - p_i|^q over a path of n+1 samples.
double q_variation(std::span<const double> path, double q);

/// Samples the main diagonal x_i = (a_i, ..., a_i), a_i = A1 + i(A2-A1)/n,
/// i = 0..n. The step must be a multiple of h; points wrap on the torus.
std::vector<double> diagonal_transect(std::span<const double> values,
                                      const Grid &grid, double a1, double a2,
                                      std::size_t n);

/// Σ_j φ(p_j) |p_{j+1} - p_j|^q.
double weighted_variation(std::span<const double> path, double q,
                          const std::function<double(double)> &phi);

/// Weighted 1/H-variation against c_{1,4} √d ∫ φ(u) σ(u)^{1/H} da.
/// `paths` holds one diagonal transect per member sampled at the finest
/// level (n_max + 1 points over [A1, A2]); coarser levels subsample it.
/// `values` are per-member relative errors at the finest level; extras
/// carry the median relative error and mean variation per level.
EnsembleStats weighted_variation_test(
    const std::vector<std::vector<double>> &paths, const ModelParams &params,
    const EstimatorConfig &cfg, const std::function<double(double)> &phi);

/// Precomputed noise-response kernels for the localization experiment:
/// D_m(r) = G_m(r) - G_m(r - εe) for every slab lag m inside the largest
/// box, where G_m is the response of the scheme (see response_symbol).
class LocalizationKernels {
 public:
  LocalizationKernels(const Grid &grid, const ModelParams &params,
                      const SolverConfig &solver, const LocalizationConfig &loc,
                      std::span<const double> e);

  /// Squared localization error and squared gradient for one member:
  /// err[b] = (∇Z - ∇Z_loc(β_b))^2. `noise` holds every slab of the run.
  std::vector<double> member_errors(const FieldState &state,
                                    const std::vector<NoiseIncrement> &noise,
                                    double *gradient_sq = nullptr) const;

  std::size_t anchor() const { return anchor_; }
  const std::vector<double> &betas() const { return betas_; }

 private:
  Grid grid_;
  double dt_;
  std::int64_t steps_;
  double eps_;
  std::size_t anchor_;
  std::vector<double> betas_;
  std::vector<double> windows_;  // β ε^α
  std::vector<double> radii_;    // ε δ
  std::vector<double> e_;
  std::vector<std::vector<double>> diff_;  // D_m in lag layout
  std::vector<double> offset_norm_;        // ‖r‖ per lag index (torus)
};

/// Aggregates per-member squared errors into RMS errors per β and fits
/// log RMS error against log β. extras: "slope", "predicted_exponent"
/// ((d+2-α-γ)/(2α)), "rel_error_beta<j>", "slope_ci_low/high"
/// (block jackknife).
EnsembleStats localization_decay(
    const std::vector<std::vector<double>> &member_sq_errors,
    const std::vector<double> &member_grad_sq, const ModelParams &params,
    const LocalizationConfig &loc);

}  // namespace fracshe

#endif  // FRACSHE_ESTIMATORS_HPP_
