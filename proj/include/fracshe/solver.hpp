#ifndef FRACSHE_SOLVER_HPP_
#define FRACSHE_SOLVER_HPP_

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fracshe/model.hpp"
#include "fracshe/noise.hpp"
#include "fracshe/rng.hpp"
#include "fracshe/spectral_grid.hpp"

namespace fracshe {

/// exp_euler:     u_{n+1} = S_dt (u_n + dt b(u_n) + σ(u_n) W_n)
/// exp_euler_ou:  u_{n+1} = S_dt (u_n + dt b(u_n)) + Q_dt (σ(u_n) W_n)
///
/// S_dt has symbol e^{-dt a}, a = ‖ξ‖^α. Q_dt has symbol
/// sqrt((1 - e^{-2 dt a}) / (2 dt a)), so that a frozen-coefficient
/// Ornstein-Uhlenbeck mode receives exactly its integrated variance over
/// the slab instead of the left-point value. The two agree to first order
/// in dt a; they differ on modes the time step does not resolve.
enum class Scheme { kExpEuler, kExpEulerOu };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string &name);

struct SolverConfig {
  double dt = 1.0 / 512;
  double t_end = 1.0;
  Scheme scheme = Scheme::kExpEuler;
  std::vector<double> record_times;
  bool store_noise = false;
};

/// Throws ConfigurationError unless dt > 0, t_end is a multiple of dt,
/// dt ≤ t_end and every record time is a multiple of dt in [0, t_end].
void validate(const SolverConfig &cfg);

/// Step index of a time that is a multiple of dt.
std::int64_t step_of(double t, double dt);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t member = 0;
  Scheme scheme = Scheme::kExpEuler;
};

struct FieldState {
  double t = 0.0;
  std::vector<double> values;
  std::int64_t step = 0;
  Provenance provenance;
};

inline constexpr double kBlowUpThreshold = 1e12;

/// Initial field per params.init, drawn (for random data) from the
/// kInitialData tag of `stream`.
std::vector<double> initial_field(const Grid &grid, const ModelParams &params,
                                  const RngStream &stream);

/// Per-mode symbol of the noise response after `lag` further steps:
/// noise injected in slab n contributes to u_{n+1+lag} through this
/// multiplier. Half-spectrum layout.
std::vector<double> response_symbol(const Grid &grid, double alpha, double dt,
                                    Scheme scheme, std::int64_t lag);

/// Stepper bound to one (params, grid, cfg). Holds transform workspaces;
/// not thread-safe, use one per thread.
class Solver {
 public:
  Solver(const ModelParams &params, const Grid &grid, const SolverConfig &cfg);
  ~Solver();
  Solver(Solver &&) noexcept;
  Solver &operator=(Solver &&) noexcept;

  FieldState initial_state(const RngStream &stream) const;

  /// Advances `state` by one step with the given noise slab. Throws
  /// BlowUpError if the result is non-finite or exceeds 1e12 in size.
  void step(FieldState &state, const NoiseIncrement &noise);

  /// Runs from the initial state to t_end and returns the states at the
  /// record times (in increasing order). When cfg.store_noise is set and
  /// `noise_out` is non-null, every slab is appended to it.
  std::vector<FieldState> simulate(const RngStream &stream,
                                   std::vector<NoiseIncrement> *noise_out = nullptr);

  const ModelParams &params() const;
  const Grid &grid() const;
  const SolverConfig &config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FieldState step(const FieldState &state, const NoiseIncrement &noise,
                const ModelParams &params, const Grid &grid,
                const SolverConfig &cfg);

std::vector<FieldState> simulate(const ModelParams &params, const Grid &grid,
                                 const SolverConfig &cfg,
                                 const RngStream &stream);

/// Exact second moments of the linear scheme (b = 0, σ = 1, u_0 = 0)
/// after `steps` steps, by propagating the per-mode variance through the
/// scheme. Entry m of the result is v_m with
///   E[Z(x) Z(x + r)] = L^{-d} Σ_full S_k v_k cos(ξ_k · r).
std::vector<double> linear_mode_variance(const Grid &grid,
                                         const ModelParams &params, double dt,
                                         Scheme scheme, std::int64_t steps);

/// E[Z_t(x)^2] of the discrete linear scheme.
double linear_variance(const Grid &grid, const ModelParams &params, double dt,
                       Scheme scheme, std::int64_t steps);

/// E[(Z_t(x) - Z_t(x - r))^2] of the discrete linear scheme, r a vector.
double linear_increment_variance(const Grid &grid, const ModelParams &params,
                                 double dt, Scheme scheme, std::int64_t steps,
                                 std::span<const double> r);

/// Continuum value E[Z_t(x)^2] = (2π)^{-d} c_{2,1} t^{1-(d-γ)/α}/(1-(d-γ)/α).
double continuum_variance(const ModelParams &params, double t);

/// Probe layout for the Hölder regression.
struct HolderProbe {
  std::vector<int> space_lags;            ///< in grid steps along `axis`
  std::size_t base_record = 0;            ///< index of t in the record list
  std::vector<std::size_t> time_records;  ///< indices of t + τ
  std::vector<std::size_t> anchors;       ///< flat grid indices
  int axis = 0;
};

/// Per-member mean squared increments over the probe anchors.
struct HolderSample {
  std::vector<double> space;  ///< one per space lag
  std::vector<double> time;   ///< one per time record
};

HolderSample holder_sample(const std::vector<FieldState> &states,
                           const Grid &grid, const HolderProbe &probe);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;   ///< 95% block-jackknife interval
  double ci_high = 0.0;
};

struct HolderReport {
  SlopeFit space;  ///< log E|Δ_r u|^2 against log r
  SlopeFit time;   ///< log E|Δ_τ u|^2 against log τ
  double space_exponent = 0.0;  ///< space.slope / 2
  double time_exponent = 0.0;   ///< time.slope / 2
  std::vector<double> space_lags, time_lags;
  std::vector<double> space_moments, time_moments;
};

/// Fits the spatial and temporal Hölder exponents from per-member samples.
/// Needs at least 2 space lags and 2 time lags; lags below 2h (space) or
/// above L/8 raise ResolutionError.
HolderReport holder_scaling_report(const std::vector<HolderSample> &samples,
                                   const Grid &grid,
                                   const std::vector<double> &record_times,
                                   const HolderProbe &probe);

/// Same, from a full recorded ensemble (one state list per member).
HolderReport holder_scaling_report(
    const std::vector<std::vector<FieldState>> &ensemble,
    const ModelParams &params, const Grid &grid, const HolderProbe &probe);

}  // namespace fracshe

#endif  // FRACSHE_SOLVER_HPP_
