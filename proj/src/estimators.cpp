#include "fracshe/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/stats.hpp"

namespace fracshe {

namespace {

std::string indexed(const std::string &stem, std::size_t j) {
  return stem + std::to_string(j);
}

bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

}  // namespace

void validate(const EstimatorConfig &cfg, const Grid &grid) {
  const double h = grid.spacing;
  for (double eps : cfg.eps_ladder) {
    if (!near_integer(eps / h)) {
      std::ostringstream os;
      os << "eps = " << eps << " is not a multiple of h = " << h;
      throw ConfigurationError(os.str());
    }
    if (eps < 4.0 * h * (1.0 - 1e-12) || eps > grid.extent / 16.0 * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "eps = " << eps << " outside the resolved band [4h, L/16] = ["
         << 4.0 * h << ", " << grid.extent / 16.0 << "]";
      throw ResolutionError(os.str());
    }
  }
  for (const auto &e : cfg.probe_dirs) {
    if (static_cast<int>(e.size()) != grid.dim) {
      throw ConfigurationError("probe direction has the wrong dimension");
    }
    for (double eps : cfg.eps_ladder) lattice_shift(grid, e, eps);
  }
  for (std::size_t n : cfg.variation_levels) {
    if (n < 1 || (n & (n - 1)) != 0) {
      throw ConfigurationError("variation levels must be powers of two");
    }
  }
  if (!(cfg.a2 > cfg.a1)) throw ConfigurationError("interval needs A2 > A1");
  if (cfg.moment_order < 2 || cfg.moment_order % 2 != 0) {
    throw ConfigurationError("moment order must be an even integer >= 2");
  }
  if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) {
    throw ConfigurationError("significance must lie in (0, 1)");
  }
}

double localization_delta(double beta, double hurst) {
  return 1.0 + std::pow(beta, 1.0 + 1.0 / hurst);
}

void summarize(EnsembleStats &s) {
  s.mean = stats::mean(s.values);
  s.std_error = stats::standard_error(s.values);
}

std::array<int, 2> lattice_shift(const Grid &grid, std::span<const double> e,
                                 double eps) {
  if (static_cast<int>(e.size()) != grid.dim) {
    throw ConfigurationError("direction has the wrong dimension");
  }
  double norm = 0.0;
  for (double v : e) norm += v * v;
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-12) {
    throw ConfigurationError("probe direction must be a unit vector");
  }
  std::array<int, 2> shift{0, 0};
  for (int a = 0; a < grid.dim; ++a) {
    double steps = eps * e[a] / grid.spacing;
    if (!near_integer(steps)) {
      std::ostringstream os;
      os << "eps*e is not a lattice shift (component " << a << " is " << steps
         << " grid steps)";
      throw ConfigurationError(os.str());
    }
    shift[a] = static_cast<int>(std::lround(steps));
  }
  return shift;
}

double gradient(std::span<const double> values, const Grid &grid,
                std::size_t x, std::span<const double> e, double eps) {
  auto s = lattice_shift(grid, e, eps);
  std::array<int, 2> back{-s[0], -s[1]};
  return values[x] - values[grid.shifted(x, std::span<const int>(back.data(), grid.dim))];
}

double gradient(const FieldState &state, const Grid &grid, std::size_t x,
                std::span<const double> e, double eps) {
  return gradient(state.values, grid, x, e, eps);
}

GradientSample gradient_sample(const FieldState &state, const Grid &grid,
                               std::size_t x, std::span<const double> e,
                               const std::vector<double> &eps_ladder) {
  GradientSample g;
  g.u = state.values.at(x);
  for (double eps : eps_ladder) g.grad.push_back(gradient(state, grid, x, e, eps));
  return g;
}

EnsembleStats gradient_clt_test(const std::vector<GradientSample> &samples,
                                const ModelParams &params,
                                const EstimatorConfig &cfg,
                                const RngStream &aux) {
  validate(params);
  const double H = hurst(params);
  const double c = c_alpha_gamma_d(params).value;
  if (cfg.eps_ladder.empty()) throw ConfigurationError("empty eps ladder");

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (params.diffusion(samples[i].u) != 0.0) live.push_back(i);
  }
  if (live.size() < 2) {
    throw DegenerateTestError("sigma(u_t(x)) vanishes across the ensemble");
  }
  const std::size_t n = live.size();
  const std::size_t smallest = static_cast<std::size_t>(
      std::min_element(cfg.eps_ladder.begin(), cfg.eps_ladder.end()) -
      cfg.eps_ladder.begin());

  std::vector<double> noise(n);
  aux.normals(StreamTag::kAuxiliary, 0, noise);
  std::vector<double> u01(n);
  aux.uniforms(StreamTag::kAuxiliary, 1, u01);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(u01[i] * static_cast<double>(i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }

  EnsembleStats out;
  out.name = "clt";
  out.label = "QUANTITATIVE";
  std::vector<double> ks, logeps;
  for (std::size_t j = 0; j < cfg.eps_ladder.size(); ++j) {
    const double eps = cfg.eps_ladder[j];
    const double scale = std::pow(eps, -H);
    std::vector<double> t(n), x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto &s = samples[live[k]];
      const double sig = params.diffusion(s.u);
      x[k] = scale * s.grad.at(j);
      t[k] = x[k] / (c * sig);
      y[k] = c * sig * noise[k];
    }
    double d = stats::ks_statistic(t, stats::normal_cdf);
    double dmix = stats::ks_two_sample(x, y);
    out.extras[indexed("ks_eps", j)] = d;
    out.extras[indexed("ks_mix_eps", j)] = dmix;
    out.extras[indexed("std_ratio_eps", j)] = std::sqrt(stats::variance(t));
    ks.push_back(d);
    logeps.push_back(std::log(eps));
    if (j == smallest) {
      out.values = t;
      std::vector<double> shuffled(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double sig = params.diffusion(samples[live[perm[k]]].u);
        shuffled[k] = x[k] / (c * sig);
      }
      out.extras["ks_smallest"] = d;
      out.extras["ks_mix_smallest"] = dmix;
      out.extras["ks_shuffled"] = stats::ks_statistic(shuffled, stats::normal_cdf);
      out.extras["p_value_smallest"] = 1.0 - stats::kolmogorov_cdf(n, d);
      out.extras["std_ratio_smallest"] = std::sqrt(stats::variance(t));
    }
  }
  out.extras["ks_critical"] = stats::ks_critical_value(n, cfg.significance);
  out.extras["members"] = static_cast<double>(n);
  out.extras["eps_smallest"] = cfg.eps_ladder[smallest];
  if (ks.size() >= 2) {
    // Positive slope: the distance shrinks toward small ε.
    out.extras["ks_trend_slope"] = stats::linear_fit(logeps, ks).slope;
  }
  summarize(out);
  return out;
}

EnsembleStats lil_diagnostic(std::span<const double> values, const Grid &grid,
                             const ModelParams &params,
                             std::span<const double> e,
                             const std::vector<double> &eps_ladder,
                             const std::vector<std::size_t> &anchors) {
  validate(params);
  if (eps_ladder.size() < 6) {
    throw ConfigurationError("LIL diagnostic needs a ladder of at least 6 levels");
  }
  for (double eps : eps_ladder) {
    if (!(eps < std::exp(-1.0))) {
      throw ConfigurationError("LIL ladder needs eps < 1/e so log log(1/eps) > 0");
    }
  }
  const double H = hurst(params);
  const double c = c_alpha_gamma_d(params).value;
  EnsembleStats out;
  out.name = "lil";
  out.label = "QUALITATIVE";
  std::size_t inside = 0;
  for (std::size_t x : anchors) {
    const double sig = std::abs(params.diffusion(values[x]));
    if (sig == 0.0) continue;
    double best = 0.0;
    for (double eps : eps_ladder) {
      double r = std::abs(gradient(values, grid, x, e, eps)) /
                 (std::pow(eps, H) * std::sqrt(2.0 * std::log(std::log(1.0 / eps))));
      best = std::max(best, r);
    }
    double v = best / (c * sig);
    out.values.push_back(v);
    if (v >= 0.3 && v <= 3.0) ++inside;
  }
  if (out.values.empty()) {
    throw DegenerateTestError(
        "sigma(u) vanishes at every anchor; normalized maximum undefined");
  }
  out.extras["fraction_in_band"] =
      static_cast<double>(inside) / static_cast<double>(out.values.size());
  out.extras["band_low"] = 0.3;
  out.extras["band_high"] = 3.0;
  out.extras["anchors"] = static_cast<double>(out.values.size());
  out.extras["levels"] = static_cast<double>(eps_ladder.size());
  out.extras["median_normalized_max"] = stats::median(out.values);
  summarize(out);
  return out;
}

double q_variation(std::span<const double> path, double q) {
  if (path.size() < 2) throw ConfigurationError("q-variation needs n >= 1");
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    v += std::pow(std::abs(path[i + 1] - path[i]), q);
  }
  return v;
}

std::vector<double> diagonal_transect(std::span<const double> values,
                                      const Grid &grid, double a1, double a2,
                                      std::size_t n) {
  if (n < 1) throw ConfigurationError("transect needs n >= 1");
  if (!(a2 > a1)) throw ConfigurationError("transect needs A2 > A1");
  if (a2 - a1 > grid.extent * (1.0 + 1e-12)) {
    throw ConfigurationError("transect longer than the torus");
  }
  const double step = (a2 - a1) / static_cast<double>(n) / grid.spacing;
  const double start = (a1 + 0.5 * grid.extent) / grid.spacing;
  if (!near_integer(step) || !near_integer(start)) {
    std::ostringstream os;
    os << "transect with " << n << " intervals is off the grid (step "
       << step << " h); refine the grid or lower the level";
    throw ConfigurationError(os.str());
  }
  const long s = std::lround(step), i0 = std::lround(start);
  std::vector<double> path(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    int idx = static_cast<int>(i0 + static_cast<long>(i) * s);
    std::array<int, 2> multi{idx, idx};
    path[i] = values[grid.flat_index(std::span<const int>(multi.data(), grid.dim))];
  }
  return path;
}

double weighted_variation(std::span<const double> path, double q,
                          const std::function<double(double)> &phi) {
  if (path.size() < 2) throw ConfigurationError("variation needs n >= 1");
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    v += phi(path[i]) * std::pow(std::abs(path[i + 1] - path[i]), q);
  }
  return v;
}

EnsembleStats weighted_variation_test(
    const std::vector<std::vector<double>> &paths, const ModelParams &params,
    const EstimatorConfig &cfg, const std::function<double(double)> &phi) {
  validate(params);
  if (paths.empty()) throw ConfigurationError("no paths");
  if (cfg.variation_levels.empty()) throw ConfigurationError("no variation levels");
  const double H = hurst(params);
  const double q = 1.0 / H;
  const double c14v = c14(params).value;
  const std::size_t finest = paths.front().size() - 1;
  std::vector<std::size_t> levels = cfg.variation_levels;
  std::sort(levels.begin(), levels.end());
  for (std::size_t n : levels) {
    if (n > finest || finest % n != 0) {
      std::ostringstream os;
      os << "variation level " << n << " exceeds the sampled resolution "
         << finest;
      throw ConfigurationError(os.str());
    }
  }
  const double da = (cfg.a2 - cfg.a1) / static_cast<double>(finest);
  const double root_d = std::sqrt(static_cast<double>(params.dim));

  EnsembleStats out;
  out.name = "variation";
  out.label = "QUANTITATIVE";
  std::vector<std::vector<double>> per_level(levels.size());
  std::vector<double> limits;
  for (const auto &p : paths) {
    if (p.size() != finest + 1) throw ConfigurationError("paths differ in length");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const std::size_t stride = finest / levels[l];
      std::vector<double> sub;
      for (std::size_t i = 0; i <= finest; i += stride) sub.push_back(p[i]);
      per_level[l].push_back(weighted_variation(sub, q, phi));
    }
    // Trapezoid rule for ∫ φ(u) σ(u)^{1/H} da on the finest samples.
    double integral = 0.0;
    for (std::size_t i = 0; i <= finest; ++i) {
      double f = phi(p[i]) * std::pow(std::abs(params.diffusion(p[i])), q);
      integral += (i == 0 || i == finest) ? 0.5 * f : f;
    }
    integral *= da;
    const double limit = c14v * root_d * integral;
    limits.push_back(limit);
    const double v = per_level.back().back();
    out.values.push_back(limit != 0.0 ? std::abs(v - limit) / std::abs(limit)
                                      : std::abs(v));
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    out.extras["mean_variation_n" + std::to_string(levels[l])] =
        stats::mean(per_level[l]);
  }
  out.extras["mean_limit"] = stats::mean(limits);
  out.extras["median_rel_error"] = stats::median(out.values);
  out.extras["c14"] = c14v;
  out.extras["finest_level"] = static_cast<double>(levels.back());
  {
    // Relative error of the ensemble mean against the mean limit.
    const double mv = stats::mean(per_level.back());
    const double ml = stats::mean(limits);
    out.extras["mean_rel_error"] = std::abs(mv - ml) / std::abs(ml);
    out.extras["mean_variation_stderr"] = stats::standard_error(per_level.back());
  }
  summarize(out);
  return out;
}

LocalizationKernels::LocalizationKernels(const Grid &grid,
                                         const ModelParams &params,
                                         const SolverConfig &solver,
                                         const LocalizationConfig &loc,
                                         std::span<const double> e)
    : grid_(grid),
      dt_(solver.dt),
      steps_(step_of(loc.anchor_t, solver.dt)),
      eps_(loc.eps),
      betas_(loc.beta_ladder),
      e_(e.begin(), e.end()) {
  validate(params);
  if (betas_.empty()) throw ConfigurationError("empty beta ladder");
  const double H = hurst(params);
  if (static_cast<int>(loc.anchor_x.size()) != grid.dim) {
    throw ConfigurationError("localization anchor has the wrong dimension");
  }
  std::array<int, 2> idx{0, 0};
  for (int a = 0; a < grid.dim; ++a) {
    double i = (loc.anchor_x[a] + 0.5 * grid.extent) / grid.spacing;
    if (!near_integer(i)) throw ConfigurationError("anchor is not a grid point");
    idx[a] = static_cast<int>(std::lround(i));
  }
  anchor_ = grid.flat_index(std::span<const int>(idx.data(), grid.dim));
  auto shift = lattice_shift(grid, e, eps_);

  double max_window = 0.0;
  for (double b : betas_) {
    if (!(b > 1.0)) throw ConfigurationError("every beta must exceed 1");
    const double window = b * std::pow(eps_, params.alpha);
    const double radius = eps_ * localization_delta(b, H);
    if (window > loc.anchor_t) {
      throw ConfigurationError("box [t - beta eps^alpha, t] starts before time 0");
    }
    if (radius + eps_ > 0.5 * grid.extent) {
      std::ostringstream os;
      os << "box radius eps*delta = " << radius << " at beta = " << b
         << " does not fit in the torus of extent " << grid.extent;
      throw ConfigurationError(os.str());
    }
    windows_.push_back(window);
    radii_.push_back(radius);
    max_window = std::max(max_window, window);
  }

  offset_norm_.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto p = grid.point_index(j);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      int k = p[a] < grid.points_per_axis / 2 ? p[a] : p[a] - grid.points_per_axis;
      double r = k * grid.spacing;
      r2 += r * r;
    }
    offset_norm_[j] = std::sqrt(r2);
  }

  SpectralTransform tr(grid);
  const double scale = static_cast<double>(grid.size()) / grid.box_volume();
  std::array<int, 2> back{-shift[0], -shift[1]};
  for (std::int64_t m = 0; m < steps_; ++m) {
    if ((static_cast<double>(m) + 0.5) * dt_ > max_window) break;
    auto sym = response_symbol(grid, params.alpha, dt_, solver.scheme, m);
    std::vector<std::complex<double>> spec(sym.size());
    for (std::size_t k = 0; k < sym.size(); ++k) spec[k] = sym[k] * scale;
    std::vector<double> kern(grid.size());
    tr.backward(spec, kern);
    std::vector<double> d(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      d[j] = kern[j] - kern[grid.shifted(j, std::span<const int>(back.data(), grid.dim))];
    }
    diff_.push_back(std::move(d));
  }
}

std::vector<double> LocalizationKernels::member_errors(
    const FieldState &state, const std::vector<NoiseIncrement> &noise,
    double *gradient_sq) const {
  if (state.step != steps_) {
    throw ConfigurationError("localization state is not at the anchor time");
  }
  if (static_cast<std::int64_t>(noise.size()) < steps_) {
    throw ConfigurationError("localization needs the stored noise of every slab");
  }
  const double grad = gradient(state, grid_, anchor_, e_, eps_);
  if (gradient_sq) *gradient_sq = grad * grad;
  const double hd = grid_.cell_volume();
  std::vector<double> out(betas_.size());
  for (std::size_t b = 0; b < betas_.size(); ++b) {
    double local = 0.0;
    for (std::size_t m = 0; m < diff_.size(); ++m) {
      if ((static_cast<double>(m) + 0.5) * dt_ > windows_[b]) break;
      const auto &w = noise[static_cast<std::size_t>(steps_ - 1 - static_cast<std::int64_t>(m))].values;
      const auto &d = diff_[m];
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (offset_norm_[j] > radii_[b] + 1e-12) continue;
        // y = x - r
        auto p = grid_.point_index(j);
        std::array<int, 2> neg{-p[0], -p[1]};
        local += d[j] * w[grid_.shifted(anchor_, std::span<const int>(neg.data(), grid_.dim))];
      }
    }
    local *= hd;
    out[b] = (grad - local) * (grad - local);
  }
  return out;
}

EnsembleStats localization_decay(
    const std::vector<std::vector<double>> &member_sq_errors,
    const std::vector<double> &member_grad_sq, const ModelParams &params,
    const LocalizationConfig &loc) {
  validate(params);
  const std::size_t members = member_sq_errors.size();
  const std::size_t nb = loc.beta_ladder.size();
  if (members < 2) throw ConfigurationError("localization needs an ensemble");
  if (nb < 2) throw ConfigurationError("localization needs at least 2 betas");

  auto fit = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> lx, ly;
    for (std::size_t b = 0; b < nb; ++b) {
      double s = 0.0;
      std::size_t c = 0;
      for (std::size_t i = 0; i < members; ++i) {
        if (i >= lo && i < hi) continue;
        s += member_sq_errors[i][b];
        ++c;
      }
      lx.push_back(std::log(loc.beta_ladder[b]));
      ly.push_back(0.5 * std::log(s / static_cast<double>(c)));
    }
    return stats::linear_fit(lx, ly);
  };
  auto full = fit(0, 0);
  const double se = stats::block_jackknife_stderr(
      members, 20, [&](std::size_t lo, std::size_t hi) { return fit(lo, hi).slope; });

  EnsembleStats out;
  out.name = "localize";
  out.label = "QUANTITATIVE";
  const double grad_rms = std::sqrt(stats::mean(member_grad_sq));
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (const auto &row : member_sq_errors) s += row[b];
    const double rms = std::sqrt(s / static_cast<double>(members));
    out.values.push_back(rms);
    out.extras[indexed("rel_error_beta", b)] = rms / grad_rms;
  }
  const double d = params.dim;
  out.extras["slope"] = full.slope;
  out.extras["slope_ci_low"] = full.slope - 1.96 * se;
  out.extras["slope_ci_high"] = full.slope + 1.96 * se;
  out.extras["predicted_exponent"] =
      (d + 2.0 - params.alpha - params.gamma) / (2.0 * params.alpha);
  out.extras["gradient_rms"] = grad_rms;
  out.extras["rel_error_largest_beta"] = out.values.back() / grad_rms;
  out.extras["eps"] = loc.eps;
  summarize(out);
  return out;
}

}  // namespace fracshe
