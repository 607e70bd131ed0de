#include "fracshe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/stats.hpp"

namespace fracshe {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kExpEuler ? "exp_euler" : "exp_euler_ou";
}

Scheme scheme_from_string(const std::string &name) {
  if (name == "exp_euler") return Scheme::kExpEuler;
  if (name == "exp_euler_ou") return Scheme::kExpEulerOu;
  throw ConfigurationError("unknown scheme '" + name +
                           "' (expected exp_euler or exp_euler_ou)");
}

std::int64_t step_of(double t, double dt) {
  return static_cast<std::int64_t>(std::llround(t / dt));
}

namespace {

bool is_multiple(double t, double dt) {
  double k = std::round(t / dt);
  return std::abs(t - k * dt) <= 1e-9 * std::max(1.0, std::abs(t));
}

// Symbol of Q_dt: sqrt((1 - e^{-2 dt a}) / (2 dt a)), 1 at a = 0.
double ou_filter(double dta) {
  if (dta < 1e-8) return std::sqrt(1.0 - dta);
  return std::sqrt(-std::expm1(-2.0 * dta) / (2.0 * dta));
}

void check_field(std::span<const double> u, std::int64_t step) {
  for (double v : u) {
    if (!std::isfinite(v) || std::abs(v) > kBlowUpThreshold) {
      std::ostringstream os;
      os << "solution blew up at step " << step << " (|u| = " << std::abs(v)
         << ")";
      throw BlowUpError(os.str(), step);
    }
  }
}

}  // namespace

void validate(const SolverConfig &cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw ConfigurationError("solver dt must be positive");
  }
  if (!(cfg.t_end >= cfg.dt)) {
    throw ConfigurationError("solver requires dt <= t_end");
  }
  if (!is_multiple(cfg.t_end, cfg.dt)) {
    throw ConfigurationError("t_end must be a multiple of dt");
  }
  for (double t : cfg.record_times) {
    if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12)) {
      throw ConfigurationError("record time outside [0, t_end]");
    }
    if (!is_multiple(t, cfg.dt)) {
      std::ostringstream os;
      os << "record time " << t << " is not a multiple of dt = " << cfg.dt;
      throw ConfigurationError(os.str());
    }
  }
}

std::vector<double> initial_field(const Grid &grid, const ModelParams &params,
                                  const RngStream &stream) {
  std::vector<double> u(grid.size(), 0.0);
  const InitSpec &init = params.init;
  switch (init.kind) {
    case InitKind::kZero:
      break;
    case InitKind::kConstant:
      std::fill(u.begin(), u.end(), init.value);
      break;
    case InitKind::kBump:
      for (std::size_t i = 0; i < u.size(); ++i) {
        auto idx = grid.point_index(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
          double x = grid.coordinate(idx[a]);
          r2 += x * x;
        }
        u[i] = init.value * std::exp(-r2 / (2.0 * init.width * init.width));
      }
      break;
    case InitKind::kHolder: {
      // Gaussian field with spectral density (1 + ‖ξ‖²)^{-(d/2 + η)},
      // locally η-Hölder, rescaled to marginal standard deviation `value`.
      SpectralTransform tr(grid);
      std::vector<double> w(grid.size());
      stream.normals(StreamTag::kInitialData, 0, w);
      std::vector<std::complex<double>> spec(grid.spectral_size());
      tr.forward(w, spec);
      auto norms = grid.frequency_norms();
      const double power = -(0.5 * grid.dim + init.holder);
      double var = 0.0;
      for (std::size_t m = 0; m < spec.size(); ++m) {
        double rho = std::pow(1.0 + norms[m] * norms[m], power);
        var += grid.multiplicity(m) * rho;
        spec[m] *= std::sqrt(rho);
      }
      var /= static_cast<double>(grid.size());
      tr.backward(spec, u);
      const double scale = init.value / std::sqrt(var);
      for (double &v : u) v *= scale;
      break;
    }
  }
  return u;
}

std::vector<double> response_symbol(const Grid &grid, double alpha, double dt,
                                    Scheme scheme, std::int64_t lag) {
  auto norms = grid.frequency_norms();
  std::vector<double> out(norms.size());
  for (std::size_t m = 0; m < norms.size(); ++m) {
    double a = std::pow(norms[m], alpha);
    out[m] = scheme == Scheme::kExpEulerOu
                 ? std::exp(-static_cast<double>(lag) * dt * a) * ou_filter(dt * a)
                 : std::exp(-static_cast<double>(lag + 1) * dt * a);
  }
  return out;
}

struct Solver::Impl {
  ModelParams params;
  Grid grid;
  SolverConfig cfg;
  SpectralTransform transform;
  NoiseSampler sampler;
  std::vector<double> decay;   // e^{-dt a}
  std::vector<double> filter;  // Q_dt symbol (1 for exp_euler)
  std::vector<double> work, work2;
  std::vector<std::complex<double>> spec, spec2;

  Impl(const ModelParams &p, const Grid &g, const SolverConfig &c)
      : params(p), grid(g), cfg(c), transform(g), sampler(g, p),
        work(g.size()), work2(g.size()), spec(g.spectral_size()),
        spec2(g.spectral_size()) {
    auto norms = g.frequency_norms();
    decay.resize(norms.size());
    filter.resize(norms.size());
    for (std::size_t m = 0; m < norms.size(); ++m) {
      double dta = c.dt * std::pow(norms[m], p.alpha);
      decay[m] = std::exp(-dta);
      filter[m] = c.scheme == Scheme::kExpEulerOu ? ou_filter(dta) : 1.0;
    }
  }

  void step(FieldState &state, std::span<const double> noise) {
    auto &u = state.values;
    const double dt = cfg.dt;
    if (cfg.scheme == Scheme::kExpEuler) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        work[i] = u[i] + dt * params.drift(u[i]) +
                  params.diffusion(u[i]) * noise[i];
      }
      transform.forward(work, spec);
      for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= decay[m];
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) {
        work[i] = u[i] + dt * params.drift(u[i]);
        work2[i] = params.diffusion(u[i]) * noise[i];
      }
      transform.forward(work, spec);
      transform.forward(work2, spec2);
      for (std::size_t m = 0; m < spec.size(); ++m) {
        spec[m] = decay[m] * spec[m] + filter[m] * spec2[m];
      }
    }
    transform.backward(spec, u);
    state.step += 1;
    state.t = static_cast<double>(state.step) * dt;
    check_field(u, state.step);
  }
};

Solver::Solver(const ModelParams &params, const Grid &grid,
               const SolverConfig &cfg) {
  validate(params);
  validate(cfg);
  impl_ = std::make_unique<Impl>(params, grid, cfg);
}

Solver::~Solver() = default;
Solver::Solver(Solver &&) noexcept = default;
Solver &Solver::operator=(Solver &&) noexcept = default;

const ModelParams &Solver::params() const { return impl_->params; }
const Grid &Solver::grid() const { return impl_->grid; }
const SolverConfig &Solver::config() const { return impl_->cfg; }

FieldState Solver::initial_state(const RngStream &stream) const {
  FieldState s;
  s.values = initial_field(impl_->grid, impl_->params, stream);
  s.provenance = {stream.seed, stream.member, impl_->cfg.scheme};
  return s;
}

void Solver::step(FieldState &state, const NoiseIncrement &noise) {
  if (std::abs(noise.dt - impl_->cfg.dt) > 1e-15 * impl_->cfg.dt) {
    throw ConfigurationError("noise slab dt does not match solver dt");
  }
  if (noise.values.size() != state.values.size()) {
    throw ConfigurationError("noise slab does not match the grid");
  }
  impl_->step(state, noise.values);
}

std::vector<FieldState> Solver::simulate(const RngStream &stream,
                                         std::vector<NoiseIncrement> *noise_out) {
  Impl &s = *impl_;
  const SolverConfig &cfg = s.cfg;
  const std::int64_t total = step_of(cfg.t_end, cfg.dt);
  std::vector<std::int64_t> records;
  for (double t : cfg.record_times) records.push_back(step_of(t, cfg.dt));
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
  const bool keep_noise = cfg.store_noise && noise_out != nullptr;

  std::vector<FieldState> out;
  FieldState state = initial_state(stream);
  auto next = records.begin();
  auto record = [&](const FieldState &st) {
    while (next != records.end() && *next == st.step) {
      out.push_back(st);
      ++next;
    }
  };
  record(state);

  const bool spectral = s.params.drift.is_constant() &&
                        s.params.diffusion.is_constant();
  if (!spectral) {
    NoiseIncrement inc;
    inc.dt = cfg.dt;
    inc.values.resize(s.grid.size());
    for (std::int64_t n = 0; n < total; ++n) {
      s.sampler.sample_into(cfg.dt, stream, static_cast<std::uint64_t>(n),
                            inc.values);
      inc.seed_path = {stream.seed, stream.member, static_cast<std::uint64_t>(n)};
      s.step(state, inc.values);
      if (keep_noise) noise_out->push_back(inc);
      record(state);
    }
    return out;
  }

  // Constant b and σ: the scheme is linear in u, so the state can stay in
  // the transform domain between records.
  const double b = s.params.drift(0.0);
  const double sigma = s.params.diffusion(0.0);
  const double dc = cfg.dt * b * static_cast<double>(s.grid.size());
  std::vector<std::complex<double>> uhat(s.grid.spectral_size());
  std::vector<std::complex<double>> what(s.grid.spectral_size());
  s.transform.forward(state.values, uhat);
  const bool ou = cfg.scheme == Scheme::kExpEulerOu;
  for (std::int64_t n = 0; n < total; ++n) {
    s.sampler.spectral_into(cfg.dt, stream, static_cast<std::uint64_t>(n), what);
    uhat[0] += dc;
    for (std::size_t m = 0; m < uhat.size(); ++m) {
      uhat[m] = ou ? s.decay[m] * uhat[m] + s.filter[m] * sigma * what[m]
                   : s.decay[m] * (uhat[m] + sigma * what[m]);
    }
    if (!std::isfinite(uhat[0].real()) || !std::isfinite(uhat[0].imag())) {
      throw BlowUpError("solution blew up at step " + std::to_string(n + 1), n + 1);
    }
    state.step = n + 1;
    state.t = static_cast<double>(state.step) * cfg.dt;
    if (keep_noise) {
      NoiseIncrement inc;
      inc.dt = cfg.dt;
      inc.values.resize(s.grid.size());
      inc.seed_path = {stream.seed, stream.member, static_cast<std::uint64_t>(n)};
      s.sampler.sample_into(cfg.dt, stream, static_cast<std::uint64_t>(n),
                            inc.values);
      noise_out->push_back(std::move(inc));
    }
    if (next != records.end() && *next == state.step) {
      s.transform.backward(uhat, state.values);
      check_field(state.values, state.step);
      record(state);
    }
  }
  return out;
}

FieldState step(const FieldState &state, const NoiseIncrement &noise,
                const ModelParams &params, const Grid &grid,
                const SolverConfig &cfg) {
  Solver solver(params, grid, cfg);
  FieldState next = state;
  solver.step(next, noise);
  return next;
}

std::vector<FieldState> simulate(const ModelParams &params, const Grid &grid,
                                 const SolverConfig &cfg,
                                 const RngStream &stream) {
  Solver solver(params, grid, cfg);
  return solver.simulate(stream);
}

std::vector<double> linear_mode_variance(const Grid &grid,
                                         const ModelParams &params, double dt,
                                         Scheme scheme, std::int64_t steps) {
  auto norms = grid.frequency_norms();
  std::vector<double> v(norms.size());
  const double t = static_cast<double>(steps) * dt;
  for (std::size_t m = 0; m < norms.size(); ++m) {
    const double a = std::pow(norms[m], params.alpha);
    if (a == 0.0) {
      v[m] = t;
      continue;
    }
    const double rN = std::exp(-2.0 * t * a);
    if (scheme == Scheme::kExpEulerOu) {
      v[m] = (1.0 - rN) / (2.0 * a);
    } else {
      // dt Σ_{j=1}^{N} r^j with r = e^{-2 dt a}
      const double r = std::exp(-2.0 * dt * a);
      v[m] = dt * r * (1.0 - rN) / (-std::expm1(-2.0 * dt * a));
    }
  }
  return v;
}

double linear_variance(const Grid &grid, const ModelParams &params, double dt,
                       Scheme scheme, std::int64_t steps) {
  auto v = linear_mode_variance(grid, params, dt, scheme, steps);
  auto w = spectral_weights(grid, params.gamma);
  double sum = 0.0;
  for (std::size_t m = 0; m < v.size(); ++m) sum += grid.multiplicity(m) * w[m] * v[m];
  return sum / grid.box_volume();
}

double linear_increment_variance(const Grid &grid, const ModelParams &params,
                                 double dt, Scheme scheme, std::int64_t steps,
                                 std::span<const double> r) {
  auto v = linear_mode_variance(grid, params, dt, scheme, steps);
  auto w = spectral_weights(grid, params.gamma);
  const double dk = grid.frequency_step();
  double sum = 0.0;
  for (std::size_t m = 0; m < v.size(); ++m) {
    auto k = grid.wave_index(m);
    double phase = 0.0;
    for (int a = 0; a < grid.dim; ++a) phase += dk * k[a] * r[a];
    sum += grid.multiplicity(m) * w[m] * v[m] * 2.0 * (1.0 - std::cos(phase));
  }
  return sum / grid.box_volume();
}

double continuum_variance(const ModelParams &params, double t) {
  const double e = 1.0 - (params.dim - params.gamma) / params.alpha;
  return c21(params).value / std::pow(2.0 * std::numbers::pi, params.dim) *
         std::pow(t, e) / e;
}

HolderSample holder_sample(const std::vector<FieldState> &states,
                           const Grid &grid, const HolderProbe &probe) {
  if (probe.base_record >= states.size()) {
    throw ConfigurationError("holder probe: base record out of range");
  }
  const auto &base = states[probe.base_record].values;
  HolderSample hs;
  for (int lag : probe.space_lags) {
    std::array<int, 2> shift{0, 0};
    shift[probe.axis] = -lag;
    double s = 0.0;
    for (std::size_t x : probe.anchors) {
      double d = base[x] - base[grid.shifted(x, std::span<const int>(shift.data(), grid.dim))];
      s += d * d;
    }
    hs.space.push_back(s / static_cast<double>(probe.anchors.size()));
  }
  for (std::size_t rec : probe.time_records) {
    if (rec >= states.size()) {
      throw ConfigurationError("holder probe: time record out of range");
    }
    const auto &later = states[rec].values;
    double s = 0.0;
    for (std::size_t x : probe.anchors) {
      double d = later[x] - base[x];
      s += d * d;
    }
    hs.time.push_back(s / static_cast<double>(probe.anchors.size()));
  }
  return hs;
}

namespace {

SlopeFit fit_with_jackknife(const std::vector<HolderSample> &samples,
                            const std::vector<double> &lags, bool space) {
  auto fit_excluding = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < lags.size(); ++j) {
      double s = 0.0;
      std::size_t c = 0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i >= lo && i < hi) continue;
        s += space ? samples[i].space[j] : samples[i].time[j];
        ++c;
      }
      lx.push_back(std::log(lags[j]));
      ly.push_back(std::log(s / static_cast<double>(c)));
    }
    return stats::linear_fit(lx, ly);
  };
  auto full = fit_excluding(0, 0);
  double se = stats::block_jackknife_stderr(
      samples.size(), 20,
      [&](std::size_t lo, std::size_t hi) { return fit_excluding(lo, hi).slope; });
  SlopeFit f;
  f.slope = full.slope;
  f.intercept = full.intercept;
  f.ci_low = full.slope - 1.96 * se;
  f.ci_high = full.slope + 1.96 * se;
  return f;
}

}  // namespace

HolderReport holder_scaling_report(const std::vector<HolderSample> &samples,
                                   const Grid &grid,
                                   const std::vector<double> &record_times,
                                   const HolderProbe &probe) {
  if (probe.space_lags.size() < 2 || probe.time_records.size() < 2) {
    throw ConfigurationError("holder regression needs >= 2 space and time lags");
  }
  if (samples.size() < 2) throw ConfigurationError("holder regression needs an ensemble");
  HolderReport rep;
  for (int lag : probe.space_lags) {
    double r = lag * grid.spacing;
    if (lag < 2 || r > grid.extent / 8.0) {
      std::ostringstream os;
      os << "space lag " << r << " outside the resolved band [2h, L/8]";
      throw ResolutionError(os.str());
    }
    rep.space_lags.push_back(r);
  }
  for (std::size_t rec : probe.time_records) {
    double tau = record_times.at(rec) - record_times.at(probe.base_record);
    if (!(tau > 0.0)) throw ResolutionError("time lags must be positive");
    rep.time_lags.push_back(tau);
  }
  for (std::size_t j = 0; j < rep.space_lags.size(); ++j) {
    double s = 0.0;
    for (const auto &hs : samples) s += hs.space[j];
    rep.space_moments.push_back(s / samples.size());
  }
  for (std::size_t j = 0; j < rep.time_lags.size(); ++j) {
    double s = 0.0;
    for (const auto &hs : samples) s += hs.time[j];
    rep.time_moments.push_back(s / samples.size());
  }
  rep.space = fit_with_jackknife(samples, rep.space_lags, true);
  rep.time = fit_with_jackknife(samples, rep.time_lags, false);
  rep.space_exponent = 0.5 * rep.space.slope;
  rep.time_exponent = 0.5 * rep.time.slope;
  return rep;
}

HolderReport holder_scaling_report(
    const std::vector<std::vector<FieldState>> &ensemble,
    const ModelParams &params, const Grid &grid, const HolderProbe &probe) {
  validate(params);
  if (ensemble.empty()) throw ConfigurationError("empty ensemble");
  std::vector<HolderSample> samples;
  samples.reserve(ensemble.size());
  for (const auto &states : ensemble) samples.push_back(holder_sample(states, grid, probe));
  std::vector<double> times;
  for (const auto &st : ensemble.front()) times.push_back(st.t);
  return holder_scaling_report(samples, grid, times, probe);
}

}  // namespace fracshe
