#include "fracshe/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fracshe/constants.hpp"
#include "fracshe/ensemble.hpp"
#include "fracshe/error.hpp"
#include "fracshe/estimators.hpp"
#include "fracshe/fbm.hpp"
#include "fracshe/solver.hpp"
#include "fracshe/stats.hpp"

#ifndef FRACSHE_VERSION
#define FRACSHE_VERSION "unknown"
#endif

namespace fracshe {

using nlohmann::json;
namespace fs = std::filesystem;

std::string code_version() { return FRACSHE_VERSION; }

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table &t) {
  std::string out;
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto &r : t.rows) line(r);
  return out;
}

namespace {

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

std::string sha256_hex(const std::string &data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericError("SHA-256 failed");
  }
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path &p, const std::string &data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write '" + p.string() + "'");
  out << data;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Evenly spaced flat grid indices.
std::vector<std::size_t> spread_anchors(const Grid &g, std::size_t count) {
  count = std::max<std::size_t>(1, std::min(count, g.size()));
  std::vector<std::size_t> out;
  const std::size_t stride = g.size() / count;
  for (std::size_t i = 0; i < count; ++i) out.push_back(i * stride);
  return out;
}

std::size_t site_index(const Grid &g, const std::vector<double> &x) {
  std::array<int, 2> idx{0, 0};
  for (int a = 0; a < g.dim; ++a) {
    double i = (x[a] + 0.5 * g.extent) / g.spacing;
    if (std::abs(i - std::round(i)) > 1e-9) {
      throw ConfigurationError("probe.anchor is not a grid point");
    }
    idx[a] = static_cast<int>(std::lround(i));
  }
  return g.flat_index(std::span<const int>(idx.data(), g.dim));
}

std::size_t record_index(const std::vector<double> &times, double t, double dt) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (step_of(times[i], dt) == step_of(t, dt)) return i;
  }
  throw ConfigurationError("time is not among the record times");
}

json extras_json(const EnsembleStats &s) {
  json m = json::object();
  for (const auto &[k, v] : s.extras) m[k] = v;
  m["mean"] = s.mean;
  m["std_error"] = s.std_error;
  return m;
}

}  // namespace

ExperimentResult run_constants(const ExperimentConfig &cfg) {
  ExperimentResult r;
  r.name = "constants";
  Table t;
  t.header = {"name", "value", "method", "est_abs_error"};
  bool ok = true;
  for (const auto &c : constant_table(cfg.model)) {
    t.add({to_string(c.name), fmt(c.value), to_string(c.method), fmt(c.est_abs_error)});
    r.metrics[to_string(c.name)] = c.value;
    ok = ok && std::isfinite(c.value) && c.value > 0.0;
  }
  r.tables["constants"] = std::move(t);
  r.pass = ok;
  return r;
}

ExperimentResult run_fbm(const ExperimentConfig &cfg, const RunOptions &opts) {
  ExperimentResult r;
  r.name = "fbm";
  const double H = hurst(cfg.model);
  const double q = 1.0 / H;
  std::size_t n = 4096;
  if (!cfg.estimator.variation_levels.empty()) {
    n = *std::max_element(cfg.estimator.variation_levels.begin(),
                          cfg.estimator.variation_levels.end());
  }
  const std::size_t members = cfg.ensemble.members;
  const double c = c_alpha_gamma_d(cfg.model).value;
  const double a1 = cfg.estimator.a1, a2 = cfg.estimator.a2;
  const double root_d = std::sqrt(static_cast<double>(cfg.model.dim));
  // Pure-fBm stand-in for the diagonal transect: step √d (A2-A1)/n.
  FbmCirculantSampler unit(n, 1.0 / static_cast<double>(n), H);
  FbmCirculantSampler diag(n, root_d * (a2 - a1) / static_cast<double>(n), H);

  struct Out {
    double v = 0.0;
    std::vector<double> path;
  };
  auto outs = run_ensemble<int, Out>(
      members, opts.threads, [] { return 0; },
      [&](int &, std::size_t m) {
        RngStream s{cfg.ensemble.seed, m};
        Out o;
        auto b = unit.path(s, 0);
        o.v = q_variation(b, q);
        o.path = diag.path(s, 1);
        for (double &x : o.path) x *= c;
        return o;
      });
  std::vector<double> vs;
  std::vector<std::vector<double>> paths;
  for (auto &o : outs) {
    vs.push_back(o.v);
    paths.push_back(std::move(o.path));
  }
  const double target = gaussian_abs_moment(q);
  const double mean_v = stats::mean(vs);
  const double rel = std::abs(mean_v - target) / target;

  ModelParams unit_sigma = cfg.model;
  unit_sigma.diffusion = FunctionSpec::constant(1.0);
  EstimatorConfig ec = cfg.estimator;
  ec.variation_levels = {n};
  auto wv = weighted_variation_test(paths, unit_sigma, ec,
                                    [](double) { return 1.0; });
  const double pipeline_target = c14(cfg.model).value * root_d * (a2 - a1);
  const double pipeline_mean = wv.extras.at("mean_variation_n" + std::to_string(n));
  const double pipeline_rel = std::abs(pipeline_mean - pipeline_target) / pipeline_target;

  r.metrics = {{"hurst", H},
               {"n", n},
               {"members", members},
               {"mean_variation", mean_v},
               {"variation_stderr", stats::standard_error(vs)},
               {"gaussian_moment", target},
               {"rel_error", rel},
               {"pipeline_mean", pipeline_mean},
               {"pipeline_target", pipeline_target},
               {"pipeline_rel_error", pipeline_rel}};
  r.pass = rel <= cfg.probe.fbm_tolerance && pipeline_rel <= 0.05;
  Table t;
  t.header = {"member", "variation"};
  for (std::size_t m = 0; m < vs.size(); ++m) t.add({fmt(m), fmt(vs[m])});
  r.tables["fbm"] = std::move(t);
  return r;
}

namespace {

struct MemberOut {
  std::vector<std::vector<double>> fields;        // simulate
  std::vector<std::vector<double>> var_values;    // [time][anchor]
  std::vector<double> sigma_sq;                   // mean σ(u)^2 at probe.t
  std::vector<double> inc_sq;                     // per ε
  HolderSample holder;
  GradientSample grad;
  std::vector<double> transect;
  std::vector<double> field_t;                    // member 0 only
};

}  // namespace

std::vector<ExperimentResult> run_simulation_battery(
    const ExperimentConfig &cfg, const std::vector<std::string> &experiments,
    const RunOptions &opts) {
  auto want = [&](const std::string &n) {
    return std::find(experiments.begin(), experiments.end(), n) != experiments.end();
  };
  const Grid grid = grid_of(cfg);
  const ModelParams &params = cfg.model;
  const ProbeConfig &probe = cfg.probe;
  const EstimatorConfig &est = cfg.estimator;
  const double dt = cfg.solver.dt;
  const double H = hurst(params);
  const std::vector<double> e = est.probe_dirs.at(0);

  // Union of all times any experiment needs.
  std::set<std::int64_t> steps;
  if (want("simulate")) {
    for (double t : cfg.solver.record_times) steps.insert(step_of(t, dt));
  }
  steps.insert(step_of(probe.t, dt));
  if (want("variance")) {
    for (double t : probe.variance_times) steps.insert(step_of(t, dt));
  }
  if (want("holder")) {
    for (int k : probe.holder_time_steps) steps.insert(step_of(probe.t, dt) + k);
  }
  SolverConfig sc = cfg.solver;
  sc.store_noise = false;
  sc.record_times.clear();
  for (auto s : steps) sc.record_times.push_back(static_cast<double>(s) * dt);
  sc.t_end = std::max(sc.t_end, sc.record_times.back());
  const std::vector<double> &times = sc.record_times;

  const auto anchors = spread_anchors(grid, probe.anchors);
  const std::size_t base = record_index(times, probe.t, dt);
  HolderProbe hp;
  hp.space_lags = probe.holder_space_lags;
  hp.base_record = base;
  if (want("holder")) {
    for (int k : probe.holder_time_steps) {
      hp.time_records.push_back(record_index(times, probe.t + k * dt, dt));
    }
  }
  hp.anchors = anchors;
  hp.axis = 0;
  const std::size_t clt_site = site_index(grid, probe.anchor);
  std::vector<std::size_t> var_records;
  if (want("variance")) {
    for (double t : probe.variance_times) var_records.push_back(record_index(times, t, dt));
  }
  std::vector<std::size_t> sim_records;
  for (double t : cfg.solver.record_times) sim_records.push_back(record_index(times, t, dt));
  std::size_t finest = 0;
  if (want("variation")) {
    finest = *std::max_element(est.variation_levels.begin(), est.variation_levels.end());
  }

  auto outs = run_ensemble<Solver, MemberOut>(
      cfg.ensemble.members, opts.threads,
      [&] { return Solver(params, grid, sc); },
      [&](Solver &solver, std::size_t m) {
        RngStream stream{cfg.ensemble.seed, m};
        auto states = solver.simulate(stream);
        MemberOut o;
        const auto &u = states[base].values;
        if (want("simulate")) {
          for (auto r : sim_records) o.fields.push_back(states[r].values);
        }
        if (want("variance")) {
          for (auto r : var_records) {
            std::vector<double> v;
            for (auto a : anchors) v.push_back(states[r].values[a]);
            o.var_values.push_back(std::move(v));
          }
        }
        if (want("increments")) {
          double s2 = 0.0;
          for (auto a : anchors) s2 += std::pow(params.diffusion(u[a]), 2);
          o.sigma_sq.push_back(s2 / anchors.size());
          for (double eps : est.eps_ladder) {
            double s = 0.0;
            for (auto a : anchors) {
              double g = gradient(u, grid, a, e, eps);
              s += g * g;
            }
            o.inc_sq.push_back(s / anchors.size());
          }
        }
        if (want("holder")) o.holder = holder_sample(states, grid, hp);
        if (want("clt")) o.grad = gradient_sample(states[base], grid, clt_site, e, est.eps_ladder);
        if (want("variation")) {
          o.transect = diagonal_transect(u, grid, est.a1, est.a2, finest);
        }
        if (want("lil") && m == 0) o.field_t = u;
        return o;
      });

  std::vector<ExperimentResult> results;
  const std::size_t members = outs.size();
  for (const auto &name : experiments) {
    ExperimentResult r;
    r.name = name;
    try {
      if (name == "simulate") {
        r.pass = true;
        for (std::size_t k = 0; k < sim_records.size(); ++k) {
          Table t;
          t.header = {"site"};
          t.header.push_back("x");
          if (grid.dim == 2) t.header.push_back("y");
          t.header.push_back("value");
          t.header.push_back("member");
          for (std::size_t m = 0; m < members; ++m) {
            const auto &f = outs[m].fields[k];
            for (std::size_t i = 0; i < f.size(); ++i) {
              auto idx = grid.point_index(i);
              std::vector<std::string> row{fmt(i)};
              for (int a = 0; a < grid.dim; ++a) row.push_back(fmt(grid.coordinate(idx[a])));
              row.push_back(fmt(f[i]));
              row.push_back(fmt(m));
              t.add(std::move(row));
            }
          }
          r.tables["simulate_t" + fmt(cfg.solver.record_times[k])] = std::move(t);
        }
        r.metrics = {{"members", members}, {"records", sim_records.size()}};
      } else if (name == "variance") {
        Table t;
        t.header = {"t", "variance", "std_error", "continuum", "discrete_oracle", "ratio"};
        bool ok = true;
        const bool linear = params.drift.kind == FunctionKind::kZero &&
                            params.diffusion.is_constant() &&
                            params.diffusion(0.0) == 1.0 &&
                            params.init.kind == InitKind::kZero;
        for (std::size_t k = 0; k < var_records.size(); ++k) {
          // Pointwise variance across members, averaged over anchors; the
          // per-member anchor average of centered squares gives the error bar.
          std::vector<double> mu(anchors.size(), 0.0);
          for (const auto &o : outs)
            for (std::size_t a = 0; a < anchors.size(); ++a) mu[a] += o.var_values[k][a];
          for (double &x : mu) x /= static_cast<double>(members);
          std::vector<double> per_member;
          for (const auto &o : outs) {
            double s = 0.0;
            for (std::size_t a = 0; a < anchors.size(); ++a) {
              s += std::pow(o.var_values[k][a] - mu[a], 2);
            }
            per_member.push_back(s / anchors.size());
          }
          const double var = stats::mean(per_member) * members / std::max<double>(1.0, members - 1.0);
          const double se = stats::standard_error(per_member);
          const double t_k = probe.variance_times[k];
          const double cont = continuum_variance(params, t_k);
          const double disc = linear_variance(grid, params, dt, sc.scheme, step_of(t_k, dt));
          const double ratio = var / cont;
          t.add({fmt(t_k), fmt(var), fmt(se), fmt(cont), fmt(disc), fmt(ratio)});
          r.metrics["ratio_t" + fmt(t_k)] = ratio;
          r.metrics["variance_t" + fmt(t_k)] = var;
          r.metrics["continuum_t" + fmt(t_k)] = cont;
          r.metrics["discrete_oracle_t" + fmt(t_k)] = disc;
          ok = ok && std::abs(ratio - 1.0) <= probe.variance_tolerance;
        }
        r.metrics["linear_model"] = linear;
        r.pass = ok;
        r.tables["variance"] = std::move(t);
      } else if (name == "increments") {
        const double c = c_alpha_gamma_d(params).value;
        std::vector<double> s2;
        for (const auto &o : outs) s2.push_back(o.sigma_sq[0]);
        const double sigma_rms = std::sqrt(stats::mean(s2));
        Table t;
        t.header = {"eps", "l2_norm", "std_error", "ratio"};
        bool ok = true;
        double lo = 1e300, hi = -1e300;
        for (std::size_t j = 0; j < est.eps_ladder.size(); ++j) {
          std::vector<double> v;
          for (const auto &o : outs) v.push_back(o.inc_sq[j]);
          const double m2 = stats::mean(v);
          const double norm = std::sqrt(m2);
          const double se = 0.5 * stats::standard_error(v) / norm;
          const double eps = est.eps_ladder[j];
          const double ratio = norm / (c * sigma_rms * std::pow(eps, H));
          t.add({fmt(eps), fmt(norm), fmt(se), fmt(ratio)});
          r.metrics["ratio_eps" + std::to_string(j)] = ratio;
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          ok = ok && std::abs(ratio - 1.0) <= probe.increment_tolerance;
        }
        r.metrics["ratio_min"] = lo;
        r.metrics["ratio_max"] = hi;
        r.metrics["c_agd"] = c;
        r.metrics["sigma_rms"] = sigma_rms;
        r.pass = ok;
        r.tables["increments"] = std::move(t);
      } else if (name == "holder") {
        std::vector<HolderSample> hs;
        for (const auto &o : outs) hs.push_back(o.holder);
        auto rep = holder_scaling_report(hs, grid, times, hp);
        const double ts = H / params.alpha;
        r.metrics = {{"space_exponent", rep.space_exponent},
                     {"time_exponent", rep.time_exponent},
                     {"space_slope_ci", {rep.space.ci_low, rep.space.ci_high}},
                     {"time_slope_ci", {rep.time.ci_low, rep.time.ci_high}},
                     {"target_space", H},
                     {"target_time", ts}};
        r.pass = std::abs(rep.space_exponent - H) <= probe.holder_tolerance &&
                 std::abs(rep.time_exponent - ts) <= probe.holder_tolerance;
        Table t;
        t.header = {"kind", "lag", "second_moment"};
        for (std::size_t j = 0; j < rep.space_lags.size(); ++j)
          t.add({"space", fmt(rep.space_lags[j]), fmt(rep.space_moments[j])});
        for (std::size_t j = 0; j < rep.time_lags.size(); ++j)
          t.add({"time", fmt(rep.time_lags[j]), fmt(rep.time_moments[j])});
        r.tables["holder"] = std::move(t);
      } else if (name == "clt") {
        std::vector<GradientSample> gs;
        for (const auto &o : outs) gs.push_back(o.grad);
        RngStream aux{cfg.ensemble.seed, ~std::uint64_t{0}};
        auto st = gradient_clt_test(gs, params, est, aux);
        r.metrics = extras_json(st);
        const double ks = st.extras.at("ks_smallest");
        const bool constant_sigma = params.diffusion.is_constant();
        r.pass = ks < probe.ks_threshold &&
                 (constant_sigma || st.extras.at("ks_shuffled") > ks);
        Table t;
        t.header = {"eps", "ks", "ks_mixture", "std_ratio"};
        for (std::size_t j = 0; j < est.eps_ladder.size(); ++j) {
          const auto s = std::to_string(j);
          t.add({fmt(est.eps_ladder[j]), fmt(st.extras.at("ks_eps" + s)),
                 fmt(st.extras.at("ks_mix_eps" + s)),
                 fmt(st.extras.at("std_ratio_eps" + s))});
        }
        r.tables["clt"] = std::move(t);
      } else if (name == "lil") {
        auto lil_anchors = spread_anchors(grid, probe.lil_anchors);
        auto st = lil_diagnostic(outs.at(0).field_t, grid, params, e,
                                 est.eps_ladder, lil_anchors);
        r.label = st.label;
        r.metrics = extras_json(st);
        r.pass = st.extras.at("fraction_in_band") >= probe.lil_fraction;
        Table t;
        t.header = {"anchor", "normalized_max"};
        for (std::size_t j = 0; j < st.values.size(); ++j) t.add({fmt(j), fmt(st.values[j])});
        r.tables["lil"] = std::move(t);
      } else if (name == "variation") {
        std::vector<std::vector<double>> paths;
        for (const auto &o : outs) paths.push_back(o.transect);
        const FunctionSpec phi = probe.phi;
        auto st = weighted_variation_test(paths, params, est,
                                          [&phi](double u) { return phi(u); });
        r.metrics = extras_json(st);
        r.pass = st.extras.at("median_rel_error") < probe.variation_tolerance;
        Table t;
        t.header = {"member", "rel_error"};
        for (std::size_t j = 0; j < st.values.size(); ++j) t.add({fmt(j), fmt(st.values[j])});
        r.tables["variation"] = std::move(t);
      }
    } catch (const DegenerateTestError &err) {
      r.pass = false;
      r.metrics = {{"error", err.what()}};
    }
    results.push_back(std::move(r));
  }
  return results;
}

ExperimentResult run_localization(const ExperimentConfig &cfg,
                                  const RunOptions &opts) {
  ExperimentResult r;
  r.name = "localize";
  if (!cfg.localization) throw ConfigurationError("no localization section");
  const LocalizationConfig &loc = *cfg.localization;
  const Grid grid = grid_of(cfg);
  const ModelParams &params = cfg.model;
  SolverConfig sc = cfg.solver;
  sc.store_noise = true;
  sc.t_end = loc.anchor_t;
  sc.record_times = {loc.anchor_t};
  const std::vector<double> e = cfg.estimator.probe_dirs.at(0);
  LocalizationKernels kernels(grid, params, sc, loc, e);

  struct Out {
    std::vector<double> err;
    double grad_sq = 0.0;
  };
  auto outs = run_ensemble<Solver, Out>(
      cfg.ensemble.members, opts.threads,
      [&] { return Solver(params, grid, sc); },
      [&](Solver &solver, std::size_t m) {
        std::vector<NoiseIncrement> noise;
        auto states = solver.simulate(RngStream{cfg.ensemble.seed, m}, &noise);
        Out o;
        o.err = kernels.member_errors(states.back(), noise, &o.grad_sq);
        return o;
      });
  std::vector<std::vector<double>> errs;
  std::vector<double> g2;
  for (auto &o : outs) {
    errs.push_back(std::move(o.err));
    g2.push_back(o.grad_sq);
  }
  auto st = localization_decay(errs, g2, params, loc);
  r.metrics = extras_json(st);
  const double bound = -st.extras.at("predicted_exponent") + cfg.probe.localization_margin;
  r.metrics["slope_bound"] = bound;
  r.pass = st.extras.at("slope") <= bound;
  Table t;
  t.header = {"beta", "delta", "rms_error", "rel_error"};
  const double H = hurst(params);
  for (std::size_t b = 0; b < loc.beta_ladder.size(); ++b) {
    t.add({fmt(loc.beta_ladder[b]), fmt(localization_delta(loc.beta_ladder[b], H)),
           fmt(st.values[b]), fmt(st.extras.at("rel_error_beta" + std::to_string(b)))});
  }
  r.tables["localize"] = std::move(t);
  return r;
}

std::vector<ExperimentResult> execute(const ExperimentConfig &cfg,
                                      const RunOptions &opts) {
  validate(cfg);
  static const std::set<std::string> shared = {
      "simulate", "variance", "increments", "holder", "clt", "lil", "variation"};
  std::vector<std::string> battery;
  for (const auto &n : cfg.experiments) {
    if (shared.count(n)) battery.push_back(n);
  }
  std::map<std::string, ExperimentResult> by_name;
  if (!battery.empty()) {
    for (auto &r : run_simulation_battery(cfg, battery, opts)) by_name[r.name] = std::move(r);
  }
  std::vector<ExperimentResult> out;
  for (const auto &n : cfg.experiments) {
    if (n == "constants") {
      out.push_back(run_constants(cfg));
    } else if (n == "fbm") {
      out.push_back(run_fbm(cfg, opts));
    } else if (n == "localize") {
      out.push_back(run_localization(cfg, opts));
    } else {
      out.push_back(by_name.at(n));
    }
  }
  return out;
}

std::string run_id(const ExperimentConfig &cfg) {
  const std::string payload = resolved_content(cfg).dump() + "\n" + code_version();
  return sha256_hex(payload).substr(0, 16);
}

namespace {

json manifest_json(const RunRecord &rec, const ExperimentConfig &cfg,
                   const std::string &status) {
  json m;
  m["run_id"] = rec.run_id;
  m["code_version"] = rec.code_version;
  m["status"] = status;
  m["started"] = rec.started;
  m["finished"] = rec.finished;
  m["config"] = resolved_content(cfg);
  m["artifacts"] = json::array();
  for (const auto &a : rec.artifacts) {
    m["artifacts"].push_back({{"path", a}, {"sha256", rec.artifact_sha256.at(a)}});
  }
  m["verdicts"] = rec.verdicts;
  m["pass"] = rec.pass;
  return m;
}

RunRecord run_into(const ExperimentConfig &cfg, const fs::path &dir,
                   const RunOptions &opts) {
  RunRecord rec;
  rec.run_id = run_id(cfg);
  rec.code_version = code_version();
  rec.directory = dir;
  rec.started = utc_now();
  fs::create_directories(dir);
  write_file(dir / "manifest.json", manifest_json(rec, cfg, "running").dump(2) + "\n");

  auto results = execute(cfg, opts);
  rec.pass = true;
  auto add = [&](const std::string &name, const std::string &data) {
    write_file(dir / name, data);
    rec.artifacts.push_back(name);
    rec.artifact_sha256[name] = sha256_hex(data);
  };
  for (const auto &r : results) {
    for (const auto &[stem, table] : r.tables) add(stem + ".csv", to_csv(table));
    json v = {{"experiment", r.name},
              {"pass", r.pass},
              {"label", r.label},
              {"metrics", r.metrics}};
    add(r.name + ".verdict.json", v.dump(2) + "\n");
    rec.verdicts[r.name] = r.pass;
    rec.pass = rec.pass && r.pass;
  }
  rec.finished = utc_now();
  write_file(dir / "manifest.json", manifest_json(rec, cfg, "complete").dump(2) + "\n");
  return rec;
}

}  // namespace

RunRecord run(const ExperimentConfig &cfg, const RunOptions &opts) {
  validate(cfg);
  return run_into(cfg, fs::path(cfg.output_dir) / run_id(cfg), opts);
}

RunRecord run(const std::string &config_path, const RunOptions &opts) {
  return run(load_config(config_path), opts);
}

RunRecord replay(const std::string &id, const std::string &output_dir,
                 const RunOptions &opts) {
  const fs::path dir = fs::path(output_dir) / id;
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) {
    throw ConfigurationError("no manifest for run '" + id + "' under " + output_dir);
  }
  json manifest;
  try {
    manifest = json::parse(read_file(mpath));
  } catch (const json::exception &e) {
    throw ConfigurationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  const std::string stored_version = manifest.value("code_version", "");
  if (stored_version != code_version()) {
    throw ConfigurationError("refusing replay: run was produced by code version '" +
                             stored_version + "', this is '" + code_version() + "'");
  }
  json content = manifest.at("config");
  content["output_dir"] = output_dir;
  ExperimentConfig cfg = config_from_json(content);
  if (run_id(cfg) != id) {
    throw ConfigurationError("refusing replay: stored config hashes to " + run_id(cfg) +
                             ", not " + id + " (config edited?)");
  }
  RunRecord rec = run_into(cfg, dir / "replay", opts);
  std::map<std::string, std::string> stored;
  for (const auto &a : manifest.at("artifacts")) {
    stored[a.at("path").get<std::string>()] = a.at("sha256").get<std::string>();
  }
  for (const auto &[path, hash] : stored) {
    auto it = rec.artifact_sha256.find(path);
    if (it == rec.artifact_sha256.end() || it->second != hash) rec.mismatched.push_back(path);
  }
  for (const auto &[path, hash] : rec.artifact_sha256) {
    if (!stored.count(path)) rec.mismatched.push_back(path);
  }
  rec.replay_match = rec.mismatched.empty();
  return rec;
}

json error_json(const std::exception &e) {
  std::string category = "internal";
  if (auto *fe = dynamic_cast<const Error *>(&e)) category = fe->category();
  return {{"error", {{"category", category}, {"message", e.what()}}}};
}

int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const ConfigurationError *>(&e) ||
      dynamic_cast<const ParameterDomainError *>(&e)) {
    return 2;
  }
  if (dynamic_cast<const NumericError *>(&e)) return 3;
  return 1;
}

}  // namespace fracshe
