#include "fracshe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fracshe/error.hpp"

namespace fracshe {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json &j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) {
      throw ConfigurationError(where_ + " must be a JSON object");
    }
  }

  template <class T>
  void get(const std::string &key, T &out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception &e) {
      throw ConfigurationError(where_ + "." + key + ": " + e.what());
    }
  }

  bool has(const std::string &key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json &at(const std::string &key) const { return j_.at(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigurationError("unknown key '" + where_ + "." + it.key() + "'");
      }
    }
  }

 private:
  const json &j_;
  std::string where_;
  std::set<std::string> seen_;
};

InitSpec init_from_json(const json &j) {
  InitSpec s;
  Section sec(j, "model.init");
  std::string kind = "zero";
  sec.get("kind", kind);
  s.kind = init_kind_from_string(kind);
  sec.get("value", s.value);
  sec.get("width", s.width);
  sec.get("holder", s.holder);
  sec.finish();
  return s;
}

json init_to_json(const InitSpec &s) {
  return {{"kind", to_string(s.kind)},
          {"value", s.value},
          {"width", s.width},
          {"holder", s.holder}};
}

}  // namespace

const std::vector<std::string> &experiment_names() {
  static const std::vector<std::string> names = {
      "constants", "fbm",     "simulate", "variance", "increments",
      "holder",    "clt",     "lil",      "variation", "localize"};
  return names;
}

json to_json(const FunctionSpec &f) {
  return {{"kind", to_string(f.kind)}, {"offset", f.offset},
          {"slope", f.slope},          {"amplitude", f.amplitude},
          {"frequency", f.frequency},  {"knots", f.knots},
          {"values", f.values}};
}

FunctionSpec function_from_json(const json &j, const std::string &where) {
  FunctionSpec f;
  if (j.is_string()) {
    f.kind = function_kind_from_string(j.get<std::string>());
    f.validate(where);
    return f;
  }
  Section sec(j, where);
  std::string kind = "zero";
  sec.get("kind", kind);
  f.kind = function_kind_from_string(kind);
  sec.get("offset", f.offset);
  sec.get("slope", f.slope);
  sec.get("amplitude", f.amplitude);
  sec.get("frequency", f.frequency);
  sec.get("knots", f.knots);
  sec.get("values", f.values);
  sec.finish();
  f.validate(where);
  return f;
}

ExperimentConfig config_from_json(const json &j) {
  ExperimentConfig cfg;
  Section top(j, "config");
  top.get("experiments", cfg.experiments);
  top.get("output_dir", cfg.output_dir);

  if (top.has("model")) {
    Section m(top.at("model"), "model");
    double alpha = cfg.model.alpha, gamma = cfg.model.gamma;
    int dim = cfg.model.dim;
    m.get("alpha", alpha);
    m.get("gamma", gamma);
    m.get("dim", dim);
    FunctionSpec drift = FunctionSpec::zero();
    FunctionSpec diffusion = FunctionSpec::constant(1.0);
    InitSpec init;
    if (m.has("drift")) drift = function_from_json(m.at("drift"), "model.drift");
    if (m.has("diffusion")) {
      diffusion = function_from_json(m.at("diffusion"), "model.diffusion");
    }
    if (m.has("init")) init = init_from_json(m.at("init"));
    // Derived fields are accepted on input so resolved configs round-trip,
    // but they are recomputed from the descriptors.
    double ignored = 0.0;
    m.get("lip_drift", ignored);
    m.get("lip_diffusion", ignored);
    m.get("init_holder", ignored);
    m.finish();
    cfg.model = make_model(alpha, gamma, dim, drift, diffusion, init);
  }
  if (top.has("grid")) {
    Section g(top.at("grid"), "grid");
    g.get("extent", cfg.grid_extent);
    g.get("n", cfg.grid_n);
    g.finish();
  }
  if (top.has("solver")) {
    Section s(top.at("solver"), "solver");
    s.get("dt", cfg.solver.dt);
    s.get("t_end", cfg.solver.t_end);
    std::string scheme = to_string(cfg.solver.scheme);
    s.get("scheme", scheme);
    cfg.solver.scheme = scheme_from_string(scheme);
    s.get("record_times", cfg.solver.record_times);
    s.get("store_noise", cfg.solver.store_noise);
    s.finish();
  }
  if (top.has("estimator")) {
    Section e(top.at("estimator"), "estimator");
    EstimatorConfig &ec = cfg.estimator;
    e.get("probe_dirs", ec.probe_dirs);
    e.get("eps_ladder", ec.eps_ladder);
    e.get("moment_order", ec.moment_order);
    e.get("variation_levels", ec.variation_levels);
    std::vector<double> interval{ec.a1, ec.a2};
    e.get("interval", interval);
    if (interval.size() != 2) {
      throw ConfigurationError("estimator.interval must be [A1, A2]");
    }
    ec.a1 = interval[0];
    ec.a2 = interval[1];
    e.get("ensemble_size", ec.ensemble_size);
    e.get("significance", ec.significance);
    e.finish();
  }
  if (top.has("probe")) {
    Section p(top.at("probe"), "probe");
    ProbeConfig &pc = cfg.probe;
    p.get("t", pc.t);
    p.get("anchor", pc.anchor);
    p.get("anchors", pc.anchors);
    p.get("lil_anchors", pc.lil_anchors);
    p.get("holder_space_lags", pc.holder_space_lags);
    p.get("holder_time_steps", pc.holder_time_steps);
    p.get("variance_times", pc.variance_times);
    if (p.has("phi")) pc.phi = function_from_json(p.at("phi"), "probe.phi");
    p.get("ks_threshold", pc.ks_threshold);
    p.get("variance_tolerance", pc.variance_tolerance);
    p.get("increment_tolerance", pc.increment_tolerance);
    p.get("holder_tolerance", pc.holder_tolerance);
    p.get("variation_tolerance", pc.variation_tolerance);
    p.get("lil_fraction", pc.lil_fraction);
    p.get("localization_margin", pc.localization_margin);
    p.get("fbm_tolerance", pc.fbm_tolerance);
    p.finish();
  }
  if (top.has("localization") && !top.at("localization").is_null()) {
    Section l(top.at("localization"), "localization");
    LocalizationConfig lc;
    l.get("beta_ladder", lc.beta_ladder);
    l.get("eps", lc.eps);
    l.get("anchor_t", lc.anchor_t);
    l.get("anchor_x", lc.anchor_x);
    l.finish();
    cfg.localization = lc;
  }
  if (top.has("ensemble")) {
    Section e(top.at("ensemble"), "ensemble");
    e.get("members", cfg.ensemble.members);
    e.get("seed", cfg.ensemble.seed);
    e.finish();
  }
  const bool explicit_size =
      j.contains("estimator") && j.at("estimator").contains("ensemble_size");
  top.finish();
  if (!explicit_size) {
    cfg.estimator.ensemble_size = cfg.ensemble.members;
  } else if (cfg.estimator.ensemble_size != cfg.ensemble.members) {
    throw ConfigurationError(
        "estimator.ensemble_size must equal ensemble.members");
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigurationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig &cfg) {
  json j = resolved_content(cfg);
  j["output_dir"] = cfg.output_dir;
  return j;
}

json resolved_content(const ExperimentConfig &cfg) {
  const ModelParams &m = cfg.model;
  json j;
  j["experiments"] = cfg.experiments;
  j["model"] = {{"alpha", m.alpha},
                {"gamma", m.gamma},
                {"dim", m.dim},
                {"drift", to_json(m.drift)},
                {"diffusion", to_json(m.diffusion)},
                {"init", init_to_json(m.init)},
                {"lip_drift", m.lip_drift},
                {"lip_diffusion", m.lip_diffusion},
                {"init_holder", m.init_holder}};
  j["grid"] = {{"extent", cfg.grid_extent}, {"n", cfg.grid_n}};
  j["solver"] = {{"dt", cfg.solver.dt},
                 {"t_end", cfg.solver.t_end},
                 {"scheme", to_string(cfg.solver.scheme)},
                 {"record_times", cfg.solver.record_times},
                 {"store_noise", cfg.solver.store_noise}};
  const EstimatorConfig &e = cfg.estimator;
  j["estimator"] = {{"probe_dirs", e.probe_dirs},
                    {"eps_ladder", e.eps_ladder},
                    {"moment_order", e.moment_order},
                    {"variation_levels", e.variation_levels},
                    {"interval", {e.a1, e.a2}},
                    {"ensemble_size", e.ensemble_size},
                    {"significance", e.significance}};
  const ProbeConfig &p = cfg.probe;
  j["probe"] = {{"t", p.t},
                {"anchor", p.anchor},
                {"anchors", p.anchors},
                {"lil_anchors", p.lil_anchors},
                {"holder_space_lags", p.holder_space_lags},
                {"holder_time_steps", p.holder_time_steps},
                {"variance_times", p.variance_times},
                {"phi", to_json(p.phi)},
                {"ks_threshold", p.ks_threshold},
                {"variance_tolerance", p.variance_tolerance},
                {"increment_tolerance", p.increment_tolerance},
                {"holder_tolerance", p.holder_tolerance},
                {"variation_tolerance", p.variation_tolerance},
                {"lil_fraction", p.lil_fraction},
                {"localization_margin", p.localization_margin},
                {"fbm_tolerance", p.fbm_tolerance}};
  if (cfg.localization) {
    const auto &l = *cfg.localization;
    j["localization"] = {{"beta_ladder", l.beta_ladder},
                         {"eps", l.eps},
                         {"anchor_t", l.anchor_t},
                         {"anchor_x", l.anchor_x}};
  } else {
    j["localization"] = nullptr;
  }
  j["ensemble"] = {{"members", cfg.ensemble.members}, {"seed", cfg.ensemble.seed}};
  return j;
}

Grid grid_of(const ExperimentConfig &cfg) {
  return make_grid(cfg.model.dim, cfg.grid_extent, cfg.grid_n);
}

void validate(const ExperimentConfig &cfg) {
  const auto &names = experiment_names();
  if (cfg.experiments.empty()) throw ConfigurationError("no experiments requested");
  bool needs_sim = false;
  for (const auto &e : cfg.experiments) {
    if (std::find(names.begin(), names.end(), e) == names.end()) {
      throw ConfigurationError("unknown experiment '" + e + "'");
    }
    if (e != "constants" && e != "fbm") needs_sim = true;
  }
  validate(cfg.model);
  if (!needs_sim) return;
  Grid g = grid_of(cfg);
  validate(cfg.solver);
  validate(cfg.estimator, g);
  if (cfg.ensemble.members < 1) throw ConfigurationError("ensemble.members must be >= 1");
  const double dt = cfg.solver.dt;
  auto on_step = [&](double t, const std::string &what) {
    if (t < 0.0 || t > cfg.solver.t_end * (1.0 + 1e-12) ||
        std::abs(t / dt - std::round(t / dt)) > 1e-9 * std::max(1.0, t / dt)) {
      std::ostringstream os;
      os << what << " = " << t << " must be a multiple of dt in [0, t_end]";
      throw ConfigurationError(os.str());
    }
  };
  auto requested = [&](const char *name) {
    return std::find(cfg.experiments.begin(), cfg.experiments.end(), name) !=
           cfg.experiments.end();
  };
  on_step(cfg.probe.t, "probe.t");
  if (requested("variance")) {
    for (double t : cfg.probe.variance_times) on_step(t, "probe.variance_times");
  }
  if (requested("holder")) {
    for (int k : cfg.probe.holder_time_steps) {
      if (k < 1) throw ConfigurationError("holder time steps must be >= 1");
      on_step(cfg.probe.t + k * dt, "probe.t + holder time lag");
    }
  }
  if (static_cast<int>(cfg.probe.anchor.size()) != g.dim) {
    throw ConfigurationError("probe.anchor has the wrong dimension");
  }
  if (cfg.probe.anchors < 1) throw ConfigurationError("probe.anchors must be >= 1");
  if (requested("localize")) {
    if (!cfg.localization) {
      throw ConfigurationError("experiment 'localize' needs a localization section");
    }
    on_step(cfg.localization->anchor_t, "localization.anchor_t");
  }
}

}  // namespace fracshe
