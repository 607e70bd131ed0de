// fracshe command line: constants, kernels, fBm paths, simulations and the
// verification battery.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/fbm.hpp"
#include "fracshe/harness.hpp"
#include "fracshe/model.hpp"
#include "fracshe/spectral_grid.hpp"
#include "fracshe/stats.hpp"

using namespace fracshe;
using nlohmann::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<std::string> output_dir;
};

void apply_env(Globals &g) {
  if (const char *s = std::getenv("FRACSHE_SEED"); s && !g.seed) {
    g.seed = std::stoull(s);
  }
  if (const char *s = std::getenv("FRACSHE_THREADS"); s && g.threads == 0) {
    g.threads = std::stoi(s);
  }
  if (const char *s = std::getenv("FRACSHE_OUTPUT_DIR"); s && !g.output_dir) {
    g.output_dir = s;
  }
}

ExperimentConfig load_with_overrides(const std::string &path, const Globals &g,
                                     std::optional<std::vector<std::string>> experiments) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigurationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
  if (g.seed) j["ensemble"]["seed"] = *g.seed;
  if (g.output_dir) j["output_dir"] = *g.output_dir;
  if (experiments) j["experiments"] = *experiments;
  return config_from_json(j);
}

int report(const RunRecord &rec) {
  json out = {{"run_id", rec.run_id},
              {"directory", rec.directory.string()},
              {"verdicts", rec.verdicts},
              {"pass", rec.pass}};
  if (!rec.replay_match || !rec.mismatched.empty()) {
    out["replay_match"] = rec.replay_match;
    out["mismatched"] = rec.mismatched;
  }
  std::cout << out.dump(2) << "\n";
  return rec.pass && rec.replay_match ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"fracshe: stochastic fractional heat equation laboratory"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_flag = 0;
  std::string out_flag;
  auto *seed_opt = app.add_option("--seed", seed_flag, "ensemble seed override");
  app.add_option("--threads", g.threads, "worker threads (0: all cores)");
  auto *out_opt = app.add_option("--output-dir", out_flag, "artifact root directory");

  // constants
  auto *cmd_constants = app.add_subcommand("constants", "print the model constants");
  double c_alpha = 1.5, c_gamma = 0.5;
  int c_dim = 1;
  bool c_json = false;
  cmd_constants->add_option("--alpha", c_alpha)->required();
  cmd_constants->add_option("--gamma", c_gamma)->required();
  cmd_constants->add_option("--dim", c_dim)->required();
  cmd_constants->add_flag("--json", c_json);

  // kernel
  auto *cmd_kernel = app.add_subcommand("kernel", "emit G^alpha_t on a grid as CSV");
  double k_alpha = 1.5, k_t = 1.0, k_extent = 32.0;
  int k_dim = 1, k_n = 1024;
  cmd_kernel->add_option("--alpha", k_alpha)->required();
  cmd_kernel->add_option("--t", k_t)->required();
  cmd_kernel->add_option("--dim", k_dim);
  cmd_kernel->add_option("--n", k_n);
  cmd_kernel->add_option("--extent", k_extent);

  // fbm
  auto *cmd_fbm = app.add_subcommand("fbm", "sample fBm paths on [0, 1]");
  double f_hurst = 0.5;
  std::size_t f_n = 1024, f_samples = 1;
  bool f_summary = false;
  cmd_fbm->add_option("--hurst", f_hurst)->required();
  cmd_fbm->add_option("--n", f_n);
  cmd_fbm->add_option("--samples", f_samples);
  cmd_fbm->add_flag("--summary", f_summary, "print 1/H-variation statistics instead of paths");

  // simulate / run / verify / replay
  std::string config_path;
  auto *cmd_sim = app.add_subcommand("simulate", "simulate and write fields at record times");
  cmd_sim->add_option("--config", config_path)->required();
  auto *cmd_run = app.add_subcommand("run", "run the experiment battery of a config");
  cmd_run->add_option("--config", config_path)->required();
  auto *cmd_verify = app.add_subcommand("verify", "run one verification experiment");
  std::string experiment;
  cmd_verify->add_option("experiment", experiment)
      ->required()
      ->check(CLI::IsMember({"clt", "lil", "variation", "localize", "holder",
                             "variance", "increments"}));
  cmd_verify->add_option("--config", config_path)->required();
  auto *cmd_replay = app.add_subcommand("replay", "re-run a stored run and compare artifacts");
  std::string replay_id;
  cmd_replay->add_option("run_id", replay_id)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed_flag;
  if (*out_opt) g.output_dir = out_flag;

  try {
    apply_env(g);
    RunOptions opts;
    opts.threads = g.threads;

    if (*cmd_constants) {
      auto params = make_model(c_alpha, c_gamma, c_dim);
      auto table = constant_table(params);
      if (c_json) {
        json j = json::object();
        for (const auto &c : table) j[to_string(c.name)] = c.value;
        std::cout << j.dump(2) << "\n";
      } else {
        Table t;
        t.header = {"name", "value", "method", "est_abs_error"};
        for (const auto &c : table) {
          t.add({to_string(c.name), format_double(c.value), to_string(c.method),
                 format_double(c.est_abs_error)});
        }
        std::cout << to_csv(t);
      }
      return 0;
    }
    if (*cmd_kernel) {
      auto grid = make_grid(k_dim, k_extent, k_n);
      auto slice = green_kernel(grid, k_alpha, k_t);
      Table t;
      t.header = k_dim == 1 ? std::vector<std::string>{"x", "G"}
                            : std::vector<std::string>{"x", "y", "G"};
      for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.point_index(i);
        std::vector<std::string> row;
        for (int a = 0; a < k_dim; ++a) row.push_back(format_double(grid.coordinate(idx[a])));
        row.push_back(format_double(slice.values[i]));
        t.add(std::move(row));
      }
      std::cout << to_csv(t);
      return 0;
    }
    if (*cmd_fbm) {
      const std::uint64_t seed = g.seed.value_or(1);
      FbmCirculantSampler sampler(f_n, 1.0 / static_cast<double>(f_n), f_hurst);
      if (f_summary) {
        std::vector<double> v;
        for (std::size_t m = 0; m < f_samples; ++m) {
          auto b = sampler.path(RngStream{seed, m});
          v.push_back(q_variation(b, 1.0 / f_hurst));
        }
        json j = {{"hurst", f_hurst},
                  {"n", f_n},
                  {"samples", f_samples},
                  {"mean_variation", stats::mean(v)},
                  {"std_error", stats::standard_error(v)},
                  {"gaussian_moment", gaussian_abs_moment(1.0 / f_hurst)}};
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      Table t;
      t.header = {"sample", "x", "B"};
      for (std::size_t m = 0; m < f_samples; ++m) {
        auto b = sampler.path(RngStream{seed, m});
        for (std::size_t i = 0; i < b.size(); ++i) {
          t.add({std::to_string(m), format_double(static_cast<double>(i) / f_n),
                 format_double(b[i])});
        }
      }
      std::cout << to_csv(t);
      return 0;
    }
    if (*cmd_sim) {
      return report(run(load_with_overrides(config_path, g,
                                            std::vector<std::string>{"simulate"}),
                        opts));
    }
    if (*cmd_run) {
      return report(run(load_with_overrides(config_path, g, std::nullopt), opts));
    }
    if (*cmd_verify) {
      return report(run(load_with_overrides(config_path, g,
                                            std::vector<std::string>{experiment}),
                        opts));
    }
    if (*cmd_replay) {
      return report(replay(replay_id, g.output_dir.value_or("runs"), opts));
    }
  } catch (const std::exception &e) {
    std::cout << error_json(e).dump(2) << "\n";
    return exit_code_for(e);
  }
  return 0;
}
