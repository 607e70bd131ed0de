#ifndef FRACSHE_HARNESS_HPP_
#define FRACSHE_HARNESS_HPP_

#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracshe/config.hpp"

namespace fracshe {

std::string code_version();

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string to_csv(const Table &table);

struct ExperimentResult {
  std::string name;
  bool pass = false;
  std::string label = "QUANTITATIVE";
  nlohmann::json metrics = nlohmann::json::object();
  /// Named CSV tables; the key becomes the artifact file stem.
  std::map<std::string, Table> tables;
};

struct RunOptions {
  int threads = 0;  ///< 0: hardware concurrency
};

/// Runs every requested experiment and returns results in request order.
/// Pure computation: no files are touched.
std::vector<ExperimentResult> execute(const ExperimentConfig &cfg,
                                      const RunOptions &opts = {});

/// Individual experiments (used by execute and by the test suites).
ExperimentResult run_constants(const ExperimentConfig &cfg);
ExperimentResult run_fbm(const ExperimentConfig &cfg, const RunOptions &opts);
/// Shares one simulated ensemble among the requested simulation
/// experiments (simulate, variance, increments, holder, clt, lil,
/// variation).
std::vector<ExperimentResult> run_simulation_battery(
    const ExperimentConfig &cfg, const std::vector<std::string> &experiments,
    const RunOptions &opts);
ExperimentResult run_localization(const ExperimentConfig &cfg,
                                  const RunOptions &opts);

/// Content hash (SHA-256, 16 hex digits) of the resolved config and the
/// code version.
std::string run_id(const ExperimentConfig &cfg);

struct RunRecord {
  std::string run_id;
  std::string code_version;
  std::string started;
  std::string finished;
  std::filesystem::path directory;
  std::vector<std::string> artifacts;  ///< file names relative to directory
  std::map<std::string, std::string> artifact_sha256;
  std::map<std::string, bool> verdicts;
  bool pass = false;
  /// Set by replay: every artifact matched byte for byte.
  bool replay_match = true;
  std::vector<std::string> mismatched;
};

/// Executes the battery and writes <output_dir>/<run_id>/: manifest.json
/// (written first with the resolved config, completed at the end), one CSV
/// per table and one <experiment>.verdict.json per experiment.
RunRecord run(const ExperimentConfig &cfg, const RunOptions &opts = {});
RunRecord run(const std::string &config_path, const RunOptions &opts = {});

/// Re-executes a stored run into <output_dir>/<run_id>/replay and compares
/// every artifact byte for byte. Refuses (ConfigurationError) on a code
/// version mismatch or when the stored config no longer hashes to run_id.
RunRecord replay(const std::string &run_id, const std::string &output_dir,
                 const RunOptions &opts = {});

/// Machine-readable error document {"error": {"category", "message"}}.
nlohmann::json error_json(const std::exception &e);

/// 2 for configuration/parameter errors, 3 for numeric errors, 1 otherwise.
int exit_code_for(const std::exception &e);

}  // namespace fracshe

#endif  // FRACSHE_HARNESS_HPP_
