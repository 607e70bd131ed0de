#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

#include "fracshe/config.hpp"
#include "fracshe/error.hpp"
#include "fracshe/harness.hpp"

using namespace fracshe;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  auto p = fs::temp_directory_path() / ("fracshe_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json small_simulation(const fs::path &out) {
  return {{"experiments", {"simulate", "variance"}},
          {"model", {{"alpha", 1.5}, {"gamma", 0.5}, {"dim", 1}}},
          {"grid", {{"extent", 8.0}, {"n", 64}}},
          {"solver", {{"dt", 0.03125}, {"t_end", 0.5}, {"record_times", {0.25, 0.5}},
                      {"scheme", "exp_euler_ou"}}},
          {"probe", {{"t", 0.5}, {"variance_times", {0.5}}, {"holder_time_steps", json::array()},
                     {"anchors", 8}, {"variance_tolerance", 1.0}}},
          {"ensemble", {{"members", 6}, {"seed", 99}}},
          {"output_dir", out.string()}};
}

}  // namespace

TEST_SUITE("harness") {
TEST_CASE("config round trip") {
  auto cfg = config_from_json(small_simulation("/tmp/x"));
  auto j = to_json(cfg);
  auto again = to_json(config_from_json(j));
  CHECK(j == again);
  CHECK(cfg.ensemble.members == 6);
  CHECK(cfg.estimator.ensemble_size == 6);
  CHECK(cfg.solver.scheme == Scheme::kExpEulerOu);
  CHECK_FALSE(cfg.localization.has_value());
}

TEST_CASE("unknown keys are rejected") {
  auto j = small_simulation("/tmp/x");
  j["typo"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigurationError);
  j = small_simulation("/tmp/x");
  j["solver"]["dtt"] = 0.1;
  CHECK_THROWS_AS(config_from_json(j), ConfigurationError);
  j = small_simulation("/tmp/x");
  j["estimator"] = {{"ensemble_size", 7}};
  CHECK_THROWS_AS(config_from_json(j), ConfigurationError);
  j = small_simulation("/tmp/x");
  j["model"]["diffusion"] = {{"kind", "cubic"}};
  CHECK_THROWS_AS(config_from_json(j), ConfigurationError);
  j = small_simulation("/tmp/x");
  j["model"]["alpha"] = 0.5;
  CHECK_THROWS_AS(config_from_json(j), ParameterDomainError);
}

TEST_CASE("validation of experiment names and times") {
  auto cfg = config_from_json(small_simulation("/tmp/x"));
  cfg.experiments = {"nope"};
  CHECK_THROWS_AS(validate(cfg), ConfigurationError);
  cfg = config_from_json(small_simulation("/tmp/x"));
  cfg.probe.t = 0.3;
  CHECK_THROWS_AS(validate(cfg), ConfigurationError);
  cfg = config_from_json(small_simulation("/tmp/x"));
  cfg.experiments = {"localize"};
  CHECK_THROWS_AS(validate(cfg), ConfigurationError);
}

TEST_CASE("run ids depend only on the resolved content") {
  auto a = config_from_json(small_simulation("/tmp/a"));
  auto b = config_from_json(small_simulation("/tmp/b"));
  CHECK(run_id(a) == run_id(b));
  CHECK(run_id(a).size() == 16);
  b.ensemble.seed = 100;
  CHECK(run_id(a) != run_id(b));
}

TEST_CASE("constants run") {
  auto dir = scratch("constants");
  json j = {{"experiments", {"constants"}}, {"output_dir", dir.string()}};
  auto rec = run(config_from_json(j));
  CHECK(rec.pass);
  CHECK(rec.verdicts.at("constants"));
  auto manifest = json::parse(slurp(rec.directory / "manifest.json"));
  CHECK(manifest.at("status") == "complete");
  CHECK(manifest.at("code_version") == code_version());
  CHECK(manifest.at("config").at("model").at("alpha") == 1.5);
  auto verdict = json::parse(slurp(rec.directory / "constants.verdict.json"));
  CHECK(verdict.at("pass") == true);
  CHECK(verdict.at("metrics").at("c14").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("repeat runs and replays are byte identical") {
  auto dir = scratch("replay");
  auto cfg = config_from_json(small_simulation(dir));
  auto first = run(cfg, RunOptions{1});
  REQUIRE(first.artifacts.size() >= 3);
  const std::string csv = slurp(first.directory / "simulate_t0.25.csv");
  CHECK(csv.rfind("site,x,value,member\n", 0) == 0);
  auto second = run(cfg, RunOptions{3});
  CHECK(second.run_id == first.run_id);
  CHECK(second.artifact_sha256 == first.artifact_sha256);
  CHECK(slurp(second.directory / "simulate_t0.25.csv") == csv);

  auto rep = replay(first.run_id, dir.string(), RunOptions{2});
  CHECK(rep.replay_match);
  CHECK(rep.mismatched.empty());

  // An edited manifest no longer hashes to its run id.
  auto mpath = first.directory / "manifest.json";
  auto manifest = json::parse(slurp(mpath));
  manifest["config"]["ensemble"]["seed"] = 5;
  std::ofstream(mpath) << manifest.dump(2);
  CHECK_THROWS_AS(replay(first.run_id, dir.string()), ConfigurationError);
  manifest["code_version"] = "0.0.0-other";
  std::ofstream(mpath) << manifest.dump(2);
  try {
    replay(first.run_id, dir.string());
    FAIL("replay accepted a foreign code version");
  } catch (const ConfigurationError &e) {
    const std::string what = e.what();
    CHECK(what.find("0.0.0-other") != std::string::npos);
    CHECK(what.find(code_version()) != std::string::npos);
  }
  CHECK_THROWS_AS(replay("0123456789abcdef", dir.string()), ConfigurationError);
}

TEST_CASE("every artifact is listed in the manifest") {
  auto dir = scratch("orphans");
  auto rec = run(config_from_json(small_simulation(dir)));
  std::set<std::string> listed(rec.artifacts.begin(), rec.artifacts.end());
  for (const auto &entry : fs::directory_iterator(rec.directory)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK(listed.count(name) == 1);
  }
}

TEST_CASE("error mapping") {
  CHECK(exit_code_for(ConfigurationError("x")) == 2);
  CHECK(exit_code_for(ResolutionError("x")) == 2);
  CHECK(exit_code_for(ParameterDomainError("x")) == 2);
  CHECK(exit_code_for(NumericError("x")) == 3);
  CHECK(exit_code_for(BlowUpError("x", 3)) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
  auto j = error_json(ResolutionError("too coarse"));
  CHECK(j.at("error").at("category") == "resolution");
  CHECK(j.at("error").at("message") == "too coarse");
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  Table t;
  t.header = {"a", "b"};
  t.add({"1", "2"});
  CHECK(to_csv(t) == "a,b\n1,2\n");
}
}
