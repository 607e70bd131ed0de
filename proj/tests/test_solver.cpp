#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/model.hpp"
#include "fracshe/solver.hpp"
#include "fracshe/stats.hpp"

using namespace fracshe;

namespace {

SolverConfig config(double dt, double t_end, std::vector<double> records,
                    Scheme scheme = Scheme::kExpEuler) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.record_times = std::move(records);
  c.scheme = scheme;
  return c;
}

}  // namespace

TEST_SUITE("solver") {
TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(validate(config(0.0, 1.0, {})), ConfigurationError);
  CHECK_THROWS_AS(validate(config(0.3, 1.0, {})), ConfigurationError);
  CHECK_THROWS_AS(validate(config(0.25, 1.0, {0.3})), ConfigurationError);
  CHECK_THROWS_AS(validate(config(0.25, 1.0, {1.5})), ConfigurationError);
  CHECK_NOTHROW(validate(config(0.25, 1.0, {0.5, 1.0})));
  CHECK(step_of(0.5, 1.0 / 512) == 256);
  CHECK(scheme_from_string("exp_euler_ou") == Scheme::kExpEulerOu);
  CHECK(to_string(Scheme::kExpEuler) == "exp_euler");
  CHECK_THROWS_AS(scheme_from_string("crank"), ConfigurationError);
}

TEST_CASE("zero diffusion keeps constant data constant") {
  auto g = make_grid(1, 8.0, 64);
  InitSpec init;
  init.kind = InitKind::kConstant;
  init.value = 2.5;
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::zero(), FunctionSpec::zero(), init);
  auto states = simulate(p, g, config(1.0 / 64, 0.5, {0.25, 0.5}), RngStream{1, 0});
  REQUIRE(states.size() == 2);
  CHECK(states[1].t == 0.5);
  CHECK(states[1].step == 32);
  for (double v : states[1].values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("linear drift on constant data is the explicit Euler product") {
  auto g = make_grid(1, 8.0, 64);
  InitSpec init;
  init.kind = InitKind::kConstant;
  init.value = 1.0;
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::linear(-2.0), FunctionSpec::zero(), init);
  const double dt = 1.0 / 32;
  auto states = simulate(p, g, config(dt, 1.0, {1.0}), RngStream{1, 0});
  const double expected = std::pow(1.0 - 2.0 * dt, 32);
  CHECK(states[0].values[10] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bump initial data diffuses with the heat semigroup") {
  auto g = make_grid(1, 32.0, 512);
  InitSpec init;
  init.kind = InitKind::kBump;
  init.value = 1.0;
  init.width = 0.5;
  auto p = make_model(2.0, 0.5, 1, FunctionSpec::zero(), FunctionSpec::zero(), init);
  auto states = simulate(p, g, config(1.0 / 16, 1.0, {1.0}), RngStream{1, 0});
  // Gaussian of variance w^2 after time t has variance w^2 + 2t.
  const double s2 = 0.25 + 2.0;
  const double peak = std::sqrt(0.25 / s2);
  CHECK(states[0].values[256] == doctest::Approx(peak).epsilon(1e-9));
}

TEST_CASE("simulation is a pure function of the stream") {
  auto g = make_grid(1, 8.0, 128);
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::zero(), FunctionSpec::sine(1.0, 0.5, 1.0));
  auto cfg = config(1.0 / 64, 0.5, {0.5});
  auto a = simulate(p, g, cfg, RngStream{3, 7});
  auto b = simulate(p, g, cfg, RngStream{3, 7});
  auto c = simulate(p, g, cfg, RngStream{3, 8});
  CHECK(a[0].values == b[0].values);
  CHECK(a[0].values != c[0].values);
  CHECK(a[0].provenance.member == 7);
}

TEST_CASE("spectral fast path agrees with the general step") {
  auto g = make_grid(1, 8.0, 128);
  for (Scheme s : {Scheme::kExpEuler, Scheme::kExpEulerOu}) {
    auto fast = make_model(1.5, 0.5, 1);
    auto slow = make_model(1.5, 0.5, 1, FunctionSpec::zero(),
                           FunctionSpec::table({-1.0, 1.0}, {1.0, 1.0}));
    auto cfg = config(1.0 / 64, 0.5, {0.25, 0.5}, s);
    auto a = simulate(fast, g, cfg, RngStream{2, 0});
    auto b = simulate(slow, g, cfg, RngStream{2, 0});
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(a[r].values[i] == doctest::Approx(b[r].values[i]).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("step-by-step matches simulate and exposes the noise") {
  auto g = make_grid(1, 8.0, 64);
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::zero(), FunctionSpec::sine(1.0, 0.5, 1.0));
  auto cfg = config(1.0 / 32, 0.25, {0.25});
  cfg.store_noise = true;
  Solver solver(p, g, cfg);
  std::vector<NoiseIncrement> noise;
  auto out = solver.simulate(RngStream{4, 1}, &noise);
  REQUIRE(noise.size() == 8);
  auto state = solver.initial_state(RngStream{4, 1});
  for (const auto &w : noise) state = step(state, w, p, g, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(state.values[i] == doctest::Approx(out[0].values[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("blow-up guard") {
  auto g = make_grid(1, 8.0, 64);
  InitSpec init;
  init.kind = InitKind::kConstant;
  init.value = 1.0;
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::linear(2000.0), FunctionSpec::zero(), init);
  CHECK_THROWS_AS(simulate(p, g, config(1.0 / 64, 1.0, {1.0}), RngStream{1, 0}), BlowUpError);
}

TEST_CASE("holder initial data has the requested variance") {
  auto g = make_grid(1, 16.0, 256);
  InitSpec init;
  init.kind = InitKind::kHolder;
  init.value = 2.0;
  init.holder = 0.8;
  auto p = make_model(1.5, 0.5, 1, FunctionSpec::zero(), FunctionSpec::constant(1.0), init);
  std::vector<double> v;
  for (std::size_t m = 0; m < 400; ++m) v.push_back(initial_field(g, p, RngStream{5, m})[100]);
  CHECK(std::abs(stats::mean(v)) < 4 * stats::standard_error(v));
  CHECK(stats::variance(v) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("discrete variance law agrees with the ensemble") {
  auto g = make_grid(1, 8.0, 128);
  auto p = make_model(1.5, 0.5, 1);
  const double dt = 1.0 / 64;
  auto cfg = config(dt, 0.5, {0.5}, Scheme::kExpEulerOu);
  Solver solver(p, g, cfg);
  std::vector<double> sq;
  for (std::size_t m = 0; m < 600; ++m) {
    auto s = solver.simulate(RngStream{8, m});
    double acc = 0.0;
    for (double v : s[0].values) acc += v * v;
    sq.push_back(acc / g.size());
  }
  const double oracle = linear_variance(g, p, dt, Scheme::kExpEulerOu, 32);
  CHECK(std::abs(stats::mean(sq) - oracle) < 4 * stats::standard_error(sq));
}

TEST_CASE("continuum variance law") {
  auto p = make_model(1.5, 0.5, 1);
  const double c = c21(p).value;
  const double k = 1.0 - 0.5 / 1.5;
  CHECK(continuum_variance(p, 0.5) ==
        doctest::Approx(c / (2 * std::numbers::pi) * std::pow(0.5, k) / k).epsilon(1e-12));
  auto g = make_grid(1, 16.0, 1024);
  const double disc = linear_variance(g, p, 1.0 / 512, Scheme::kExpEulerOu, 512);
  CHECK(disc == doctest::Approx(continuum_variance(p, 1.0)).epsilon(0.02));
}

TEST_CASE("exponential Euler is weakly first order") {
  // Fixed coarse grid so that the dt -> 0 limit is resolved; reference at a
  // much finer step.
  auto g = make_grid(1, 16.0, 128);
  auto p = make_model(1.5, 0.5, 1);
  auto var = [&](int k) {
    const double dt = 1.0 / k;
    return linear_variance(g, p, dt, Scheme::kExpEuler, k);
  };
  const double ref = var(1 << 16);
  std::vector<double> lx, ly;
  for (int k : {256, 512, 1024, 2048}) {
    lx.push_back(std::log(1.0 / k));
    ly.push_back(std::log(std::abs(var(k) - ref)));
  }
  auto fit = stats::linear_fit(lx, ly);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("response symbols") {
  auto g = make_grid(1, 8.0, 64);
  const double dt = 0.01;
  auto ee = response_symbol(g, 1.5, dt, Scheme::kExpEuler, 0);
  auto ou = response_symbol(g, 1.5, dt, Scheme::kExpEulerOu, 2);
  const double a = std::pow(3 * g.frequency_step(), 1.5);
  CHECK(ee[3] == doctest::Approx(std::exp(-dt * a)));
  CHECK(ou[3] == doctest::Approx(std::exp(-2 * dt * a) *
                                 std::sqrt((1 - std::exp(-2 * dt * a)) / (2 * dt * a))));
  CHECK(ee[0] == 1.0);
}

TEST_CASE("holder regression guards") {
  auto g = make_grid(1, 8.0, 64);
  HolderProbe probe;
  probe.space_lags = {1, 2, 4};
  probe.time_records = {1, 2};
  probe.anchors = {0, 10};
  std::vector<HolderSample> s(4, HolderSample{{1, 1, 1}, {1, 1}});
  CHECK_THROWS_AS(holder_scaling_report(s, g, {0.0, 0.1, 0.2}, probe), ResolutionError);
  probe.space_lags = {2, 4, 64};
  CHECK_THROWS_AS(holder_scaling_report(s, g, {0.0, 0.1, 0.2}, probe), ResolutionError);
}
}
