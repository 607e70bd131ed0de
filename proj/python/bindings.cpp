#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "fracshe/config.hpp"
#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/estimators.hpp"
#include "fracshe/fbm.hpp"
#include "fracshe/harness.hpp"
#include "fracshe/noise.hpp"
#include "fracshe/solver.hpp"
#include "fracshe/spectral_grid.hpp"
#include "fracshe/stats.hpp"

namespace py = pybind11;
using namespace fracshe;
using nlohmann::json;

namespace {

py::array_t<double> to_array(const std::vector<double> &v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double> &v, const Grid &g) {
  if (g.dim == 1) return to_array(v);
  py::array_t<double> out({g.points_per_axis, g.points_per_axis});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  return {a.data(), a.data() + a.size()};
}

ModelParams model(double alpha, double gamma, int dim, const std::string &diffusion) {
  if (diffusion.empty() || diffusion == "constant") return make_model(alpha, gamma, dim);
  return make_model(alpha, gamma, dim, FunctionSpec::zero(),
                    function_from_json(json::parse(diffusion), "diffusion"));
}

py::dict record_dict(const RunRecord &r) {
  py::dict d;
  d["run_id"] = r.run_id;
  d["code_version"] = r.code_version;
  d["directory"] = r.directory.string();
  d["artifacts"] = r.artifacts;
  d["verdicts"] = r.verdicts;
  d["passed"] = r.pass;
  d["replay_match"] = r.replay_match;
  d["mismatched"] = r.mismatched;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic fractional heat equation laboratory (C++ core)";

  auto base = py::register_exception<Error>(m, "FracsheError", PyExc_RuntimeError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<ParameterDomainError>(m, "ParameterDomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DegenerateTestError>(m, "DegenerateTestError", base.ptr());

  m.attr("__version__") = code_version();

  m.def("constants", [](double alpha, double gamma, int dim) {
        py::dict d;
        for (const auto &c : constant_table(make_model(alpha, gamma, dim))) {
          d[py::str(to_string(c.name))] = c.value;
        }
        return d;
      }, py::arg("alpha"), py::arg("gamma"), py::arg("dim"));
  m.def("c_alpha_gamma_d", [](double a, double g, int d) { return c_alpha_gamma_d(a, g, d).value; },
        py::arg("alpha"), py::arg("gamma"), py::arg("dim"));
  m.def("gaussian_abs_moment", &gaussian_abs_moment, py::arg("p"));

  m.def("coordinates", [](double extent, int n) {
        auto g = make_grid(1, extent, n);
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = g.coordinate(i);
        return to_array(x);
      }, py::arg("extent"), py::arg("n"));
  m.def("green_kernel", [](double alpha, double t, int dim, int n, double extent) {
        auto g = make_grid(dim, extent, n);
        return to_array(green_kernel(g, alpha, t).values, g);
      }, py::arg("alpha"), py::arg("t"), py::arg("dim") = 1, py::arg("n") = 1024,
      py::arg("extent") = 32.0);

  m.def("sample_noise", [](double alpha, double gamma, int dim, int n, double extent,
                           double dt, std::uint64_t seed, std::uint64_t member,
                           std::uint64_t step) {
        auto g = make_grid(dim, extent, n);
        return to_array(sample_noise(g, make_model(alpha, gamma, dim), dt,
                                     RngStream{seed, member}, step).values, g);
      }, py::arg("alpha"), py::arg("gamma"), py::arg("dim"), py::arg("n"), py::arg("extent"),
      py::arg("dt"), py::arg("seed") = 1, py::arg("member") = 0, py::arg("step") = 0);

  m.def("fbm_path", [](std::size_t n, double hurst, std::uint64_t seed, std::uint64_t member) {
        FbmCirculantSampler s(n, 1.0 / static_cast<double>(n), hurst);
        return to_array(s.path(RngStream{seed, member}));
      }, py::arg("n"), py::arg("hurst"), py::arg("seed") = 1, py::arg("member") = 0);

  m.def("simulate", [](double alpha, double gamma, int dim, int n, double extent, double dt,
                       double t_end, std::vector<double> record_times, const std::string &scheme,
                       const std::string &diffusion, std::uint64_t seed, std::uint64_t member) {
        auto g = make_grid(dim, extent, n);
        SolverConfig sc;
        sc.dt = dt;
        sc.t_end = t_end;
        sc.record_times = record_times.empty() ? std::vector<double>{t_end} : record_times;
        sc.scheme = scheme_from_string(scheme);
        std::vector<FieldState> states;
        {
          py::gil_scoped_release release;
          states = simulate(model(alpha, gamma, dim, diffusion), g, sc, RngStream{seed, member});
        }
        py::list out;
        for (const auto &s : states) out.append(py::make_tuple(s.t, to_array(s.values, g)));
        return out;
      }, py::arg("alpha"), py::arg("gamma"), py::arg("dim"), py::arg("n"), py::arg("extent"),
      py::arg("dt"), py::arg("t_end"), py::arg("record_times") = std::vector<double>{},
      py::arg("scheme") = "exp_euler_ou", py::arg("diffusion") = "", py::arg("seed") = 1,
      py::arg("member") = 0);

  m.def("linear_variance", [](double alpha, double gamma, int dim, int n, double extent,
                              double dt, double t, const std::string &scheme) {
        auto g = make_grid(dim, extent, n);
        return linear_variance(g, make_model(alpha, gamma, dim), dt, scheme_from_string(scheme),
                               step_of(t, dt));
      }, py::arg("alpha"), py::arg("gamma"), py::arg("dim"), py::arg("n"), py::arg("extent"),
      py::arg("dt"), py::arg("t"), py::arg("scheme") = "exp_euler_ou");
  m.def("continuum_variance", [](double alpha, double gamma, int dim, double t) {
        return continuum_variance(make_model(alpha, gamma, dim), t);
      }, py::arg("alpha"), py::arg("gamma"), py::arg("dim"), py::arg("t"));

  m.def("q_variation", [](py::array_t<double, py::array::c_style | py::array::forcecast> path,
                          double q) { return q_variation(to_vector(path), q); },
        py::arg("path"), py::arg("q"));
  m.def("kolmogorov_cdf", &stats::kolmogorov_cdf, py::arg("n"), py::arg("d"));
  m.def("ks_critical_value", &stats::ks_critical_value, py::arg("n"),
        py::arg("significance") = 0.01);

  m.def("_execute", [](const std::string &config_json, int threads) {
        auto cfg = config_from_json(json::parse(config_json));
        std::vector<ExperimentResult> results;
        {
          py::gil_scoped_release release;
          results = execute(cfg, RunOptions{threads});
        }
        json out = json::object();
        for (const auto &r : results) {
          out[r.name] = {{"pass", r.pass}, {"label", r.label}, {"metrics", r.metrics}};
        }
        return out.dump();
      }, py::arg("config_json"), py::arg("threads") = 0);
  m.def("_run", [](const std::string &config_json, int threads) {
        auto cfg = config_from_json(json::parse(config_json));
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = run(cfg, RunOptions{threads});
        }
        return record_dict(r);
      }, py::arg("config_json"), py::arg("threads") = 0);
  m.def("replay", [](const std::string &id, const std::string &output_dir, int threads) {
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = replay(id, output_dir, RunOptions{threads});
        }
        return record_dict(r);
      }, py::arg("run_id"), py::arg("output_dir") = "runs", py::arg("threads") = 0);
  m.def("resolved_config", [](const std::string &config_json) {
        return to_json(config_from_json(json::parse(config_json))).dump();
      }, py::arg("config_json"));
}
