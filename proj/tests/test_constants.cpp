#include <doctest.h>

#include <cmath>
#include <tuple>
#include <numbers>
#include <vector>

#include "fracshe/constants.hpp"
#include "fracshe/error.hpp"
#include "fracshe/model.hpp"

using namespace fracshe;

// Reference values from 30-digit mpmath evaluations of the closed forms
// (Gamma-function route for c_{α,γ,d}, independent of the library's
// radial quadrature).

TEST_SUITE("constants") {
TEST_CASE("riesz normalization") {
  CHECK(riesz_c11(1, 0.5) == doctest::Approx(2.50662827463100050).epsilon(1e-14));
  CHECK(riesz_c11(1, 0.2) == doctest::Approx(0.71953353379479744).epsilon(1e-13));
  CHECK(riesz_c11(2, 1.0) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("gradient constant against the Gamma closed form") {
  struct Row {
    double alpha, gamma;
    int dim;
    double expected;
  };
  const std::vector<Row> rows = {
      {1.5, 0.5, 1, 0.70710678118654752},
      {2.0, 0.5, 1, 0.72933054271382573},
      {1.2, 0.3, 1, 0.89324384173800237},
      {1.9, 0.9, 1, 0.98241104039622047},
      {1.5, 1.5, 2, 0.39894228040143268},
      {1.5, 1.0, 2, 0.55163132566041863},
      {1.8, 0.7, 2, 0.55163132566041863},
  };
  for (const auto &r : rows) {
    CAPTURE(r.alpha);
    CAPTURE(r.gamma);
    CAPTURE(r.dim);
    auto c = c_alpha_gamma_d(r.alpha, r.gamma, r.dim);
    CHECK(std::abs(c.value - r.expected) < 1e-9);
    CHECK(c.est_abs_error < 1e-9);
  }
}

TEST_CASE("gradient constant does not depend on the direction") {
  auto p = make_model(1.5, 1.0, 2);
  const double ref = c_alpha_gamma_d(p).value;
  const double s = std::sin(1.0), co = std::cos(1.0);
  for (auto e : {std::vector<double>{1.0, 0.0}, std::vector<double>{0.6, 0.8},
                 std::vector<double>{co, s}}) {
    CHECK(std::abs(c_alpha_gamma_d_along(p, e) - ref) < 1e-9);
  }
}

TEST_CASE("c21 closed form and quadrature") {
  CHECK(c21(1.5, 0.5, 1).value == doctest::Approx(2.83503323210215030).epsilon(1e-13));
  CHECK(c21(2.0, 0.5, 1).value == doctest::Approx(3.04876237493215169).epsilon(1e-13));
  CHECK(c21(1.5, 1.5, 2).value == doctest::Approx(8.90651957465504257).epsilon(1e-13));
  for (auto [a, g, d] : {std::tuple{1.5, 0.5, 1}, std::tuple{1.2, 0.4, 1},
                         std::tuple{1.5, 1.5, 2}}) {
    CHECK(c21_quadrature(a, g, d).value ==
          doctest::Approx(c21(a, g, d).value).epsilon(1e-10));
  }
}

TEST_CASE("c26 and c14") {
  CHECK(c26(make_model(1.5, 0.5, 1)).value == doctest::Approx(0.82268726079736688).epsilon(1e-11));
  CHECK(c26(make_model(2.0, 0.5, 1)).value == doctest::Approx(0.80434288068628897).epsilon(1e-11));
  CHECK(c26(make_model(1.5, 1.5, 2)).value == doctest::Approx(0.58172774090560386).epsilon(1e-11));
  CHECK(std::abs(c14(make_model(1.5, 0.5, 1)).value - 0.5) < 1e-9);
  CHECK(c14(make_model(2.0, 0.5, 1)).value == doctest::Approx(0.54545743984431747).epsilon(1e-9));
}

TEST_CASE("gaussian absolute moments") {
  CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_abs_moment(1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  CHECK(gaussian_abs_moment(4.0 / 3.0) == doctest::Approx(0.83086092502955908).epsilon(1e-13));
}

TEST_CASE("table order and hurst") {
  auto p = make_model(1.5, 0.5, 1);
  CHECK(hurst(p) == 0.5);
  auto t = constant_table(p);
  REQUIRE(t.size() == 6);
  CHECK(t[0].name == ConstantName::kHurst);
  CHECK(t[1].name == ConstantName::kC11);
  CHECK(t[2].name == ConstantName::kCAlphaGammaD);
  CHECK(t[5].name == ConstantName::kC14);
  CHECK(to_string(ConstantName::kCAlphaGammaD) == "c_agd");
}

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(make_model(0.9, 0.5, 1), ParameterDomainError);
  CHECK_THROWS_AS(make_model(2.1, 0.5, 1), ParameterDomainError);
  CHECK_THROWS_AS(make_model(1.5, 1.0, 1), ParameterDomainError);
  CHECK_THROWS_AS(make_model(1.2, 0.5, 2), ParameterDomainError);  // γ ≤ d - α
  CHECK_THROWS_AS(c21(1.5, 0.2, 2), ParameterDomainError);
  CHECK_NOTHROW(make_model(2.0, 0.01, 1));
}
}
