#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oneloop/quadrature.hpp"

using namespace oneloop;
using namespace oneloop::quadrature;

TEST_CASE("interval rule is exact on smooth closed forms") {
  QuadControl ctl;
  auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, M_PI, ctl);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(2.0).epsilon(1e-12));

  auto poly = integrate_interval([](double x) { return 3 * x * x; }, -1.0, 2.0, ctl);
  CHECK(poly.value == Catch::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("interval rule handles wide dyadic ranges") {
  QuadControl ctl;
  ctl.rel_tol = 1e-10;
  // integral of 1/t over [a, b] = log(b/a), spanning twelve decades
  auto r = integrate_interval([](double t) { return 1.0 / t; }, 1e-12, 1.0, ctl);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(std::log(1e12)).epsilon(1e-9));
}

TEST_CASE("box integration iterates the interval rule") {
  QuadControl ctl;
  ctl.rel_tol = 1e-9;
  auto r = integrate_box(
      [](const std::vector<double>& x) { return x[0] * x[0] + x[1]; }, {0.0, 0.0}, {1.0, 2.0},
      ctl);
  CHECK(r.converged);
  // int_0^1 int_0^2 (x^2 + y) dy dx = 2/3 + 2
  CHECK(r.value == Catch::Approx(2.0 / 3.0 + 2.0).epsilon(1e-9));
}

TEST_CASE("box integration flags non-converged integrands") {
  QuadControl ctl;
  ctl.rel_tol = 1e-13;
  ctl.max_panels = 4;
  auto r = integrate_interval([](double t) { return 1.0 / std::sqrt(t); }, 1e-14, 1.0, ctl);
  CHECK_FALSE(r.converged);
}

TEST_CASE("probabilists' Hermite rule integrates Gaussian moments exactly") {
  const auto rule = gauss_hermite(4);
  REQUIRE(rule.nodes.size() == 4);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * x * x;
    m4 += w * x * x * x * x;
    m6 += w * std::pow(x, 6);
  }
  // E[1], E[x^2], E[x^4], E[x^6] for a standard normal: 1, 1, 3, 15
  CHECK(m0 == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == Catch::Approx(15.0).epsilon(1e-11));
}
