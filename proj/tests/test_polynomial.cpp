#include <catch2/catch_amalgamated.hpp>

#include "oneloop/anomaly.hpp"
#include "oneloop/exterior.hpp"
#include "oneloop/extrapolate.hpp"
#include "oneloop/gaussian.hpp"
#include "oneloop/kernels.hpp"
#include "oneloop/loop_integral.hpp"
#include "oneloop/polynomial.hpp"
#include "oneloop/presets.hpp"
#include "oneloop/quadrature.hpp"
#include "oneloop/rational.hpp"
#include "oneloop/regulator.hpp"
#include "oneloop/report.hpp"
#include "oneloop/rng.hpp"
#include "oneloop/scale_algebra.hpp"
#include "oneloop/test_input.hpp"
#include "oneloop/variables.hpp"
#include "oneloop/wheel.hpp"

using namespace oneloop;

TEST_CASE("rational parsing and printing round-trips") {
  CHECK(parse_rational("3/4") == Rational(3) / 4);
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(to_string(parse_rational("10/4")) == "5/2");
  CHECK(to_double(parse_rational("1/2")) == 0.5);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("variable ordering groups by kind then slot then coordinate") {
  CHECK(y_var(1, 1) < y_var(1, 2));
  CHECK(y_var(2, 1) < w_var(1, 1));
  CHECK(w_var(1, 1) < wbar_var(1, 1));
  CHECK(wbar_var(3, 2) < t_var(1));
}

TEST_CASE("polynomial arithmetic is exact") {
  const Polynomial y = Polynomial::variable(y_var(1, 1));
  const Polynomial w = Polynomial::variable(w_var(1, 1));
  Polynomial p = (y + w) * (y - w);
  Polynomial q = y * y - w * w;
  CHECK(p == q);
  CHECK(p.total_degree() == 2);
  CHECK((p - q).is_zero());

  Polynomial cube = (y + Polynomial(Rational(1))).pow(3);
  CHECK(cube.term_count() == 4);
  CHECK(cube.terms().at(Monomial::of(y_var(1, 1), 2)) == Rational(3));
}

TEST_CASE("polynomial derivative and substitution") {
  const Var yv = y_var(1, 1);
  const Var wv = w_var(2, 1);
  Polynomial p = Polynomial::variable(yv).pow(3) * Polynomial::variable(wv) +
                 Polynomial::variable(wv).pow(2);
  Polynomial dy = p.derivative(yv);
  CHECK(dy == Rational(3) * Polynomial::variable(yv).pow(2) * Polynomial::variable(wv));
  Polynomial dw = p.derivative(wv);
  CHECK(dw == Polynomial::variable(yv).pow(3) + Rational(2) * Polynomial::variable(wv));

  Polynomial sub = p.substituted(wv, Polynomial(Rational(0)));
  CHECK(sub.is_zero());
}

TEST_CASE("polynomial evaluation matches hand computation") {
  const Var yv = y_var(1, 1);
  Polynomial p = Polynomial::variable(yv).pow(2) + Polynomial(Rational(1, 4));
  const auto val = p.eval([&](const Var&) { return std::complex<double>(2.0, 0.0); });
  CHECK(val.real() == Catch::Approx(4.25));
  CHECK(val.imag() == 0.0);
}

TEST_CASE("scale expressions track powers exactly") {
  ScaleExpr e = ScaleExpr::constant(2, Rational(1));
  e.divide_by_t(1, 2).divide_by_sigma(1);
  // value at T = (2, 3): 1 / (4 * 5)
  const Rational got = e.eval_rational([](const Var& v) {
    return v == t_var(1) ? Rational(2) : Rational(3);
  });
  CHECK(got == Rational(1, 20));

  const ScaleExpr sum = e + ScaleExpr::constant(2, Rational(1));
  const Rational expect = Rational(1, 20) + 1;
  CHECK(sum.eval_rational([](const Var& v) {
          return v == t_var(1) ? Rational(2) : Rational(3);
        }) == expect);
}
