#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oneloop/test_input.hpp"

using namespace oneloop;

namespace {
const SpaceSignature sig{1, 1, 3};  // two slots
}

TEST_CASE("exact positive definiteness by elimination pivots") {
  RatMatrix q(2);
  q.at(0, 0) = 2;
  q.at(1, 1) = 3;
  q.at(0, 1) = 1;
  q.at(1, 0) = 1;
  CHECK(q.symmetric());
  CHECK(q.positive_definite());

  RatMatrix bad = q;
  bad.at(0, 1) = 3;
  bad.at(1, 0) = 3;  // det = -3
  CHECK_FALSE(bad.positive_definite());

  RatMatrix asym = q;
  asym.at(0, 1) = 2;
  CHECK_FALSE(asym.positive_definite());
}

TEST_CASE("congruent transform is R^T Q R") {
  RatMatrix q = RatMatrix::diagonal(2, Rational(1));
  RatMatrix r(2);
  r.at(0, 0) = 1;
  r.at(0, 1) = 2;
  r.at(1, 0) = 0;
  r.at(1, 1) = 1;
  const RatMatrix t = q.congruent(r);
  CHECK(t.at(0, 0) == Rational(1));
  CHECK(t.at(0, 1) == Rational(2));
  CHECK(t.at(1, 0) == Rational(2));
  CHECK(t.at(1, 1) == Rational(5));
  CHECK(t.positive_definite());
}

TEST_CASE("validation rejects inconsistent inputs") {
  const Polynomial p = Polynomial::variable(w_var(1, 1));
  CHECK_NOTHROW(TestInput::diagonal(sig, p, {Rational(1)}, {Rational(2)}));
  CHECK_THROWS_AS(TestInput::diagonal(sig, p, {Rational(1), Rational(1)}, {Rational(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TestInput::diagonal(sig, p, {Rational(-1)}, {Rational(2)}),
                  std::invalid_argument);
  // variable outside the slot range
  const Polynomial q = Polynomial::variable(w_var(5, 1));
  CHECK_THROWS_AS(TestInput::diagonal(sig, q, {Rational(1)}, {Rational(2)}),
                  std::invalid_argument);
  // T variables never belong in a test input
  const Polynomial t = Polynomial::variable(t_var(1));
  CHECK_THROWS_AS(TestInput::diagonal(sig, t, {Rational(1)}, {Rational(2)}),
                  std::invalid_argument);
}

TEST_CASE("damping value is the exponential of the quadratic form") {
  const TestInput in =
      TestInput::diagonal(sig, Polynomial(Rational(1)), {Rational(2)}, {Rational(1, 2)});
  std::vector<kernels::Point> pts{kernels::Point{{0.7}, {{0.3, -0.4}}},
                                  kernels::Point{{-0.2}, {{0.1, 0.5}}}};
  // y part: (1/2) (0.7^2 + 0.2^2), w part: 2 (|z1|^2 + |z2|^2), times -1/4
  const double ey = (0.7 * 0.7 + 0.2 * 0.2) / 2.0;
  const double ew = 2.0 * (std::norm(std::complex<double>(0.3, -0.4)) +
                           std::norm(std::complex<double>(0.1, 0.5)));
  CHECK(in.damping_value(pts) == Catch::Approx(std::exp(-0.25 * (ey + ew))).epsilon(1e-13));
}

TEST_CASE("value is polynomial times damping") {
  const Polynomial p = Polynomial::variable(y_var(1, 1)) * Polynomial::variable(w_var(2, 1));
  const TestInput in = TestInput::diagonal(sig, p, {Rational(1)}, {Rational(1)});
  std::vector<kernels::Point> pts{kernels::Point{{0.5}, {{0.2, 0.1}}},
                                  kernels::Point{{1.0}, {{-0.3, 0.6}}}};
  const std::complex<double> expect =
      0.5 * std::complex<double>(-0.3, 0.6) * in.damping_value(pts);
  const auto got = in.value(pts);
  CHECK(got.real() == Catch::Approx(expect.real()).epsilon(1e-13));
  CHECK(got.imag() == Catch::Approx(expect.imag()).epsilon(1e-13));
}

TEST_CASE("damped holomorphic derivative matches finite differences") {
  const Polynomial p =
      Polynomial::variable(w_var(1, 1)) * Polynomial::variable(w_var(2, 1)) +
      Polynomial::variable(y_var(1, 1));
  const TestInput in = TestInput::diagonal(sig, p, {Rational(3)}, {Rational(5, 4)});

  // derivative polynomial evaluated literally, with the damping restored
  const Polynomial dp = in.damped_w_derivative(in.poly, 1, 1);
  TestInput din = in;
  din.poly = dp;

  auto full = [&](double u, double v) {
    std::vector<kernels::Point> pts{kernels::Point{{0.4}, {{u, v}}},
                                    kernels::Point{{-0.6}, {{0.25, -0.15}}}};
    return in.value(pts);
  };
  const double h = 1e-6, u0 = 0.3, v0 = -0.2;
  const std::complex<double> du = (full(u0 + h, v0) - full(u0 - h, v0)) / (2 * h);
  const std::complex<double> dv = (full(u0, v0 + h) - full(u0, v0 - h)) / (2 * h);
  const std::complex<double> dz = 0.5 * (du - std::complex<double>(0, 1) * dv);

  std::vector<kernels::Point> at{kernels::Point{{0.4}, {{u0, v0}}},
                                 kernels::Point{{-0.6}, {{0.25, -0.15}}}};
  const std::complex<double> got = din.value(at);
  CHECK(got.real() == Catch::Approx(dz.real()).epsilon(1e-6));
  CHECK(got.imag() == Catch::Approx(dz.imag()).epsilon(1e-6));
}
