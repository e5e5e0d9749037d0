#pragma once

// Cutoff box integrals I(N, k; eps, L) = integral over [eps, L]^k of
// (T_1 + ... + T_k)^-N dT.  The k-fold antiderivative of x^-N is a finite
// combination of x^a log^b x with rational coefficients, so the box integral
// is an exact alternating corner sum.  Corners are evaluated in 50-digit
// floats: the alternating sum cancels catastrophically in doubles.
//
// The integrand blows up at the origin; the corner at x = k*eps only has a
// finite limit when every surviving exponent is positive, which is exactly
// N < k.  Requests with eps = 0 and N >= k are refused.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oneloop/rational.hpp"

namespace oneloop {

enum class FinitenessVerdict { Finite, Unknown };

// Finite iff the eps -> 0 limit of I(N, k; eps, L) exists.
inline FinitenessVerdict limit_verdict(long N, long k) {
  return N < k ? FinitenessVerdict::Finite : FinitenessVerdict::Unknown;
}

namespace detail {

// Polynomial in x and log x: key (a, b) holds coeff * x^a * log^b x.
using LogPoly = std::map<std::pair<long, long>, Rational>;

inline void logpoly_add(LogPoly& p, long a, long b, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = p.emplace(std::make_pair(a, b), c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

// integral of x^a log^b x dx, standard reduction in b.
inline LogPoly antiderivative(const LogPoly& p) {
  LogPoly out;
  for (const auto& [key, coeff] : p) {
    long a = key.first;
    long b = key.second;
    Rational c = coeff;
    while (true) {
      if (a == -1) {
        logpoly_add(out, 0, b + 1, c / Rational(b + 1));
        break;
      }
      logpoly_add(out, a + 1, b, c / Rational(a + 1));
      if (b == 0) break;
      c = -c * Rational(b) / Rational(a + 1);
      --b;
    }
  }
  return out;
}

// k-fold antiderivative of x^-N.
inline LogPoly iterated_antiderivative(long N, long k) {
  LogPoly p;
  p[{-N, 0}] = Rational(1);
  for (long s = 0; s < k; ++s) p = antiderivative(p);
  return p;
}

using BigFloat = boost::multiprecision::cpp_bin_float_50;

// Evaluates at x >= 0.  x = 0 is the limit value and requires all exponents
// positive; the caller guarantees that (N < k).
inline BigFloat logpoly_eval(const LogPoly& p, const BigFloat& x) {
  if (x == 0) {
    for (const auto& [key, coeff] : p)
      if (key.first <= 0)
        throw std::domain_error("corner evaluation at 0 with non-positive exponent");
    return BigFloat(0);
  }
  const BigFloat lx = log(x);
  BigFloat acc = 0;
  for (const auto& [key, coeff] : p) {
    BigFloat term = BigFloat(coeff.convert_to<BigFloat>());
    term *= pow(x, key.first);
    for (long b = 0; b < key.second; ++b) term *= lx;
    acc += term;
  }
  return acc;
}

}  // namespace detail

inline void check_regulator_args(long N, long k, double eps, double L) {
  if (k < 1) throw std::invalid_argument("regulator: need k >= 1");
  if (N < 0) throw std::invalid_argument("regulator: need N >= 0");
  if (eps < 0.0 || L <= 0.0 || L <= eps) throw std::invalid_argument("regulator: need 0 <= eps < L");
  if (eps == 0.0 && N >= k)
    throw std::domain_error("regulator: eps = 0 with N >= k diverges, refusing");
}

// Exact corner-sum value of I(N, k; eps, L).
inline double regulator_integral(long N, long k, double eps, double L) {
  check_regulator_args(N, k, eps, L);
  using detail::BigFloat;
  const detail::LogPoly F = detail::iterated_antiderivative(N, k);

  // Corner with j entries at L and k - j at eps, multiplicity C(k, j),
  // sign (-1)^(k - j).
  BigFloat acc = 0;
  BigFloat binom = 1;
  for (long j = 0; j <= k; ++j) {
    const BigFloat x = BigFloat(j) * BigFloat(L) + BigFloat(k - j) * BigFloat(eps);
    BigFloat term = binom * detail::logpoly_eval(F, x);
    if ((k - j) % 2 == 1) term = -term;
    acc += term;
    binom = binom * BigFloat(k - j) / BigFloat(j + 1);
  }
  return acc.convert_to<double>();
}

// AM-GM upper bound: (sum T)^-N <= k^-N prod T^(-N/k), so
// I <= k^-N * (integral of t^(-N/k) over [eps, L])^k.
inline double amgm_bound(long N, long k, double eps, double L) {
  check_regulator_args(N, k, eps, L);
  const double p = static_cast<double>(N) / static_cast<double>(k);
  double one_dim;
  if (N == k) {
    one_dim = std::log(L / eps);
  } else {
    const double q = 1.0 - p;
    const double hi = std::pow(L, q);
    const double lo = eps == 0.0 ? 0.0 : std::pow(eps, q);
    one_dim = (hi - lo) / q;
  }
  return std::pow(static_cast<double>(k), -static_cast<double>(N)) * std::pow(one_dim, static_cast<double>(k));
}

}  // namespace oneloop
