#pragma once

// Exact rational expressions whose denominators are monomials in the scale
// variables T_1..T_k times a power of Sigma = T_1 + ... + T_k.  This family is
// closed under every operation the identity checks and moment expansions need
// (products, sums, first derivatives in the position variables), so equality
// against zero is decidable by exact cancellation of the numerator.

#include "oneloop/polynomial.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace oneloop {

class ScaleExpr {
 public:
  explicit ScaleExpr(int k) : k_(k), tpow_(static_cast<std::size_t>(k), 0) {
    if (k < 1) throw std::invalid_argument("ScaleExpr: k must be >= 1");
  }
  ScaleExpr(int k, Polynomial num) : ScaleExpr(k) { num_ = std::move(num); }

  static ScaleExpr constant(int k, Rational c) { return ScaleExpr(k, Polynomial(std::move(c))); }

  static Polynomial sigma_poly(int k) {
    Polynomial s;
    for (int a = 1; a <= k; ++a) s += Polynomial::variable(t_var(a));
    return s;
  }

  int k() const { return k_; }
  const Polynomial& numerator() const { return num_; }
  const std::vector<unsigned>& t_denominator_powers() const { return tpow_; }
  unsigned sigma_denominator_power() const { return sigma_pow_; }
  bool is_zero() const { return num_.is_zero(); }

  ScaleExpr& divide_by_t(int index, unsigned e = 1) {
    tpow_.at(static_cast<std::size_t>(index - 1)) += e;
    return *this;
  }
  ScaleExpr& divide_by_sigma(unsigned e = 1) {
    sigma_pow_ += e;
    return *this;
  }

  ScaleExpr operator*(const ScaleExpr& o) const {
    check(o);
    ScaleExpr out(k_, num_ * o.num_);
    for (int i = 0; i < k_; ++i) out.tpow_[static_cast<std::size_t>(i)] =
        tpow_[static_cast<std::size_t>(i)] + o.tpow_[static_cast<std::size_t>(i)];
    out.sigma_pow_ = sigma_pow_ + o.sigma_pow_;
    return out;
  }

  ScaleExpr operator*(const Polynomial& p) const {
    ScaleExpr out = *this;
    out.num_ = num_ * p;
    return out;
  }

  ScaleExpr operator+(const ScaleExpr& o) const {
    check(o);
    ScaleExpr out(k_);
    out.sigma_pow_ = std::max(sigma_pow_, o.sigma_pow_);
    Polynomial lhs = num_, rhs = o.num_;
    for (int i = 0; i < k_; ++i) {
      const auto a = tpow_[static_cast<std::size_t>(i)], b = o.tpow_[static_cast<std::size_t>(i)];
      const unsigned c = std::max(a, b);
      out.tpow_[static_cast<std::size_t>(i)] = c;
      if (c > a) lhs *= Polynomial::monomial(Monomial::of(t_var(i + 1), c - a), 1);
      if (c > b) rhs *= Polynomial::monomial(Monomial::of(t_var(i + 1), c - b), 1);
    }
    const Polynomial sig = sigma_poly(k_);
    for (unsigned e = sigma_pow_; e < out.sigma_pow_; ++e) lhs *= sig;
    for (unsigned e = o.sigma_pow_; e < out.sigma_pow_; ++e) rhs *= sig;
    out.num_ = lhs + rhs;
    return out;
  }

  ScaleExpr operator-(const ScaleExpr& o) const {
    ScaleExpr neg = o;
    neg.num_ = -neg.num_;
    return *this + neg;
  }

  // d/dv for a position variable v; denominators carry no position content.
  ScaleExpr derivative(Var v) const {
    if (v.kind == VarKind::T) throw std::invalid_argument("ScaleExpr::derivative: T variable");
    ScaleExpr out = *this;
    out.num_ = num_.derivative(v);
    return out;
  }

  Rational eval_rational(const std::function<Rational(Var)>& value) const {
    Rational num = num_.eval_rational(value);
    Rational den = 1;
    Rational sig = 0;
    for (int a = 1; a <= k_; ++a) sig += value(t_var(a));
    for (int i = 0; i < k_; ++i)
      for (unsigned e = 0; e < tpow_[static_cast<std::size_t>(i)]; ++e) den *= value(t_var(i + 1));
    for (unsigned e = 0; e < sigma_pow_; ++e) den *= sig;
    if (den == 0) throw std::domain_error("ScaleExpr::eval_rational: zero denominator");
    return num / den;
  }

 private:
  void check(const ScaleExpr& o) const {
    if (k_ != o.k_) throw std::invalid_argument("ScaleExpr: mixed k");
  }

  int k_;
  Polynomial num_;
  std::vector<unsigned> tpow_;
  unsigned sigma_pow_ = 0;
};

}  // namespace oneloop
