#pragma once

// Exact multivariate polynomials over Q in the y / w / wbar / T scalar variables.
// w and wbar are independent commuting variables; conjugation is never applied
// implicitly. Terms live in a sorted map keyed by the monomial, so iteration
// order (and every serialization built on it) is deterministic.

#include "oneloop/rational.hpp"
#include "oneloop/variables.hpp"

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oneloop {

// Sorted, strictly increasing (Var, exponent>0) pairs.
struct Monomial {
  std::vector<std::pair<Var, std::uint32_t>> factors;

  static Monomial unit() { return {}; }
  static Monomial of(Var v, std::uint32_t e = 1) {
    Monomial mo;
    if (e > 0) mo.factors.push_back({v, e});
    return mo;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [v, e] : factors) d += static_cast<int>(e);
    return d;
  }

  int degree_of(Var v) const {
    for (const auto& [u, e] : factors)
      if (u == v) return static_cast<int>(e);
    return 0;
  }

  int degree_of_kind(VarKind k) const {
    int d = 0;
    for (const auto& [v, e] : factors)
      if (v.kind == k) d += static_cast<int>(e);
    return d;
  }

  Monomial times(const Monomial& o) const {
    Monomial out;
    auto a = factors.begin(), b = o.factors.begin();
    while (a != factors.end() || b != o.factors.end()) {
      if (b == o.factors.end() || (a != factors.end() && a->first < b->first))
        out.factors.push_back(*a++);
      else if (a == factors.end() || b->first < a->first)
        out.factors.push_back(*b++);
      else {
        out.factors.push_back({a->first, a->second + b->second});
        ++a, ++b;
      }
    }
    return out;
  }

  friend auto operator<=>(const Monomial& a, const Monomial& b) {
    return a.factors <=> b.factors;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(Rational c) {
    if (c != 0) terms_[Monomial::unit()] = std::move(c);
  }
  static Polynomial variable(Var v) {
    Polynomial p;
    p.terms_[Monomial::of(v)] = 1;
    return p;
  }
  static Polynomial monomial(Monomial mo, Rational c) {
    Polynomial p;
    if (c != 0) p.terms_[std::move(mo)] = std::move(c);
    return p;
  }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  int total_degree() const {
    int d = 0;
    for (const auto& [mo, c] : terms_) d = std::max(d, mo.total_degree());
    return d;
  }

  void add_term(const Monomial& mo, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(mo);
    if (it == terms_.end()) {
      terms_.emplace(mo, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [mo, c] : o.terms_) add_term(mo, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [mo, c] : o.terms_) add_term(mo, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma.times(mb), ca * cb);
    return out;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  Polynomial operator-() const {
    Polynomial out;
    for (const auto& [mo, c] : terms_) out.terms_[mo] = -c;
    return out;
  }
  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    Polynomial out;
    if (c == 0) return out;
    for (const auto& [mo, pc] : p.terms_) out.terms_[mo] = c * pc;
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned e) const {
    Polynomial out{Rational(1)};
    Polynomial base = *this;
    while (e) {
      if (e & 1u) out *= base;
      base = (e >>= 1) ? base * base : base;
    }
    return out;
  }

  // Formal partial derivative; w and wbar are independent.
  Polynomial derivative(Var v) const {
    Polynomial out;
    for (const auto& [mo, c] : terms_) {
      for (std::size_t i = 0; i < mo.factors.size(); ++i) {
        if (!(mo.factors[i].first == v)) continue;
        Monomial reduced = mo;
        Rational coeff = c * mo.factors[i].second;
        if (--reduced.factors[i].second == 0)
          reduced.factors.erase(reduced.factors.begin() + static_cast<long>(i));
        out.add_term(reduced, coeff);
      }
    }
    return out;
  }

  // Substitutes v := replacement everywhere.
  Polynomial substituted(Var v, const Polynomial& replacement) const {
    Polynomial out;
    for (const auto& [mo, c] : terms_) {
      Polynomial term{c};
      for (const auto& [u, e] : mo.factors) {
        if (u == v)
          term *= replacement.pow(e);
        else
          term *= Polynomial::monomial(Monomial::of(u, e), Rational(1));
      }
      out += term;
    }
    return out;
  }

  std::complex<double> eval(const std::function<std::complex<double>(Var)>& value) const {
    std::complex<double> acc = 0.0;
    for (const auto& [mo, c] : terms_) {
      std::complex<double> t = to_double(c);
      for (const auto& [v, e] : mo.factors) {
        std::complex<double> base = value(v);
        for (std::uint32_t i = 0; i < e; ++i) t *= base;
      }
      acc += t;
    }
    return acc;
  }

  // Exact evaluation at rational points (T-variables and symbolic checks).
  Rational eval_rational(const std::function<Rational(Var)>& value) const {
    Rational acc = 0;
    for (const auto& [mo, c] : terms_) {
      Rational t = c;
      for (const auto& [v, e] : mo.factors) {
        Rational base = value(v);
        for (std::uint32_t i = 0; i < e; ++i) t *= base;
      }
      acc += t;
    }
    return acc;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mo, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += oneloop::to_string(c);
      for (const auto& [v, e] : mo.factors) {
        out += "*" + oneloop::to_string(v);
        if (e > 1) out += "^" + std::to_string(e);
      }
    }
    return out;
  }

 private:
  std::map<Monomial, Rational> terms_;
};

}  // namespace oneloop
