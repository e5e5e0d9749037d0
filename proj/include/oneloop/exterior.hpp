#pragma once

// Graded exterior algebra over the slot coordinates of (R^m x C^n)^(k-1) with
// exact polynomial coefficients.  Generators are the anti-holomorphic and de
// Rham one-forms dwbar_i^alpha and dy_j^alpha; holomorphic dw generators are
// never materialized and are tracked as a volume flag instead.  Generator
// order is (kind, slot, coordinate) lexicographic with dy before dwbar.

#include "oneloop/polynomial.hpp"
#include "oneloop/variables.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oneloop::exterior {

enum class GenKind : std::uint8_t { Dy = 0, DwBar = 1 };

struct Generator {
  GenKind kind;
  std::uint16_t slot;   // 1..k-1
  std::uint16_t coord;  // 1..m (Dy) or 1..n (DwBar)

  std::uint32_t packed() const {
    return (static_cast<std::uint32_t>(kind) << 24) |
           (static_cast<std::uint32_t>(slot) << 12) | coord;
  }
  friend bool operator==(const Generator& a, const Generator& b) {
    return a.packed() == b.packed();
  }
  friend auto operator<=>(const Generator& a, const Generator& b) {
    return a.packed() <=> b.packed();
  }
};

inline Generator dy(int slot, int coord) {
  return Generator{GenKind::Dy, static_cast<std::uint16_t>(slot),
                   static_cast<std::uint16_t>(coord)};
}
inline Generator dwbar(int slot, int coord) {
  return Generator{GenKind::DwBar, static_cast<std::uint16_t>(slot),
                   static_cast<std::uint16_t>(coord)};
}

// The scalar variable a generator differentiates (dy <-> y, dwbar <-> wbar).
inline Var dual_var(const Generator& g) {
  return g.kind == GenKind::Dy ? y_var(g.slot, g.coord) : wbar_var(g.slot, g.coord);
}

struct BiDegree {
  int de_rham = 0;
  int dolbeault = 0;
  friend auto operator<=>(const BiDegree&, const BiDegree&) = default;
};

using Term = std::vector<Generator>;  // strictly increasing

inline BiDegree bidegree(const Term& t) {
  BiDegree d;
  for (const auto& g : t) (g.kind == GenKind::Dy ? d.de_rham : d.dolbeault)++;
  return d;
}

class MixedForm {
 public:
  explicit MixedForm(SpaceSignature sig, bool holomorphic_volume = false)
      : sig_(sig), holo_vol_(holomorphic_volume) {
    if (!sig.valid() || sig.k < 1)
      throw std::invalid_argument("MixedForm: invalid signature");
  }

  static MixedForm zero(SpaceSignature sig) { return MixedForm(sig); }
  static MixedForm scalar(SpaceSignature sig, Polynomial c) {
    MixedForm f(sig);
    f.add_term({}, std::move(c));
    return f;
  }
  static MixedForm one_form(SpaceSignature sig, Generator g,
                            Polynomial c = Polynomial(Rational(1))) {
    MixedForm f(sig);
    f.add_term({g}, std::move(c));
    return f;
  }

  const SpaceSignature& signature() const { return sig_; }
  bool holomorphic_volume() const { return holo_vol_; }
  void set_holomorphic_volume(bool v) { holo_vol_ = v; }
  const std::map<Term, Polynomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // The term list must be strictly increasing; duplicates annihilate upstream.
  void add_term(const Term& t, const Polynomial& c) {
    if (c.is_zero()) return;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      if (!(t[i] < t[i + 1])) throw std::invalid_argument("MixedForm: unsorted term");
    for (const auto& g : t) check_generator(g);
    auto it = terms_.find(t);
    if (it == terms_.end()) {
      terms_.emplace(t, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  MixedForm& operator+=(const MixedForm& o) {
    require_same_space(o);
    if (holo_vol_ != o.holo_vol_)
      throw std::invalid_argument("MixedForm: mixed holomorphic-volume flags in sum");
    for (const auto& [t, c] : o.terms_) add_term(t, c);
    return *this;
  }
  friend MixedForm operator+(MixedForm a, const MixedForm& b) { return a += b; }

  MixedForm operator*(const Polynomial& p) const {
    MixedForm out(sig_, holo_vol_);
    for (const auto& [t, c] : terms_) out.add_term(t, c * p);
    return out;
  }

  void require_same_space(const MixedForm& o) const {
    if (!(sig_ == o.sig_))
      throw std::invalid_argument("MixedForm: mismatched signatures");
  }

 private:
  void check_generator(const Generator& g) const {
    const int max_coord = g.kind == GenKind::Dy ? sig_.m : sig_.n;
    if (g.slot < 1 || static_cast<int>(g.slot) > sig_.slots() || g.coord < 1 ||
        static_cast<int>(g.coord) > max_coord)
      throw std::invalid_argument("MixedForm: generator outside signature");
  }

  SpaceSignature sig_;
  bool holo_vol_ = false;
  std::map<Term, Polynomial> terms_;
};

namespace detail {
// Merge sorted generator lists; returns 0 on a repeated generator, else the
// sign of the interleaving permutation.
inline int merge_terms(const Term& a, const Term& b, Term& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  int sign = 1;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      if ((a.size() - i) % 2 == 1) sign = -sign;
      out.push_back(b[j++]);
    } else {
      return 0;
    }
  }
  return sign;
}
}  // namespace detail

inline MixedForm wedge(const MixedForm& a, const MixedForm& b) {
  a.require_same_space(b);
  if (a.holomorphic_volume() && b.holomorphic_volume())
    return MixedForm::zero(a.signature());  // repeated holomorphic volume
  MixedForm out(a.signature(), a.holomorphic_volume() || b.holomorphic_volume());
  Term merged;
  for (const auto& [ta, ca] : a.terms()) {
    for (const auto& [tb, cb] : b.terms()) {
      const int sign = detail::merge_terms(ta, tb, merged);
      if (sign == 0) continue;
      out.add_term(merged, sign > 0 ? ca * cb : -(ca * cb));
    }
  }
  return out;
}

// Vector field with polynomial coefficients, expressed in the dual basis of
// the materialized generators.
using PolyVectorField = std::vector<std::pair<Generator, Polynomial>>;

// Slot-radial Euler field X^alpha = sum_i wbar_i^a d/dwbar_i^a + sum_j y_j^a d/dy_j^a.
inline PolyVectorField radial_field(const SpaceSignature& sig, int slot) {
  if (slot < 1 || slot > sig.slots())
    throw std::invalid_argument("radial_field: slot out of range");
  PolyVectorField X;
  for (int j = 1; j <= sig.m; ++j)
    X.push_back({dy(slot, j), Polynomial::variable(y_var(slot, j))});
  for (int i = 1; i <= sig.n; ++i)
    X.push_back({dwbar(slot, i), Polynomial::variable(wbar_var(slot, i))});
  return X;
}

// Interior product (contraction): an odd derivation of degree -1.
inline MixedForm contract(const PolyVectorField& X, const MixedForm& omega) {
  MixedForm out(omega.signature(), omega.holomorphic_volume());
  for (const auto& [t, c] : omega.terms()) {
    for (std::size_t pos = 0; pos < t.size(); ++pos) {
      for (const auto& [gen, coeff] : X) {
        if (!(t[pos] == gen)) continue;
        Term reduced = t;
        reduced.erase(reduced.begin() + static_cast<long>(pos));
        Polynomial contribution = c * coeff;
        if (pos % 2 == 1) contribution = -contribution;
        out.add_term(reduced, contribution);
      }
    }
  }
  return out;
}

inline std::map<BiDegree, MixedForm> bidegree_partition(const MixedForm& omega) {
  std::map<BiDegree, MixedForm> parts;
  for (const auto& [t, c] : omega.terms()) {
    const BiDegree d = bidegree(t);
    auto it = parts.find(d);
    if (it == parts.end())
      it = parts.emplace(d, MixedForm(omega.signature(), omega.holomorphic_volume())).first;
    it->second.add_term(t, c);
  }
  return parts;
}

// True iff every term exceeds the top bidegree of Y^(k-1); vacuously true for
// the zero form.  A normalized nonzero form can never exceed the bounds, so
// this is the computational certificate that a would-be term died by degree.
inline bool zero_by_degree(const MixedForm& omega) {
  const int max_dr = omega.signature().m * omega.signature().slots();
  const int max_db = omega.signature().n * omega.signature().slots();
  for (const auto& [t, c] : omega.terms()) {
    const BiDegree d = bidegree(t);
    if (d.de_rham <= max_dr && d.dolbeault <= max_db) return false;
  }
  return true;
}

// Full anti-holomorphic/de Rham volume term of Y^(k-1) in canonical order.
inline Term volume_term(const SpaceSignature& sig) {
  Term t;
  for (int slot = 1; slot <= sig.slots(); ++slot)
    for (int j = 1; j <= sig.m; ++j) t.push_back(dy(slot, j));
  for (int slot = 1; slot <= sig.slots(); ++slot)
    for (int i = 1; i <= sig.n; ++i) t.push_back(dwbar(slot, i));
  std::sort(t.begin(), t.end());
  return t;
}

// Sign s with term ^ complement = s * volume (0 if the complement is not
// disjoint, which cannot happen for a subset of distinct generators).
inline int complement_sign(const SpaceSignature& sig, const Term& t, Term* complement = nullptr) {
  const Term vol = volume_term(sig);
  Term comp;
  comp.reserve(vol.size() - t.size());
  std::size_t i = 0;
  for (const auto& g : vol) {
    if (i < t.size() && t[i] == g)
      ++i;
    else
      comp.push_back(g);
  }
  if (i != t.size()) throw std::invalid_argument("complement_sign: term outside volume");
  Term merged;
  const int sign = detail::merge_terms(t, comp, merged);
  if (complement) *complement = std::move(comp);
  return sign;
}

// Pairs a constant-coefficient form against the canonical volume orientation:
// sum over terms of coefficient * complement_sign.  Used to reduce kernel
// generator products against scalar test inputs.
inline Rational paired_against_volume(const MixedForm& omega) {
  Rational acc = 0;
  for (const auto& [t, c] : omega.terms()) {
    if (c.total_degree() != 0)
      throw std::invalid_argument("paired_against_volume: non-constant coefficient");
    Rational value = 0;
    for (const auto& [mo, coeff] : c.terms()) value = coeff;
    acc += Rational(complement_sign(omega.signature(), t)) * value;
  }
  return acc;
}

// One-form used by edge monomials: a single slot generator, or the slot-summed
// generator carried by the closing edge (slot == 0 encodes the sum).
inline MixedForm edge_one_form(const SpaceSignature& sig, GenKind kind, int slot, int coord) {
  MixedForm f(sig);
  if (slot != 0) {
    f.add_term({kind == GenKind::Dy ? dy(slot, coord) : dwbar(slot, coord)},
               Polynomial(Rational(1)));
    return f;
  }
  for (int s = 1; s <= sig.slots(); ++s)
    f.add_term({kind == GenKind::Dy ? dy(s, coord) : dwbar(s, coord)}, Polynomial(Rational(1)));
  return f;
}

// Generator monomial carried by a kernel summand on one edge: the canonical
// volume monomial of that edge's coordinates with one generator dropped
// (dropped_kind/dropped_coord), or nothing dropped for the full heat kernel.
// slot == 0 again means the closing edge with slot-summed generators.
inline MixedForm edge_generator_monomial(const SpaceSignature& sig, int slot, bool drop,
                                         GenKind dropped_kind, int dropped_coord) {
  MixedForm acc = MixedForm::scalar(sig, Polynomial(Rational(1)));
  for (int j = 1; j <= sig.m; ++j) {
    if (drop && dropped_kind == GenKind::Dy && dropped_coord == j) continue;
    acc = wedge(acc, edge_one_form(sig, GenKind::Dy, slot, j));
  }
  for (int i = 1; i <= sig.n; ++i) {
    if (drop && dropped_kind == GenKind::DwBar && dropped_coord == i) continue;
    acc = wedge(acc, edge_one_form(sig, GenKind::DwBar, slot, i));
  }
  return acc;
}

// Critical-dimension assembly for k = m+n: theta ^ (i_{X^1} ... i_{X^{k-1}} omega)
// with theta = (holomorphic volume) * sum_a i_{X^a} of the slot-summed edge
// monomial and omega the full volume of Y^(k-1).  Identically zero because a
// contraction against the same radial data appears twice.
inline MixedForm assemble_edge_case(const SpaceSignature& sig) {
  if (sig.k != sig.m + sig.n)
    throw std::invalid_argument("assemble_edge_case: requires k = m + n");
  const int slots = sig.slots();
  MixedForm xi = MixedForm::scalar(sig, Polynomial(Rational(1)));
  for (int i = 1; i <= sig.n; ++i) xi = wedge(xi, edge_one_form(sig, GenKind::DwBar, 0, i));
  for (int j = 1; j <= sig.m; ++j) xi = wedge(xi, edge_one_form(sig, GenKind::Dy, 0, j));

  MixedForm theta = MixedForm::zero(sig);
  for (int a = 1; a <= slots; ++a) theta += contract(radial_field(sig, a), xi);
  theta.set_holomorphic_volume(true);

  MixedForm omega = MixedForm::scalar(sig, Polynomial(Rational(1)));
  for (int a = 1; a <= slots; ++a) {
    for (int i = 1; i <= sig.n; ++i) omega = wedge(omega, edge_one_form(sig, GenKind::DwBar, a, i));
    for (int j = 1; j <= sig.m; ++j) omega = wedge(omega, edge_one_form(sig, GenKind::Dy, a, j));
  }
  MixedForm inner = omega;
  for (int a = 1; a <= slots; ++a) inner = contract(radial_field(sig, a), inner);
  return wedge(theta, inner);
}

}  // namespace oneloop::exterior
