#pragma once

// Wheel-diagram weights: the S-decomposition with per-edge de Rham coordinate
// labels, exact vanishing certificates, weight evaluation through the
// decorated-wheel engine, and the window-floor limit with Richardson
// extrapolation.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oneloop/exterior.hpp"
#include "oneloop/extrapolate.hpp"
#include "oneloop/loop_integral.hpp"
#include "oneloop/polynomial.hpp"
#include "oneloop/quadrature.hpp"
#include "oneloop/rational.hpp"
#include "oneloop/test_input.hpp"
#include "oneloop/variables.hpp"

namespace oneloop::wheel {

struct WheelData {
  SpaceSignature sig;
  std::vector<std::vector<int>> p;  // k rows, n columns of derivative orders

  static WheelData plain(const SpaceSignature& sig) {
    WheelData wd;
    wd.sig = sig;
    wd.p.assign(static_cast<std::size_t>(sig.k),
                std::vector<int>(static_cast<std::size_t>(sig.n), 0));
    return wd;
  }

  void validate() const {
    if (!sig.valid() || sig.k < 2) throw std::invalid_argument("WheelData: bad signature");
    if (static_cast<int>(p.size()) != sig.k)
      throw std::invalid_argument("WheelData: p needs one row per edge");
    for (const auto& row : p) {
      if (static_cast<int>(row.size()) != sig.n)
        throw std::invalid_argument("WheelData: p row needs one entry per w coordinate");
      for (int e : row)
        if (e < 0) throw std::invalid_argument("WheelData: negative derivative order");
    }
  }
};

// One S-term label: the edge subset carrying de Rham pieces and the dropped
// dy coordinate per such edge (ascending edge order).
struct EdgeDecoration {
  std::vector<int> S;
  std::vector<int> ell;

  void validate(const SpaceSignature& sig) const {
    if (!std::is_sorted(S.begin(), S.end()) ||
        std::adjacent_find(S.begin(), S.end()) != S.end())
      throw std::invalid_argument("EdgeDecoration: S must be strictly ascending");
    for (int e : S)
      if (e < 1 || e > sig.k) throw std::invalid_argument("EdgeDecoration: edge outside 1..k");
    if (ell.size() != S.size())
      throw std::invalid_argument("EdgeDecoration: one coordinate per S edge");
    for (int c : ell)
      if (c < 1 || c > sig.m)
        throw std::invalid_argument("EdgeDecoration: coordinate outside 1..m");
  }
};

namespace detail {

inline void subsets_of_size(int k, int size, int start, std::vector<int>& cur,
                            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (int e = start; e <= k; ++e) {
    cur.push_back(e);
    subsets_of_size(k, size, e + 1, cur, out);
    cur.pop_back();
  }
}

// All maps {1..count} -> {1..range} in lexicographic order; none when the
// range is empty and the domain is not.
inline std::vector<std::vector<int>> assignments(int count, int range) {
  if (count == 0) return {{}};
  if (range == 0) return {};
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(count), 1);
  for (;;) {
    out.push_back(cur);
    int i = count - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == range)
      cur[static_cast<std::size_t>(i--)] = 1;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  return out;
}

inline std::vector<int> complement(const SpaceSignature& sig, const std::vector<int>& S) {
  std::vector<int> out;
  for (int e = 1; e <= sig.k; ++e)
    if (!std::binary_search(S.begin(), S.end(), e)) out.push_back(e);
  return out;
}

}  // namespace detail

// Edge subsets that survive the cardinality window m <= |S| <= k-n, ascending
// size then lexicographic.
inline std::vector<std::vector<int>> admissible_S(const SpaceSignature& sig) {
  std::vector<std::vector<int>> out;
  const int lo = std::max(sig.m, 0);
  const int hi = std::min(sig.k - sig.n, sig.k);
  std::vector<int> cur;
  for (int size = lo; size <= hi; ++size) detail::subsets_of_size(sig.k, size, 1, cur, out);
  return out;
}

inline bool window_admits(const SpaceSignature& sig, const std::vector<int>& S) {
  const int s = static_cast<int>(S.size());
  return s >= sig.m && s <= sig.k - sig.n;
}

// Full per-edge kernel assignment for one (S, f) label and one Dolbeault
// coordinate assignment g on the complement (ascending edge order).
inline engine::Decoration decoration_for(const SpaceSignature& sig, const EdgeDecoration& dec,
                                         const std::vector<int>& g) {
  dec.validate(sig);
  const std::vector<int> comp = detail::complement(sig, dec.S);
  if (g.size() != comp.size())
    throw std::invalid_argument("decoration_for: one coordinate per complement edge");
  engine::Decoration edges(static_cast<std::size_t>(sig.k));
  for (std::size_t i = 0; i < dec.S.size(); ++i)
    edges[static_cast<std::size_t>(dec.S[i] - 1)] =
        engine::EdgeSpec{engine::EdgeKernel::DropY, dec.ell[i], true};
  for (std::size_t i = 0; i < comp.size(); ++i)
    edges[static_cast<std::size_t>(comp[i] - 1)] =
        engine::EdgeSpec{engine::EdgeKernel::DropWBar, g[i], true};
  return edges;
}

// All decorations of one S-term: the Dolbeault coordinate sum of Eq.-style
// label enumeration is materialized as one decoration per g.
inline std::vector<engine::Decoration> term_decorations(const SpaceSignature& sig,
                                                        const EdgeDecoration& dec) {
  const std::vector<int> comp = detail::complement(sig, dec.S);
  std::vector<engine::Decoration> out;
  for (const auto& g : detail::assignments(static_cast<int>(comp.size()), sig.n))
    out.push_back(decoration_for(sig, dec, g));
  return out;
}

inline std::vector<engine::Decoration> total_decorations(const SpaceSignature& sig,
                                                         bool admissible_only = true) {
  std::vector<engine::Decoration> out;
  const auto all_S = admissible_only ? admissible_S(sig) : [&] {
    std::vector<std::vector<int>> s;
    std::vector<int> cur;
    for (int size = 0; size <= sig.k; ++size) detail::subsets_of_size(sig.k, size, 1, cur, s);
    return s;
  }();
  for (const auto& S : all_S)
    for (const auto& f : detail::assignments(static_cast<int>(S.size()), sig.m)) {
      EdgeDecoration dec{S, f};
      for (auto& d : term_decorations(sig, dec)) out.push_back(std::move(d));
    }
  return out;
}

enum class VanishProof { NotVanishing, DegreeCount, EdgeCase };
struct VanishResult {
  bool vanishes = false;
  VanishProof proof = VanishProof::NotVanishing;
};

// k <= m+n certificates: for k < m+n every (S, f, g) generator wedge dies by
// degree; at k = m+n the assembled edge-case form is the exact zero form.
inline VanishResult vanishes_algebraically(const SpaceSignature& sig) {
  if (!sig.valid()) throw std::invalid_argument("vanishes_algebraically: bad signature");
  if (sig.k > sig.m + sig.n) return {false, VanishProof::NotVanishing};
  if (sig.k == sig.m + sig.n)
    return {exterior::assemble_edge_case(sig).is_zero(), VanishProof::EdgeCase};
  for (const auto& edges : total_decorations(sig, false))
    if (!exterior::zero_by_degree(engine::decoration_form(sig, edges)))
      return {false, VanishProof::DegreeCount};
  return {true, VanishProof::DegreeCount};
}

// Number of (f, g) coordinate labels of one S-term.
inline std::size_t s_term_label_count(const SpaceSignature& sig, const std::vector<int>& S) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < S.size(); ++i) count *= static_cast<std::size_t>(sig.m);
  for (std::size_t i = 0; i + S.size() < static_cast<std::size_t>(sig.k); ++i)
    count *= static_cast<std::size_t>(sig.n);
  return count;
}

// Generator-wedge content of one S-term with caller-chosen coefficients per
// (f, g) label: zero exactly when S violates the cardinality window (or no
// label exists).  Generic coefficients keep in-window terms nonzero.
inline exterior::MixedForm s_term_form(const SpaceSignature& sig, const std::vector<int>& S,
                                       const std::vector<Rational>& coeffs) {
  const std::vector<int> comp = detail::complement(sig, S);
  exterior::MixedForm acc = exterior::MixedForm::zero(sig);
  std::size_t label = 0;
  for (const auto& f : detail::assignments(static_cast<int>(S.size()), sig.m))
    for (const auto& g : detail::assignments(static_cast<int>(comp.size()), sig.n)) {
      if (label >= coeffs.size())
        throw std::invalid_argument("s_term_form: not enough coefficients");
      const engine::Decoration edges = decoration_for(sig, EdgeDecoration{S, f}, g);
      const Rational c = coeffs[label++] * engine::decoration_closing_sign(sig, edges);
      acc += exterior::wedge(exterior::MixedForm::scalar(sig, Polynomial(c)),
                             engine::decoration_form(sig, edges));
    }
  if (label != coeffs.size())
    throw std::invalid_argument("s_term_form: coefficient count mismatch");
  return acc;
}

// k = m+n: the fill-to-top pairing turns the edge-case vanishing into an exact
// polynomial identity (uniform per-edge scales factor out of the sum).
inline Polynomial edge_case_cancellation_polynomial(const SpaceSignature& sig) {
  if (sig.k != sig.m + sig.n)
    throw std::invalid_argument("edge_case_cancellation_polynomial: requires k = m+n");
  const TestInput unit = TestInput::diagonal(
      sig, Polynomial(Rational(1)), std::vector<Rational>(static_cast<std::size_t>(sig.m), 1),
      std::vector<Rational>(static_cast<std::size_t>(sig.n), 1));
  const auto decos = total_decorations(sig, false);
  if (decos.empty()) return Polynomial(Rational(0));
  engine::WheelIntegrand w(unit, WheelData::plain(sig).p, decos);
  Polynomial acc{Rational(0)};
  for (std::size_t i = 0; i < w.decoration_count(); ++i) {
    if (w.sigma(i) == 0) continue;
    acc += w.pre_ibp_prefactor(i) * w.pre_ibp_polynomial(i);
  }
  return acc;
}

namespace detail {

inline void check_weight_args(const WheelData& wd, const TestInput& phi, double eps, double L) {
  wd.validate();
  phi.validate();
  if (phi.sig.m != wd.sig.m || phi.sig.n != wd.sig.n || phi.sig.k != wd.sig.k)
    throw std::invalid_argument("wheel: test input signature mismatch");
  if (!(eps > 0.0) || !(eps <= L)) throw std::invalid_argument("wheel: need 0 < eps <= L");
}

}  // namespace detail

// One S-term: Dolbeault labels g are summed inside a single T-quadrature.
inline quadrature::QuadResult weight_term_result(
    const WheelData& wd, const EdgeDecoration& dec, const TestInput& phi, double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_weight_args(wd, phi, eps, L);
  dec.validate(wd.sig);
  const auto decos = term_decorations(wd.sig, dec);
  if (decos.empty()) return quadrature::QuadResult{0.0, 0.0, true, 0};
  const engine::WheelIntegrand w(phi, wd.p, decos, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

inline double weight_term(const WheelData& wd, const EdgeDecoration& dec, const TestInput& phi,
                          double eps, double L) {
  return weight_term_result(wd, dec, phi, eps, L).value;
}

inline quadrature::QuadResult weight_total_result(
    const WheelData& wd, const TestInput& phi, double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_weight_args(wd, phi, eps, L);
  if (wd.sig.k <= wd.sig.m + wd.sig.n) return quadrature::QuadResult{0.0, 0.0, true, 0};
  const auto decos = total_decorations(wd.sig);
  if (decos.empty()) return quadrature::QuadResult{0.0, 0.0, true, 0};
  const engine::WheelIntegrand w(phi, wd.p, decos, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

inline double weight_total(const WheelData& wd, const TestInput& phi, double eps, double L) {
  return weight_total_result(wd, phi, eps, L).value;
}

// Window-floor ladder of weight_total; exact zeros (no quadrature) in the
// algebraically vanishing regime.
inline engine::ConvergenceReport epsilon_limit(
    const WheelData& wd, const TestInput& phi, double L, const engine::LadderSpec& spec = {},
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_weight_args(wd, phi, L * 0.5, L);
  const auto zero_ladder = [&] {
    engine::ConvergenceReport rep;
    for (double e : dyadic_ladder(L, static_cast<std::size_t>(spec.rungs)))
      rep.ladder.push_back(LadderPoint{e, 0.0});
    rep.verdict = LadderVerdict::Converged;
    return rep;
  };
  if (wd.sig.k <= wd.sig.m + wd.sig.n) return zero_ladder();
  const auto decos = total_decorations(wd.sig);
  if (decos.empty()) return zero_ladder();
  const engine::WheelIntegrand w(phi, wd.p, decos, quad);
  return engine::epsilon_limit(w, L, spec, engine::Route::PostIbp);
}

// Cyclic relabeling: edge e -> e-1 with edge 1 wrapping to the closing slot,
// (p, S, ell) transported alongside and phi's variables substituted.  Applying
// it k times is the identity.  The sigma-stripped decoration integrals are
// exactly covariant: value/sigma at (S, ell, T) equals value/sigma of the
// transported term at the cycled T.  sigma itself pairs the decoration against
// a fixed labeled volume form, so it is not transported when k > m+n and the
// sigma-weighted totals need not match term by term; totals are invariant when
// k <= m+n (both sides vanish) and when k == 2.
struct RotatedTerm {
  WheelData wd;
  EdgeDecoration dec;
  TestInput phi;
};

inline RotatedTerm rotated(const WheelData& wd, const EdgeDecoration& dec, const TestInput& phi) {
  wd.validate();
  dec.validate(wd.sig);
  const int k = wd.sig.k;
  RotatedTerm out;
  out.wd.sig = wd.sig;
  out.wd.p.resize(static_cast<std::size_t>(k));
  for (int e = 1; e <= k; ++e)
    out.wd.p[static_cast<std::size_t>((e == 1 ? k : e - 1) - 1)] =
        wd.p[static_cast<std::size_t>(e - 1)];
  std::vector<std::pair<int, int>> moved;
  for (std::size_t i = 0; i < dec.S.size(); ++i)
    moved.emplace_back(dec.S[i] == 1 ? k : dec.S[i] - 1, dec.ell[i]);
  std::sort(moved.begin(), moved.end());
  for (const auto& [edge, coord] : moved) {
    out.dec.S.push_back(edge);
    out.dec.ell.push_back(coord);
  }
  out.phi = engine::rotate_test_input(phi);
  return out;
}

}  // namespace oneloop::wheel
