#pragma once

// Anomaly wheels: the closing edge is distinguished, pinned at the window
// floor, and carries the full heat kernel instead of a propagator piece.
// Provides Theta weights, the iterated (eps then L) limit, the 2d BF scalar
// coefficient, and structural consistency entries against the wheel pipeline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oneloop/extrapolate.hpp"
#include "oneloop/loop_integral.hpp"
#include "oneloop/quadrature.hpp"
#include "oneloop/rational.hpp"
#include "oneloop/test_input.hpp"
#include "oneloop/variables.hpp"
#include "oneloop/wheel.hpp"

namespace oneloop::anomaly {

// Flavor-pairing tag for the two propagator orientations of a mixed edge; the
// analytic pipeline erases it, which pair_factor_equality makes checkable.
enum class Orientation { AB, BA };

struct AnomalyWheel {
  SpaceSignature sig;
  std::vector<std::vector<int>> p;  // k rows, n columns
  std::vector<int> S;               // ascending subset of {1..k-1}
  std::vector<int> f;               // de Rham coordinate per S edge
  std::vector<int> g;               // Dolbeault coordinate per remaining propagator edge
  Orientation orientation = Orientation::AB;

  void validate() const {
    if (!sig.valid() || sig.k < 2) throw std::invalid_argument("AnomalyWheel: bad signature");
    if (static_cast<int>(p.size()) != sig.k)
      throw std::invalid_argument("AnomalyWheel: p needs one row per edge");
    for (const auto& row : p) {
      if (static_cast<int>(row.size()) != sig.n)
        throw std::invalid_argument("AnomalyWheel: p row needs one entry per w coordinate");
      for (int e : row)
        if (e < 0) throw std::invalid_argument("AnomalyWheel: negative derivative order");
    }
    if (!std::is_sorted(S.begin(), S.end()) ||
        std::adjacent_find(S.begin(), S.end()) != S.end())
      throw std::invalid_argument("AnomalyWheel: S must be strictly ascending");
    for (int e : S)
      if (e < 1 || e >= sig.k)
        throw std::invalid_argument("AnomalyWheel: S must avoid the distinguished edge");
    if (f.size() != S.size()) throw std::invalid_argument("AnomalyWheel: one f per S edge");
    for (int c : f)
      if (c < 1 || c > sig.m) throw std::invalid_argument("AnomalyWheel: f outside 1..m");
    if (static_cast<int>(g.size()) != sig.k - 1 - static_cast<int>(S.size()))
      throw std::invalid_argument("AnomalyWheel: one g per complement propagator edge");
    for (int c : g)
      if (c < 1 || c > sig.n) throw std::invalid_argument("AnomalyWheel: g outside 1..n");
  }
};

// Cardinality window of surviving anomaly terms: S within {1..k-1} and
// m <= |S| <= k-n-1; empty when k <= m+n.
inline std::vector<std::vector<int>> admissible_S_anomaly(const SpaceSignature& sig) {
  std::vector<std::vector<int>> out;
  const int lo = std::max(sig.m, 0);
  const int hi = std::min(sig.k - sig.n - 1, sig.k - 1);
  std::vector<int> cur;
  for (int size = lo; size <= hi; ++size)
    wheel::detail::subsets_of_size(sig.k - 1, size, 1, cur, out);
  return out;
}

inline bool window_admits_anomaly(const SpaceSignature& sig, const std::vector<int>& S) {
  const int s = static_cast<int>(S.size());
  return s >= sig.m && s <= sig.k - sig.n - 1;
}

// Per-edge kernels of one Theta term: propagator drops below k, the pinned
// full heat kernel on the distinguished edge.
inline engine::Decoration decoration_of(const AnomalyWheel& aw) {
  aw.validate();
  engine::Decoration edges(static_cast<std::size_t>(aw.sig.k));
  std::size_t si = 0, gi = 0;
  for (int e = 1; e < aw.sig.k; ++e) {
    if (si < aw.S.size() && aw.S[si] == e)
      edges[static_cast<std::size_t>(e - 1)] =
          engine::EdgeSpec{engine::EdgeKernel::DropY, aw.f[si++], true};
    else
      edges[static_cast<std::size_t>(e - 1)] =
          engine::EdgeSpec{engine::EdgeKernel::DropWBar, aw.g[gi++], true};
  }
  edges.back() = engine::EdgeSpec{engine::EdgeKernel::HeatFull, 0, false};
  return edges;
}

namespace detail {

inline void check_theta_args(const AnomalyWheel& aw, const TestInput& phi, double eps, double L) {
  aw.validate();
  phi.validate();
  if (phi.sig.m != aw.sig.m || phi.sig.n != aw.sig.n || phi.sig.k != aw.sig.k)
    throw std::invalid_argument("anomaly: test input signature mismatch");
  if (!(eps > 0.0) || !(eps <= L)) throw std::invalid_argument("anomaly: need 0 < eps <= L");
}

}  // namespace detail

inline quadrature::QuadResult theta_weight_result(
    const AnomalyWheel& aw, const TestInput& phi, double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_theta_args(aw, phi, eps, L);
  const engine::WheelIntegrand w(phi, aw.p, {decoration_of(aw)}, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

inline double theta_weight(const AnomalyWheel& aw, const TestInput& phi, double eps, double L) {
  return theta_weight_result(aw, phi, eps, L).value;
}

// Theta summed over the admissible (S, f, g) labels at fixed (sig, p).
inline quadrature::QuadResult theta_total_result(
    const SpaceSignature& sig, const std::vector<std::vector<int>>& p, const TestInput& phi,
    double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  std::vector<engine::Decoration> decos;
  for (const auto& S : admissible_S_anomaly(sig))
    for (const auto& f : wheel::detail::assignments(static_cast<int>(S.size()), sig.m))
      for (const auto& g : wheel::detail::assignments(
               sig.k - 1 - static_cast<int>(S.size()), sig.n)) {
        AnomalyWheel aw{sig, p, S, f, g, Orientation::AB};
        decos.push_back(decoration_of(aw));
      }
  if (decos.empty()) return quadrature::QuadResult{0.0, 0.0, true, 0};
  const engine::WheelIntegrand w(phi, p, decos, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

struct DoubleLimitSpec {
  engine::LadderSpec inner;
  int outer_rungs = 6;
  double outer_tol = 1e-3;
};

// Iterated limit: inner window-floor extrapolation at each outer scale, then
// the outer scales shrink dyadically.  Converged means the outer sequence of
// inner extrapolations has fallen below outer_tol in magnitude; a stalled
// ladder stays Inconclusive (divergence is never claimed).
inline engine::ConvergenceReport double_limit(
    const SpaceSignature& sig, const std::vector<std::vector<int>>& p, const TestInput& phi,
    double L,
    const DoubleLimitSpec& spec = {},
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  engine::ConvergenceReport rep;
  if (!(L > 0.0)) throw std::invalid_argument("double_limit: L must be positive");
  std::vector<engine::Decoration> decos;
  for (const auto& S : admissible_S_anomaly(sig))
    for (const auto& f : wheel::detail::assignments(static_cast<int>(S.size()), sig.m))
      for (const auto& g : wheel::detail::assignments(
               sig.k - 1 - static_cast<int>(S.size()), sig.n)) {
        AnomalyWheel aw{sig, p, S, f, g, Orientation::AB};
        decos.push_back(decoration_of(aw));
      }
  const std::vector<double> outer = dyadic_ladder(L, static_cast<std::size_t>(spec.outer_rungs));
  if (decos.empty()) {
    for (double l : outer) rep.ladder.push_back(LadderPoint{l, 0.0});
    rep.verdict = LadderVerdict::Converged;
    return rep;
  }
  const engine::WheelIntegrand w(phi, p, decos, quad);
  for (double l : outer) {
    const engine::ConvergenceReport inner = engine::epsilon_limit(w, l, spec.inner);
    rep.quadrature_ok = rep.quadrature_ok && inner.quadrature_ok;
    rep.quadrature_error += inner.quadrature_error;
    rep.ladder.push_back(LadderPoint{l, inner.extrapolated});
  }
  rep.extrapolated = rep.ladder.back().value;
  rep.error = std::abs(rep.extrapolated);
  rep.verdict = rep.error <= spec.outer_tol ? LadderVerdict::Converged
                                            : LadderVerdict::Inconclusive;
  return rep;
}

// 2d BF scalar factor int_eps^L eps dt / (eps+t)^2 by closed form; the L -> 0,
// eps -> 0 iterated limit is 1/2, the sharp m = 0 counterpoint to the m >= 1
// vanishing.
inline double bf_anomaly_coefficient(double eps, double L) {
  if (!(eps > 0.0) || !(eps <= L))
    throw std::invalid_argument("bf_anomaly_coefficient: need 0 < eps <= L");
  return 0.5 - eps / (eps + L);
}

inline quadrature::QuadResult bf_anomaly_coefficient_quadrature(double eps, double L) {
  if (!(eps > 0.0) || !(eps <= L))
    throw std::invalid_argument("bf_anomaly_coefficient: need 0 < eps <= L");
  quadrature::QuadControl ctl;
  ctl.rel_tol = 1e-12;
  ctl.abs_floor = 1e-15;
  ctl.log_panels = true;
  return quadrature::integrate_interval(
      [eps](double t) { return eps / ((eps + t) * (eps + t)); }, eps, L, ctl);
}

// Difference of the two analytic factors of an orientation pair.  Orientation
// is erased by the pipeline, so configurations that agree after erasure give
// an exact-zero residual; perturbed kernel data shows up as a nonzero value.
inline double pair_factor_equality(const AnomalyWheel& a, const AnomalyWheel& b,
                                   const TestInput& phi, double eps, double L) {
  return theta_weight(a, phi, eps, L) - theta_weight(b, phi, eps, L);
}

// Theta with the distinguished edge moved to absolute position d by cyclic
// transport of every decoration, derivative row, and phi itself.  The
// relabeling is a change of variables on the sigma-stripped integral, so
// value(d)/sigma(d) is the same for every d; the orientation factor itself is
// evaluated against fixed labels and alternates with the transport, so the
// raw values agree up to that sign (exactly equal at d = k).
inline quadrature::QuadResult theta_distinguished_at(
    const AnomalyWheel& aw, const TestInput& phi, int d, double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_theta_args(aw, phi, eps, L);
  if (d < 1 || d > aw.sig.k)
    throw std::invalid_argument("theta_distinguished_at: position outside 1..k");
  engine::DecoratedInstance inst{{decoration_of(aw)}, aw.p, phi};
  for (int step = 0; step < aw.sig.k - d; ++step) inst = engine::rotate_once(inst);
  const engine::WheelIntegrand w(inst.phi, inst.p, inst.decorations, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

// Structural consistency with the wheel pipeline: freeing the distinguished
// edge scale and giving the edge its propagator pieces (summed over Dolbeault
// coordinates) must land exactly on the wheel S-term with the same labels.
inline quadrature::QuadResult wheel_consistency_result(
    const AnomalyWheel& aw, const TestInput& phi, double eps, double L,
    quadrature::QuadControl quad = engine::WheelIntegrand::default_t_quadrature()) {
  detail::check_theta_args(aw, phi, eps, L);
  if (aw.sig.n < 1)
    throw std::invalid_argument("wheel_consistency_result: needs a Dolbeault direction");
  std::vector<engine::Decoration> decos;
  for (int c = 1; c <= aw.sig.n; ++c) {
    engine::Decoration edges = decoration_of(aw);
    for (auto& e : edges) e.integrated = true;
    edges.back() = engine::EdgeSpec{engine::EdgeKernel::DropWBar, c, true};
    decos.push_back(std::move(edges));
  }
  const engine::WheelIntegrand w(phi, aw.p, decos, quad);
  return w.integrate(eps, L, engine::Route::PostIbp);
}

}  // namespace oneloop::anomaly
