#pragma once

// Scale-indexed heat kernel on R^m x C^n and its gauge-fixed derivative
// kernel E_T, split into de Rham and Dolbeault summands.
//
//   G_T(q)  = (4 pi T)^(-(m+2n)/2) exp(-(|x|^2 + |z|^2) / 4T)
//   E_T     = -(1/2T) * i_X (dy_1...dy_m dwbar_1...dwbar_n) * G_T
//
// with X the radial field; equivalently every summand equals the matching
// first derivative of G_T (the Dolbeault ones carry the gauge factor 2):
//   coeff(drop dy_l)    = (-1)^(l-1)   * d G_T / d x_l
//   coeff(drop dwbar_j) = (-1)^(m+j-1) * 2 d G_T / d z_j.

#include "oneloop/exterior.hpp"
#include "oneloop/quadrature.hpp"
#include "oneloop/variables.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oneloop::kernels {

struct Point {
  std::vector<double> x;                 // size m
  std::vector<std::complex<double>> z;   // size n

  static Point zero(const SpaceSignature& sig) {
    return Point{std::vector<double>(static_cast<std::size_t>(sig.m), 0.0),
                 std::vector<std::complex<double>>(static_cast<std::size_t>(sig.n), 0.0)};
  }
};

// One evaluation scale T inside a mollification window [epsilon, L].
struct ScaleVector {
  double T = 1.0;
  double epsilon = 0.0;
  double L = 1.0;
  bool valid() const { return epsilon >= 0.0 && epsilon <= T && T <= L; }
};

inline void check_point(const Point& p, const SpaceSignature& sig) {
  if (static_cast<int>(p.x.size()) != sig.m || static_cast<int>(p.z.size()) != sig.n)
    throw std::invalid_argument("kernels: point dimension mismatch");
}

inline double squared_length(const Point& p) {
  double s = 0.0;
  for (double v : p.x) s += v * v;
  for (const auto& c : p.z) s += std::norm(c);
  return s;
}

// Scalar heat kernel between two points at scale T > 0.
inline double heat_kernel(const Point& p1, const Point& p2, double T,
                          const SpaceSignature& sig) {
  check_point(p1, sig);
  check_point(p2, sig);
  if (!(T > 0.0)) throw std::domain_error("heat_kernel: T must be positive");
  double d2 = 0.0;
  for (int i = 0; i < sig.m; ++i) {
    const double d = p1.x[static_cast<std::size_t>(i)] - p2.x[static_cast<std::size_t>(i)];
    d2 += d * d;
  }
  for (int i = 0; i < sig.n; ++i)
    d2 += std::norm(p1.z[static_cast<std::size_t>(i)] - p2.z[static_cast<std::size_t>(i)]);
  const double dim = static_cast<double>(sig.m + 2 * sig.n);
  return std::pow(4.0 * std::numbers::pi * T, -0.5 * dim) * std::exp(-d2 / (4.0 * T));
}

// Centered Gaussian factor G_T(q) carried by every kernel summand.
inline double gaussian_G(const Point& q, double T, const SpaceSignature& sig) {
  return heat_kernel(q, Point::zero(sig), T, sig);
}

// One summand of E_T: the generator monomial is the edge volume monomial with
// `dropped` removed; `coeff` multiplies G_T implicitly (it already includes it).
struct ESummand {
  exterior::GenKind dropped_kind;
  int dropped_coord = 0;            // 1..m or 1..n
  std::complex<double> coeff;       // full numeric value, G_T included
  exterior::BiDegree bidegree;      // (m-1, n) or (m, n-1)
};

struct KernelSplit {
  std::vector<ESummand> de_rham;    // E^d summands (one per dropped dy)
  std::vector<ESummand> dolbeault;  // E^dbar summands (one per dropped dwbar)
  double gaussian = 0.0;            // G_T(q)
};

// Contraction position sign of a dropped generator inside dy_1..dy_m dwbar_1..dwbar_n.
inline int drop_sign(const SpaceSignature& sig, exterior::GenKind kind, int coord) {
  const int pos = kind == exterior::GenKind::Dy ? coord : sig.m + coord;  // 1-based
  return pos % 2 == 1 ? 1 : -1;
}

inline KernelSplit E_coefficients(const Point& q, double T, const SpaceSignature& sig) {
  check_point(q, sig);
  if (!(T > 0.0)) throw std::domain_error("E_coefficients: T must be positive");
  KernelSplit split;
  split.gaussian = gaussian_G(q, T, sig);
  const double scale = -1.0 / (2.0 * T);
  for (int l = 1; l <= sig.m; ++l) {
    ESummand s;
    s.dropped_kind = exterior::GenKind::Dy;
    s.dropped_coord = l;
    s.coeff = static_cast<double>(drop_sign(sig, s.dropped_kind, l)) * scale *
              q.x[static_cast<std::size_t>(l - 1)] * split.gaussian;
    s.bidegree = {sig.m - 1, sig.n};
    split.de_rham.push_back(s);
  }
  for (int j = 1; j <= sig.n; ++j) {
    ESummand s;
    s.dropped_kind = exterior::GenKind::DwBar;
    s.dropped_coord = j;
    s.coeff = static_cast<double>(drop_sign(sig, s.dropped_kind, j)) * scale *
              std::conj(q.z[static_cast<std::size_t>(j - 1)]) * split.gaussian;
    s.bidegree = {sig.m, sig.n - 1};
    split.dolbeault.push_back(s);
  }
  return split;
}

// Mollified propagator with |I| holomorphic vertex derivatives applied:
// per summand, (-1)^|I| Int_eps^L  conj(z)^I / (4T)^|I| * coeff(q, T) dT.
// I is a multi-index over the n complex coordinates.
struct PropagatorValues {
  std::vector<ESummand> de_rham;
  std::vector<ESummand> dolbeault;
  double quad_error = 0.0;
};

inline PropagatorValues propagator_derivative(const Point& q, const std::vector<unsigned>& I,
                                              double epsilon, double L,
                                              const SpaceSignature& sig,
                                              const quadrature::QuadControl& ctl = {
                                                  .rel_tol = 1e-9, .abs_floor = 1e-16}) {
  check_point(q, sig);
  if (static_cast<int>(I.size()) != sig.n)
    throw std::invalid_argument("propagator_derivative: multi-index size != n");
  if (!(epsilon > 0.0 && epsilon <= L))
    throw std::domain_error("propagator_derivative: need 0 < epsilon <= L");
  unsigned order = 0;
  std::complex<double> zbar_I = 1.0;
  for (int j = 0; j < sig.n; ++j) {
    order += I[static_cast<std::size_t>(j)];
    for (unsigned e = 0; e < I[static_cast<std::size_t>(j)]; ++e)
      zbar_I *= std::conj(q.z[static_cast<std::size_t>(j)]);
  }
  const double deriv_sign = order % 2 == 0 ? 1.0 : -1.0;

  PropagatorValues out;
  double err = 0.0;
  auto integrate_summand = [&](exterior::GenKind kind, int coord) {
    auto component = [&](bool imag) {
      auto res = quadrature::integrate_interval(
          [&](double T) {
            const KernelSplit split = E_coefficients(q, T, sig);
            const ESummand& s = kind == exterior::GenKind::Dy
                                    ? split.de_rham[static_cast<std::size_t>(coord - 1)]
                                    : split.dolbeault[static_cast<std::size_t>(coord - 1)];
            const std::complex<double> v =
                deriv_sign * zbar_I * std::pow(4.0 * T, -static_cast<double>(order)) * s.coeff;
            return imag ? v.imag() : v.real();
          },
          epsilon, L, ctl);
      err += res.error;
      return res.value;
    };
    ESummand s;
    s.dropped_kind = kind;
    s.dropped_coord = coord;
    s.coeff = {component(false), component(true)};
    s.bidegree = kind == exterior::GenKind::Dy ? exterior::BiDegree{sig.m - 1, sig.n}
                                               : exterior::BiDegree{sig.m, sig.n - 1};
    return s;
  };
  for (int l = 1; l <= sig.m; ++l) out.de_rham.push_back(integrate_summand(exterior::GenKind::Dy, l));
  for (int j = 1; j <= sig.n; ++j)
    out.dolbeault.push_back(integrate_summand(exterior::GenKind::DwBar, j));
  out.quad_error = err;
  return out;
}

}  // namespace oneloop::kernels
