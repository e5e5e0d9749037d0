#pragma once

// Deterministic adaptive quadrature: Gauss-Kronrod 7-15 panels with global
// worst-panel refinement, geometric pre-splitting for scale integrals that
// span many decades, iterated application for k-dimensional boxes, and a
// Gauss-Hermite rule for Gaussian-weighted polynomial integrands.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace oneloop::quadrature {

struct QuadControl {
  double rel_tol = 1e-8;
  double abs_floor = 1e-14;
  int max_panels = 4000;
  bool log_panels = true;  // geometric pre-split when the interval spans decades
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evals = 0;
};

namespace detail {

// Kronrod 15 nodes (positive half) and weights; Gauss 7 weights are indexed by
// the odd Kronrod positions.
inline constexpr double kKronrodNodes[8] = {
    0.0000000000000000, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993944, 0.8648644233597691, 0.9491079123427585, 0.9914553711208126};
inline constexpr double kKronrodWeights[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
inline constexpr double kGaussWeights[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

struct Panel {
  double a, b, value, error;
  friend bool operator<(const Panel& x, const Panel& y) {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie-break
  }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = kKronrodNodes[i];
    double fv;
    if (i == 0) {
      fv = f(c);
      kron += kKronrodWeights[0] * fv;
      gauss += kGaussWeights[0] * fv;
    } else {
      const double fp = f(c + h * x), fm = f(c - h * x);
      fv = fp + fm;
      kron += kKronrodWeights[i] * fv;
      if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fv;
    }
  }
  return Panel{a, b, kron * h, std::abs(kron - gauss) * h};
}

}  // namespace detail

template <class F>
QuadResult integrate_interval(const F& f, double a, double b, const QuadControl& ctl = {}) {
  QuadResult res;
  if (!(b > a)) return res;  // empty or degenerate interval integrates to zero
  std::vector<double> cuts{a};
  if (ctl.log_panels && a > 0.0 && b / a > 16.0) {
    // one panel per factor of 4
    double x = a;
    while (x * 4.0 < b) {
      x *= 4.0;
      cuts.push_back(x);
    }
  }
  cuts.push_back(b);

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, err = 0.0;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gk15(f, cuts[i], cuts[i + 1]);
    evals += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int panels = static_cast<int>(cuts.size()) - 1;
  while (err > std::max(ctl.abs_floor, ctl.rel_tol * std::abs(total)) &&
         panels < ctl.max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    evals += 30;
    ++panels;
    total += left.value + right.value;
    err += left.error + right.error;
    heap.push(left);
    heap.push(right);
  }
  res.value = total;
  res.error = err;
  res.evals = evals;
  res.converged = err <= std::max(ctl.abs_floor, ctl.rel_tol * std::abs(total)) * 1.0000001 ||
                  err <= ctl.abs_floor;
  return res;
}

// Iterated adaptive integration over the axis-aligned box [lo, hi]^dims.
inline QuadResult integrate_box(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                const QuadControl& ctl = {}) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("integrate_box: bad bounds");
  const std::size_t dims = lo.size();
  std::vector<double> point(dims, 0.0);
  std::size_t evals = 0;
  bool inner_ok = true;

  std::function<double(std::size_t)> level = [&](std::size_t d) -> double {
    QuadControl inner = ctl;
    if (d + 1 < dims) inner.rel_tol = std::max(ctl.rel_tol * 0.5, 1e-12);
    auto res = integrate_interval(
        [&](double x) {
          point[d] = x;
          if (d + 1 == dims) {
            ++evals;
            return f(point);
          }
          return level(d + 1);
        },
        lo[d], hi[d], inner);
    inner_ok = inner_ok && res.converged;
    return res.value;
  };

  QuadResult out;
  out.value = level(0);
  out.evals = evals;
  out.converged = inner_ok;
  out.error = std::max(ctl.abs_floor, ctl.rel_tol * std::abs(out.value));
  return out;
}

// Probabilists' Gauss-Hermite rule: sum_i w_i p(x_i) equals the standard
// normal expectation of p for polynomials of degree <= 2*points - 1.
// Computed by Golub-Welsch on the Jacobi matrix (off-diagonal sqrt(i)).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline HermiteRule gauss_hermite(int points) {
  if (points < 1) throw std::invalid_argument("gauss_hermite: points >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    const double off = std::sqrt(static_cast<double>(i));
    J(i, i - 1) = off;
    J(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  HermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = v * v;
  }
  return rule;
}

}  // namespace oneloop::quadrature
