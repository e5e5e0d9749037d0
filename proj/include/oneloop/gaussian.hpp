#pragma once

// Gaussian layer of the center-of-mass reduction: the (k-1)x(k-1) quadratic
// form matrix M = diag(1/T_a) + (1/T_k) J, its Sherman-Morrison closed-form
// inverse and determinant, Wick-pairing moments with covariance 2 (M^-1) per
// real coordinate, the exact scale dependence of those moments, and the exact
// first-order identities for the averaged derivative operators zeta / tau.

#include "oneloop/kernels.hpp"
#include "oneloop/polynomial.hpp"
#include "oneloop/scale_algebra.hpp"
#include "oneloop/variables.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oneloop::gaussian {

inline void check_scales(const std::vector<double>& T, const SpaceSignature& sig) {
  if (static_cast<int>(T.size()) != sig.k)
    throw std::invalid_argument("gaussian: scale vector size != k");
  for (double t : T)
    if (!(t > 0.0)) throw std::domain_error("gaussian: scales must be positive");
}

// Quadratic-form matrix of exp(-sum |q^a|^2/4T_a - |sum q^a|^2/4T_k) per real
// coordinate: M = diag(1/T_a) + (1/T_k) * ones.
inline Eigen::MatrixXd t_matrix(const std::vector<double>& T, const SpaceSignature& sig) {
  check_scales(T, sig);
  const int s = sig.slots();
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(s, s, 1.0 / T[static_cast<std::size_t>(sig.k - 1)]);
  for (int a = 0; a < s; ++a) M(a, a) += 1.0 / T[static_cast<std::size_t>(a)];
  return M;
}

// Sherman-Morrison closed form: (M^-1)_{ab} = delta_ab T_a - T_a T_b / (T_1+...+T_k).
template <class Scalar>
std::vector<std::vector<Scalar>> sm_inverse_impl(const std::vector<Scalar>& T, int k) {
  Scalar total = 0;
  for (const Scalar& t : T) total += t;
  const int s = k - 1;
  std::vector<std::vector<Scalar>> inv(static_cast<std::size_t>(s),
                                       std::vector<Scalar>(static_cast<std::size_t>(s)));
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      Scalar v = -T[static_cast<std::size_t>(a)] * T[static_cast<std::size_t>(b)] / total;
      if (a == b) v += T[static_cast<std::size_t>(a)];
      inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
    }
  return inv;
}

inline std::vector<std::vector<double>> sm_inverse(const std::vector<double>& T,
                                                   const SpaceSignature& sig) {
  check_scales(T, sig);
  return sm_inverse_impl<double>(T, sig.k);
}
inline std::vector<std::vector<Rational>> sm_inverse_exact(const std::vector<Rational>& T,
                                                           int k) {
  if (static_cast<int>(T.size()) != k) throw std::invalid_argument("sm_inverse_exact: size");
  return sm_inverse_impl<Rational>(T, k);
}

// det(M^-1) = T_1 ... T_k / (T_1 + ... + T_k).
template <class Scalar>
Scalar sm_det_inverse_impl(const std::vector<Scalar>& T) {
  Scalar total = 0, prod = 1;
  for (const Scalar& t : T) {
    total += t;
    prod *= t;
  }
  return prod / total;
}
inline double sm_det_inverse(const std::vector<double>& T, const SpaceSignature& sig) {
  check_scales(T, sig);
  return sm_det_inverse_impl<double>(T);
}
inline Rational sm_det_inverse_exact(const std::vector<Rational>& T) {
  return sm_det_inverse_impl<Rational>(T);
}

// Bare Gaussian mass: integral over Y^(k-1) of prod_a G_{T_a}(q^a) G_{T_k}(sum q)
// equals (4 pi (T_1+...+T_k))^-(m/2+n), the heat semigroup closed at the wheel.
inline double gaussian_mass(const std::vector<double>& T, const SpaceSignature& sig) {
  check_scales(T, sig);
  double total = 0.0;
  for (double t : T) total += t;
  const double half_dim = 0.5 * static_cast<double>(sig.m) + static_cast<double>(sig.n);
  return std::pow(4.0 * std::numbers::pi * total, -half_dim);
}

// ---------------------------------------------------------------------------
// Wick engine.  A slot is one scalar factor of a monomial; pairings respect
// the coordinate label and the field character (y with y, w with wbar).

struct WickSlot {
  VarKind kind;  // Y, W, or WBar
  int slot;      // 1..k-1
  int coord;     // coordinate label
};

inline bool wick_compatible(const WickSlot& a, const WickSlot& b) {
  if (a.coord != b.coord) return false;
  if (a.kind == VarKind::Y || b.kind == VarKind::Y) return a.kind == b.kind;
  return a.kind != b.kind;  // W pairs only with WBar
}

// Sums over perfect matchings; cov(a, b, false) supplies the pair value and
// cov(_, _, true) the multiplicative unit of the value type.
template <class Value, class Cov>
Value wick_sum(std::vector<WickSlot> slots, const Cov& cov, const Value& zero) {
  if (slots.size() % 2 == 1) return zero;
  std::function<Value(std::vector<WickSlot>&)> rec = [&](std::vector<WickSlot>& rest) -> Value {
    if (rest.empty()) return cov(WickSlot{VarKind::Y, 0, 0}, WickSlot{VarKind::Y, 0, 0}, true);
    Value acc = zero;
    WickSlot first = rest.front();
    for (std::size_t j = 1; j < rest.size(); ++j) {
      if (!wick_compatible(first, rest[j])) continue;
      std::vector<WickSlot> next;
      next.reserve(rest.size() - 2);
      for (std::size_t i = 1; i < rest.size(); ++i)
        if (i != j) next.push_back(rest[i]);
      Value tail = rec(next);
      acc = acc + cov(first, rest[j], false) * tail;
    }
    return acc;
  };
  return rec(slots);
}

// ---------------------------------------------------------------------------
// Moment requests: purely real (y) monomials; holomorphic w content is
// rejected because its bare moment vanishes identically.

class MomentRequest {
 public:
  MomentRequest(SpaceSignature sig, std::map<std::pair<int, int>, unsigned> y_exponents)
      : sig_(sig), nu_(std::move(y_exponents)) {
    for (const auto& [key, e] : nu_) {
      const auto [slot, coord] = key;
      if (slot < 1 || slot > sig_.slots() || coord < 1 || coord > sig_.m)
        throw std::invalid_argument("MomentRequest: variable outside signature");
      (void)e;
    }
  }

  static MomentRequest from_monomial(SpaceSignature sig, const Monomial& mo) {
    std::map<std::pair<int, int>, unsigned> nu;
    for (const auto& [v, e] : mo.factors) {
      if (v.kind != VarKind::Y)
        throw std::invalid_argument(
            "MomentRequest: only y variables allowed (w monomials have zero bare moment)");
      nu[{v.slot, v.coord}] += e;
    }
    return MomentRequest(sig, std::move(nu));
  }

  const SpaceSignature& signature() const { return sig_; }
  const std::map<std::pair<int, int>, unsigned>& exponents() const { return nu_; }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& [key, e] : nu_) d += e;
    return d;
  }

  std::vector<WickSlot> slots() const {
    std::vector<WickSlot> out;
    for (const auto& [key, e] : nu_)
      for (unsigned i = 0; i < e; ++i) out.push_back({VarKind::Y, key.first, key.second});
    return out;
  }

 private:
  SpaceSignature sig_;
  std::map<std::pair<int, int>, unsigned> nu_;
};

// Normalized moment <y^nu> under the bare wheel Gaussian: Wick pairs carry
// Cov(y_i^a, y_i^b) = 2 (M^-1)_{ab}, distinct coordinate labels decouple.
inline double gaussian_moment(const MomentRequest& req, const std::vector<double>& T) {
  check_scales(T, req.signature());
  const auto inv = sm_inverse(T, req.signature());
  return wick_sum<double>(
      req.slots(),
      [&](const WickSlot& a, const WickSlot& b, bool unit) -> double {
        if (unit) return 1.0;
        return 2.0 * inv[static_cast<std::size_t>(a.slot - 1)][static_cast<std::size_t>(b.slot - 1)];
      },
      0.0);
}

inline Rational gaussian_moment_exact(const MomentRequest& req, const std::vector<Rational>& T) {
  if (static_cast<int>(T.size()) != req.signature().k)
    throw std::invalid_argument("gaussian_moment_exact: scale vector size != k");
  const auto inv = sm_inverse_exact(T, req.signature().k);
  return wick_sum<Rational>(
      req.slots(),
      [&](const WickSlot& a, const WickSlot& b, bool unit) -> Rational {
        if (unit) return Rational(1);
        return Rational(2) *
               inv[static_cast<std::size_t>(a.slot - 1)][static_cast<std::size_t>(b.slot - 1)];
      },
      Rational(0));
}

// Exact scale dependence of a normalized moment: a sum of c * T^lambda over
// the common denominator (T_1+...+T_k)^(|nu|/2), with |lambda| = |nu| and
// T_a dividing T^lambda whenever y^a divides y^nu.
struct TDependence {
  unsigned sigma_power = 0;                                  // power of (T_1+...+T_k)
  std::vector<std::pair<std::vector<unsigned>, Rational>> terms;  // (lambda, coefficient)
};

inline TDependence t_dependence(const MomentRequest& req) {
  const int k = req.signature().k;
  const Polynomial sigma = ScaleExpr::sigma_poly(k);
  // (M^-1)_{ab} as ScaleExpr: numerator T_a (Sigma - T_a) on the diagonal,
  // -T_a T_b off it, denominator Sigma.
  auto entry = [&](int a, int b) {
    Polynomial num =
        a == b ? Polynomial::variable(t_var(a)) * (sigma - Polynomial::variable(t_var(b)))
               : -(Polynomial::variable(t_var(a)) * Polynomial::variable(t_var(b)));
    ScaleExpr e(k, std::move(num));
    e.divide_by_sigma();
    return e;
  };
  ScaleExpr moment = wick_sum<ScaleExpr>(
      req.slots(),
      [&](const WickSlot& a, const WickSlot& b, bool unit) -> ScaleExpr {
        if (unit) return ScaleExpr::constant(k, 1);
        return entry(a.slot, b.slot) * Polynomial(Rational(2));
      },
      ScaleExpr(k));
  TDependence out;
  out.sigma_power = moment.sigma_denominator_power();
  for (const auto& [mo, c] : moment.numerator().terms()) {
    std::vector<unsigned> lambda(static_cast<std::size_t>(k), 0);
    for (const auto& [v, e] : mo.factors) {
      if (v.kind != VarKind::T) throw std::logic_error("t_dependence: non-T numerator variable");
      lambda[static_cast<std::size_t>(v.slot - 1)] = e;
    }
    out.terms.push_back({std::move(lambda), c});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact identities for the averaged derivative operators.  All expressions are
// logarithmic actions (operator applied to the wheel Gaussian, divided by it),
// which the ScaleExpr algebra represents exactly.

// d/dw_i^a log G^(k) = -(1/4)(wbar_i^a / T_a + (sum_b wbar_i^b) / T_k).
inline ScaleExpr dlog_w(int slot, int coord, const SpaceSignature& sig) {
  const int k = sig.k;
  Polynomial sum_wbar;
  for (int b = 1; b <= sig.slots(); ++b) sum_wbar += Polynomial::variable(wbar_var(b, coord));
  ScaleExpr own(k, Rational(-1, 4) * Polynomial::variable(wbar_var(slot, coord)));
  own.divide_by_t(slot);
  ScaleExpr closing(k, Rational(-1, 4) * sum_wbar);
  closing.divide_by_t(k);
  return own + closing;
}

// d/dy_j^a log G^(k) = -(1/2)(y_j^a / T_a + (sum_b y_j^b) / T_k).
inline ScaleExpr dlog_y(int slot, int coord, const SpaceSignature& sig) {
  const int k = sig.k;
  Polynomial sum_y;
  for (int b = 1; b <= sig.slots(); ++b) sum_y += Polynomial::variable(y_var(b, coord));
  ScaleExpr own(k, Rational(-1, 2) * Polynomial::variable(y_var(slot, coord)));
  own.divide_by_t(slot);
  ScaleExpr closing(k, Rational(-1, 2) * sum_y);
  closing.divide_by_t(k);
  return own + closing;
}

// zeta^i log-action: (1/Sigma) sum_a T_a d/dw_i^a log G^(k).
inline ScaleExpr zeta_action(int coord, const SpaceSignature& sig) {
  const int k = sig.k;
  ScaleExpr acc(k);
  for (int a = 1; a <= sig.slots(); ++a) {
    ScaleExpr term = dlog_w(a, coord, sig) * Polynomial::variable(t_var(a));
    acc = acc + term;
  }
  acc.divide_by_sigma();
  return acc;
}

inline ScaleExpr tau_action(int coord, const SpaceSignature& sig) {
  const int k = sig.k;
  ScaleExpr acc(k);
  for (int a = 1; a <= sig.slots(); ++a) {
    ScaleExpr term = dlog_y(a, coord, sig) * Polynomial::variable(t_var(a));
    acc = acc + term;
  }
  acc.divide_by_sigma();
  return acc;
}

struct IdentityCheck {
  ScaleExpr residual;
  bool exact_zero;
};

// zeta^i G = -(sum_b wbar_i^b / 4 T_k) G.
inline IdentityCheck zeta_identity_check(int coord, const SpaceSignature& sig) {
  if (sig.n < 1 || sig.k < 2 || coord < 1 || coord > sig.n)
    throw std::invalid_argument("zeta_identity_check: need n >= 1, k >= 2, valid coord");
  const int k = sig.k;
  Polynomial sum_wbar;
  for (int b = 1; b <= sig.slots(); ++b) sum_wbar += Polynomial::variable(wbar_var(b, coord));
  ScaleExpr rhs(k, Rational(-1, 4) * sum_wbar);
  rhs.divide_by_t(k);
  ScaleExpr residual = zeta_action(coord, sig) - rhs;
  return {residual, residual.is_zero()};
}

// (d/dw_i^a - zeta^i) G = -(wbar_i^a / 4 T_a) G.
inline IdentityCheck zeta_corollary_check(int slot, int coord, const SpaceSignature& sig) {
  if (sig.n < 1 || sig.k < 2) throw std::invalid_argument("zeta_corollary_check: bad signature");
  const int k = sig.k;
  ScaleExpr lhs = dlog_w(slot, coord, sig) - zeta_action(coord, sig);
  ScaleExpr rhs(k, Rational(-1, 4) * Polynomial::variable(wbar_var(slot, coord)));
  rhs.divide_by_t(slot);
  ScaleExpr residual = lhs - rhs;
  return {residual, residual.is_zero()};
}

// tau^j G = -(sum_b y_j^b / 2 T_k) G.
inline IdentityCheck tau_identity_check(int coord, const SpaceSignature& sig) {
  if (sig.m < 1 || sig.k < 2 || coord < 1 || coord > sig.m)
    throw std::invalid_argument("tau_identity_check: need m >= 1, k >= 2, valid coord");
  const int k = sig.k;
  Polynomial sum_y;
  for (int b = 1; b <= sig.slots(); ++b) sum_y += Polynomial::variable(y_var(b, coord));
  ScaleExpr rhs(k, Rational(-1, 2) * sum_y);
  rhs.divide_by_t(k);
  ScaleExpr residual = tau_action(coord, sig) - rhs;
  return {residual, residual.is_zero()};
}

// (d/dy_j^a - tau^j) G = -(y_j^a / 2 T_a) G.
inline IdentityCheck tau_corollary_check(int slot, int coord, const SpaceSignature& sig) {
  if (sig.m < 1 || sig.k < 2) throw std::invalid_argument("tau_corollary_check: bad signature");
  const int k = sig.k;
  ScaleExpr lhs = dlog_y(slot, coord, sig) - tau_action(coord, sig);
  ScaleExpr rhs(k, Rational(-1, 2) * Polynomial::variable(y_var(slot, coord)));
  rhs.divide_by_t(slot);
  ScaleExpr residual = lhs - rhs;
  return {residual, residual.is_zero()};
}

// ---------------------------------------------------------------------------
// Numeric finite-difference mode for the same identities.

// Wheel Gaussian value at slot points q^1..q^(k-1).
inline double wheel_gaussian(const std::vector<kernels::Point>& q, const std::vector<double>& T,
                             const SpaceSignature& sig) {
  check_scales(T, sig);
  if (static_cast<int>(q.size()) != sig.slots())
    throw std::invalid_argument("wheel_gaussian: need k-1 slot points");
  double value = 1.0;
  kernels::Point total = kernels::Point::zero(sig);
  for (int a = 0; a < sig.slots(); ++a) {
    value *= kernels::gaussian_G(q[static_cast<std::size_t>(a)], T[static_cast<std::size_t>(a)], sig);
    for (int i = 0; i < sig.m; ++i)
      total.x[static_cast<std::size_t>(i)] += q[static_cast<std::size_t>(a)].x[static_cast<std::size_t>(i)];
    for (int i = 0; i < sig.n; ++i)
      total.z[static_cast<std::size_t>(i)] += q[static_cast<std::size_t>(a)].z[static_cast<std::size_t>(i)];
  }
  value *= kernels::gaussian_G(total, T[static_cast<std::size_t>(sig.k - 1)], sig);
  return value;
}

// |zeta^i G - rhs| at a point, with zeta applied by central differences on the
// holomorphic derivative d/dw = (d/du - i d/dv)/2.
inline double zeta_identity_residual_numeric(int coord, const SpaceSignature& sig,
                                             const std::vector<double>& T,
                                             const std::vector<kernels::Point>& q, double h) {
  double sigma = 0.0;
  for (double t : T) sigma += t;
  std::complex<double> lhs = 0.0;
  for (int a = 0; a < sig.slots(); ++a) {
    auto shifted = [&](double du, double dv) {
      std::vector<kernels::Point> qs = q;
      qs[static_cast<std::size_t>(a)].z[static_cast<std::size_t>(coord - 1)] +=
          std::complex<double>(du, dv);
      return wheel_gaussian(qs, T, sig);
    };
    const double du = (shifted(h, 0) - shifted(-h, 0)) / (2 * h);
    const double dv = (shifted(0, h) - shifted(0, -h)) / (2 * h);
    lhs += T[static_cast<std::size_t>(a)] * std::complex<double>(du, -dv) * 0.5;
  }
  lhs /= sigma;
  std::complex<double> sum_wbar = 0.0;
  for (int a = 0; a < sig.slots(); ++a)
    sum_wbar += std::conj(q[static_cast<std::size_t>(a)].z[static_cast<std::size_t>(coord - 1)]);
  const std::complex<double> rhs = -sum_wbar / (4.0 * T[static_cast<std::size_t>(sig.k - 1)]) *
                                   wheel_gaussian(q, T, sig);
  return std::abs(lhs - rhs);
}

inline double tau_identity_residual_numeric(int coord, const SpaceSignature& sig,
                                            const std::vector<double>& T,
                                            const std::vector<kernels::Point>& q, double h) {
  double sigma = 0.0;
  for (double t : T) sigma += t;
  double lhs = 0.0;
  for (int a = 0; a < sig.slots(); ++a) {
    auto shifted = [&](double dy) {
      std::vector<kernels::Point> qs = q;
      qs[static_cast<std::size_t>(a)].x[static_cast<std::size_t>(coord - 1)] += dy;
      return wheel_gaussian(qs, T, sig);
    };
    lhs += T[static_cast<std::size_t>(a)] * (shifted(h) - shifted(-h)) / (2 * h);
  }
  lhs /= sigma;
  double sum_y = 0.0;
  for (int a = 0; a < sig.slots(); ++a)
    sum_y += q[static_cast<std::size_t>(a)].x[static_cast<std::size_t>(coord - 1)];
  const double rhs =
      -sum_y / (2.0 * T[static_cast<std::size_t>(sig.k - 1)]) * wheel_gaussian(q, T, sig);
  return std::abs(lhs - rhs);
}

}  // namespace oneloop::gaussian
