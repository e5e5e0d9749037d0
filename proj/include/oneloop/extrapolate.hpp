#pragma once

// Geometric-ladder extrapolation for cutoff limits.  Values are sampled along
// a dyadic ladder eps_j = L * 2^-j; successive increments of a convergent
// ladder are asymptotically geometric, so an Aitken-style correction
// v_j + d_j * r / (1 - r) estimates the limit and the corrected tail decides
// convergence.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oneloop {

enum class LadderVerdict { Converged, Inconclusive };

struct LadderPoint {
  double epsilon = 0.0;
  double value = 0.0;
};

struct ExtrapolationResult {
  std::vector<LadderPoint> rungs;
  double extrapolated = 0.0;
  double ratio = 0.0;        // estimated increment ratio, 0 when increments vanish
  double tail = 0.0;         // relative size of the last corrected difference
  LadderVerdict verdict = LadderVerdict::Inconclusive;
};

// rel_tol: the last three corrected differences must fall below
// rel_tol * max(|limit|, abs_floor) for a Converged verdict.
inline ExtrapolationResult extrapolate_ladder(const std::vector<LadderPoint>& rungs,
                                              double rel_tol = 1e-4,
                                              double abs_floor = 1e-12) {
  ExtrapolationResult out;
  out.rungs = rungs;
  const std::size_t n = rungs.size();
  if (n == 0) return out;
  out.extrapolated = rungs.back().value;
  if (n < 3) return out;

  std::vector<double> inc(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) inc[j] = rungs[j].value - rungs[j - 1].value;

  // Estimated ratio from the last increments that are numerically alive.
  double scale = std::fabs(rungs.back().value);
  if (scale < abs_floor) scale = abs_floor;
  const double dead = 1e-15 * scale;

  double ratio = 0.0;
  bool have_ratio = false;
  for (std::size_t j = n - 1; j >= 2; --j) {
    if (std::fabs(inc[j]) > dead && std::fabs(inc[j - 1]) > dead) {
      ratio = inc[j] / inc[j - 1];
      have_ratio = true;
      break;
    }
    if (j == 2) break;
  }
  out.ratio = have_ratio ? ratio : 0.0;

  // Corrected ladder: Aitken value per rung when the local ratio is usable,
  // otherwise the raw value (increments already at noise level).
  std::vector<double> corrected(n, 0.0);
  corrected[0] = rungs[0].value;
  corrected[1] = rungs[1].value;
  for (std::size_t j = 2; j < n; ++j) {
    const double denom = inc[j - 1] - inc[j];
    if (std::fabs(inc[j]) <= dead) {
      corrected[j] = rungs[j].value;
    } else if (std::fabs(denom) > dead * 1e-2) {
      corrected[j] = rungs[j].value + inc[j] * inc[j] / denom;
    } else {
      corrected[j] = rungs[j].value;  // ratio ~ 1: no safe correction
    }
  }
  out.extrapolated = corrected[n - 1];

  double lim_scale = std::fabs(out.extrapolated);
  if (lim_scale < abs_floor) lim_scale = abs_floor;

  std::size_t ok = 0;
  for (std::size_t j = n - 1; j >= 1 && ok < 3; --j) {
    const double diff = std::fabs(corrected[j] - corrected[j - 1]);
    if (diff <= rel_tol * lim_scale)
      ++ok;
    else
      break;
  }
  out.tail = std::fabs(corrected[n - 1] - corrected[n - 2]) / lim_scale;

  const bool diverging = have_ratio && std::fabs(ratio) >= 1.0 && std::fabs(inc[n - 1]) > rel_tol * lim_scale;
  if (ok >= 3 && !diverging) out.verdict = LadderVerdict::Converged;
  return out;
}

// Dyadic ladder of cutoffs eps_j = top * 2^-j, j = 0..rungs-1.
inline std::vector<double> dyadic_ladder(double top, std::size_t rungs) {
  std::vector<double> eps(rungs);
  double e = top;
  for (std::size_t j = 0; j < rungs; ++j) {
    eps[j] = e;
    e *= 0.5;
  }
  return eps;
}

}  // namespace oneloop
