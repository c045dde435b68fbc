#pragma once

#include <cmath>
#include <utility>

namespace ehtx {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximization of f on [lo, hi]; stops when the bracket is
/// narrower than tol. Endpoints are also compared so a monotone f returns
/// its boundary maximum exactly.
template <class F>
ScalarOptimum golden_section_max(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  ScalarOptimum best{lo, f(lo)};
  const double f_hi = f(hi);
  if (f_hi > best.value) best = {hi, f_hi};
  if (!(hi > lo)) return best;

  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm > best.value) best = {xm, fm};
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

/// Uniform scan with `points` samples over [lo, hi] (inclusive), then a
/// golden-section polish on the bracket around the best sample.
template <class F>
ScalarOptimum grid_then_golden_max(F&& f, double lo, double hi, int points,
                                   double tol) {
  if (!(hi > lo) || points < 2) return golden_section_max(f, lo, hi, tol);
  const double step = (hi - lo) / (points - 1);
  int best_i = 0;
  double best_v = f(lo);
  for (int i = 1; i < points; ++i) {
    const double v = f(i == points - 1 ? hi : lo + i * step);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + (best_i - 1) * step;
  const double b = best_i == points - 1 ? hi : lo + (best_i + 1) * step;
  ScalarOptimum polished = golden_section_max(f, a, b, tol);
  const double x_best = best_i == points - 1 ? hi : lo + best_i * step;
  if (best_v > polished.value) polished = {x_best, best_v};
  return polished;
}

/// Root of an increasing function g(x) = target on [lo, hi] by bisection.
/// Returns hi when g(hi) < target and lo when g(lo) > target.
template <class G>
double bisect_increasing(G&& g, double target, double lo, double hi,
                         double abs_tol) {
  if (g(hi) <= target) return hi;
  if (g(lo) >= target) return lo;
  for (int it = 0; it < 200 && hi - lo > abs_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ehtx
