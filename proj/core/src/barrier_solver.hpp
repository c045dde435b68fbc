#pragma once

// Primal log-barrier method for the multi-frame allocation programs. Each
// frame owns at most two scalar variables (a, b); the battery level after
// frame i is B0 + sum_{k<=i} (q0_k + qa_k a_k + qb_k b_k), which keeps every
// coupling constraint linear and lets the Newton matrix be assembled from
// suffix sums in O(n^2).

#include <functional>
#include <vector>

namespace ehtx::detail {

struct EnergyEval {
  double E = 0.0;
  double ga = 0.0, gb = 0.0;
  double haa = 0.0, hab = 0.0, hbb = 0.0;
};

struct FrameTerm {
  bool has_a = false, has_b = false;
  double a_lo = 0.0, a_hi = 0.0, b_lo = 0.0, b_hi = 0.0;  // hi may be +inf
  double a_fixed = 0.0, b_fixed = 0.0;                   // values when absent
  double qa = 0.0, qb = 0.0;                             // battery inflow per unit
  double q0 = 0.0;                                       // constant inflow
  double mid_a = 0.0;  // level bump from `a` alone (charging phase), 0 if none
  // Optional b + couple_a * a <= couple_rhs.
  bool has_couple = false;
  double couple_a = 0.0, couple_rhs = 0.0;
  // Transmit energy and objective weight * log(1 + snr * E).
  bool transmits = false;
  double weight = 0.0;
  double snr = 0.0;
  std::function<EnergyEval(double a, double b)> energy;
};

struct BarrierProblem {
  std::vector<FrameTerm> frames;
  double B0 = 0.0;
  double B = 0.0;  // +inf drops capacity constraints
  double relax = 1e-10;
  /// Typical per-frame energy. When positive, the objective is rescaled so
  /// that its value at this energy is O(1) and the gap tolerance is relative.
  double energy_scale = 0.0;
  /// Optional warm start, one entry per frame; empty starts every variable
  /// at its lower bound.
  std::vector<double> start_a, start_b;
};

struct BarrierSettings {
  double gap_tol = 1e-9;
  double t0 = 1.0;
  double mu = 10.0;
  double newton_tol = 1e-11;
  int max_newton_per_outer = 400;
};

struct BarrierResult {
  std::vector<double> a, b;
  std::vector<double> interior_a, interior_b;  // final iterate before clamping; a valid warm start
  int newton_steps = 0;
  int outer_iterations = 0;
  double gap = 0.0;
  double objective = 0.0;
};

/// Maximizes sum_i weight_i log(1 + snr_i E_i) subject to the frame bounds,
/// couplings, E_i >= 0 on transmitting frames, and 0 <= level_i <= B
/// (plus the mid-frame level for frames with mid_a > 0). Throws SolverError
/// on divergence.
BarrierResult solve_barrier(const BarrierProblem& prob, const BarrierSettings& settings = {});

}  // namespace ehtx::detail
