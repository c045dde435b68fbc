#pragma once

#include <string>
#include <vector>

#include "ehtx/battery_model.hpp"
#include "ehtx/frame_model.hpp"

namespace ehtx {

struct OfflineProblem {
  std::vector<FrameSpec> frames;
  BatteryModel battery;
  double B0 = 0.0;
  /// Treat every frame as having zero circuit power.
  bool circuit_zero = false;
  bool enforce_bw = true;

  /// Throws ValidationError on an empty frame list, mixed frame durations,
  /// or an out-of-range field.
  void validate() const;
};

enum class PhaseTag {
  ChargePhase,  ///< rho free, alpha_b = 1
  SplitPower,   ///< rho = 0, alpha_b free
};

using PhasePattern = std::vector<PhaseTag>;

/// How a frame was represented in the convex program. Frames that cannot
/// power their circuit from harvest alone (c < p) or that see a zero gain
/// are scheduled as charge-only.
enum class FrameRole { ChargePhase, SplitPower, ChargeOnly };

std::string to_string(FrameRole r);

struct SolverStats {
  int convex_solves = 0;
  int newton_steps = 0;
  int outer_iterations = 0;
  double gap = 0.0;  ///< barrier duality-gap bound of the last solve
  /// True when every solved program was convex, so the optimum is global.
  bool global = true;
};

struct OfflineSolution {
  std::vector<FrameDecision> decisions;
  std::vector<FrameRole> roles;
  std::vector<double> e_b;            ///< external discharge energy per frame, J
  std::vector<double> rates;          ///< per-frame rate, bits/symbol
  double rate_avg = 0.0;              ///< bits/symbol
  std::vector<double> residuals;      ///< battery level after each frame, J
  std::vector<double> internal_in;    ///< internal energy stored per frame, J
  std::vector<double> internal_out;   ///< internal energy drained per frame, J
  std::vector<double> transmit_energy;
  SolverStats stats;
};

/// Zero-circuit-cost program: rho = 0, each frame chooses how much harvest
/// to store and how much battery energy to drain, under the true discharge
/// curve. Requires circuit_zero and a non-step battery.
OfflineSolution solve_p2(const OfflineProblem& prob);

/// Which discharge curve converts the program's battery energy into d_b.
enum class DischargeEval { Step, True };

/// Convex program under the flat (step) discharge efficiency with the phase
/// of every frame fixed by `pattern`. alpha_a_star may be empty, in which
/// case the optimal charging split is used for each frame.
OfflineSolution solve_p3_fixed_pattern(const OfflineProblem& prob, const PhasePattern& pattern,
                                       const std::vector<double>& alpha_a_star = {},
                                       DischargeEval eval = DischargeEval::Step);

/// Per-frame alpha_a that maximizes the stored power while charging.
std::vector<double> optimal_alpha_a(const OfflineProblem& prob);

/// Approximate solver for the general multi-frame problem: all-charge solve,
/// per-frame phase selection by loss comparison, final solve, and recovery of
/// d_b on the battery's own discharge curve. Never returns less than the
/// all-charge solution evaluated on the same curve.
OfflineSolution algorithm1(const OfflineProblem& prob);

/// Net internal drain of frame i is strictly positive (beyond 1e-12 J).
bool frame_receives_energy(const OfflineSolution& sol, std::size_t i);

/// Resistive losses, circuit energy and spilled harvest of one frame.
double loss_of_frame(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m);

enum class LossMode { AllCharge, ZeroRho };

/// Loss of frame i under the all-charge decision in `all_charge`, or under
/// the rho = 0 candidate that matches its transmit energy. Returns +inf for
/// a ZeroRho candidate that cannot match the energy.
double loss_of_frame(const OfflineProblem& prob, const OfflineSolution& all_charge, std::size_t i,
                     LossMode mode);

/// Best rate over every phase pattern (2^N convex solves), evaluated on the
/// battery's own discharge curve.
OfflineSolution solve_p3_enumerate(const OfflineProblem& prob);

/// Solve as if the battery were lossless and unlimited in power, then replay
/// the decisions on the real battery, trimming whatever becomes infeasible.
OfflineSolution ideal_battery_baseline(const OfflineProblem& prob);

/// Harvest goes straight to the transmitter; the battery is never used.
OfflineSolution no_battery_baseline(const OfflineProblem& prob);

/// Recomputes ledgers, residuals and rates of `decisions` on `m`, checking
/// feasibility frame by frame. Throws SolverError naming the frame and the
/// violated constraints on failure.
OfflineSolution evaluate_decisions(const OfflineProblem& prob, const std::vector<FrameDecision>& decisions,
                                   const BatteryModel& m);

}  // namespace ehtx
