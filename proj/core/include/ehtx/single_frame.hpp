#pragma once

#include "ehtx/battery_model.hpp"
#include "ehtx/frame_model.hpp"

namespace ehtx {

enum class LimitingFactor { RateOptimal, CapacityLimited, BandwidthLimited };

std::string to_string(LimitingFactor l);

struct SingleFrameSolution {
  FrameDecision decision;
  double rate = 0.0;  ///< bits/symbol
  double rho_r = 0.0;
  double rho_B = 0.0;
  LimitingFactor limiting = LimitingFactor::RateOptimal;
  /// Set when no decision can power the circuit; the returned decision then
  /// only charges the battery.
  bool no_transmission_feasible = false;
};

struct SingleFrameOptions {
  bool enforce_bw = true;
  /// Size of the uniform scan that cross-checks the golden-section search
  /// over rho; 0 disables the scan.
  int grid_check_points = 10000;
  double golden_tol = 1e-10;
  /// When capacity binds before the rate optimum, also consider longer
  /// charging phases at a reduced charge rate that still fills the battery.
  /// false keeps rho <= rho_B.
  bool slow_fill = true;
};

/// External discharge power that drains `internal_energy` over `duration`,
/// capped at the discharge limit.
double drain_power(double internal_energy, double duration, const BatteryModel& m);

SingleFrameSolution solve_single_frame(const FrameSpec& f, const BatteryModel& m, double B0,
                                       const SingleFrameOptions& opt = {});

struct GridResolution {
  double rho_step = 1e-3;
  double alpha_step = 1e-3;
};

/// Exhaustive grid over (rho, alpha_a) with d_b either draining the battery or
/// zero and alpha_b = 1; the best feasible point wins.
SingleFrameSolution brute_force_single_frame(const FrameSpec& f, const BatteryModel& m, double B0,
                                             const GridResolution& grid, bool enforce_bw = true);

}  // namespace ehtx
