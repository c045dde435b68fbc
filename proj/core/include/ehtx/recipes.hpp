#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ehtx/csv.hpp"
#include "ehtx/experiment.hpp"
#include "ehtx/scenario.hpp"

namespace ehtx {

struct RecipeOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 0;  ///< 0 keeps the recipe's own trial count
  std::optional<DischargeModel> discharge;
  bool timing = false;
};

/// fig3a, fig3b, fig4, fig5, fig6, fig7, table2.
const std::vector<std::string>& recipe_names();

/// Runs a figure or table recipe and returns its CSV table. Throws
/// ValidationError for an unknown name.
CsvTable run_recipe(const std::string& name, const RecipeOptions& opt = {});

/// Shared frame of the numerical-results recipes: tau = 1 s, N_s = 1e6,
/// N0 = 1e-15 W/Hz over a 1 MHz noise bandwidth, half factor on. The
/// frame bandwidth is set so that rho_W = 1 - N_s / (W tau) = rho_w.
FrameSpec results_frame(double circuit_power, double rho_w = 0.9);

/// Online comparison: p = 50 mW, B = 100 mJ, V_B = 1.5 V, N = 5, rho_W = 0.9,
/// harvest uniform on {50, 100} mW, unit-mean exponential gain, step
/// discharge, 1e4 trials, DP grid step 0.5 mJ.
Scenario fig7_scenario(double resistance);
inline const std::vector<double> kFig7Resistances{1.0, 5.0, 20.0};
inline const std::vector<PolicyId> kFig7Policies{PolicyId::Offline, PolicyId::Dp, PolicyId::Statistical,
                                                 PolicyId::Greedy, PolicyId::Ctsr, PolicyId::Cpsr};

/// Offline comparison: harvest uniform on {mean/2, 3 mean/2}, p = 10 mW,
/// B = 100 mJ, N = 20, 100 trials, unit-mean exponential gain.
Scenario fig6_scenario(double mean_harvest, double resistance);

/// Per-frame transmit powers (W) of the zero-circuit-cost program for a
/// harvest profile falling linearly from c_max to 0 over `frames` frames,
/// with unlimited capacity and unit gain.
struct PowerProfile {
  std::vector<double> harvest;
  std::vector<double> transmit_power;
};
PowerProfile fig5_profile(const BatteryModel& m, std::size_t frames = 21, double c_max = 0.2);

}  // namespace ehtx
