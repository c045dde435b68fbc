#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehtx/online.hpp"
#include "ehtx/scenario.hpp"

namespace ehtx {

enum class PolicyId { Offline, IdealBattery, NoBattery, Dp, Statistical, Greedy, Ctsr, Cpsr };

std::string to_string(PolicyId p);
/// Accepts the names printed by to_string (e.g. "dp", "ideal_battery").
/// Throws ValidationError otherwise.
PolicyId parse_policy(const std::string& name);
const std::vector<PolicyId>& all_policies();

/// Harvest and gain sequences of one trial, drawn from the Harvest and Gain
/// streams of (seed, trial).
Realization generate_realization(const Scenario& s, std::uint32_t trial);
/// One realization per trial.
std::vector<Realization> generate_realizations(const Scenario& s);
/// Independent draws from the Fitting stream, used to fit CTSR and CPSR.
std::vector<Realization> fitting_samples(const Scenario& s);

struct FrameRow {
  std::size_t trial = 0;
  std::size_t frame = 0;
  FrameDecision decision;
  double e_b = 0.0;       ///< J
  double residual = 0.0;  ///< J after the frame
  double rate_bps = 0.0;
};

struct PolicyResult {
  PolicyId id = PolicyId::Offline;
  double mean_rate_bps = 0.0;
  double std_rate_bps = 0.0;  ///< sample std over trials; 0 for a single trial
  /// Wall-clock seconds per frame including setup; NaN unless timing was requested.
  double runtime_norm_s = 0.0;
  std::vector<double> trial_rates_bps;
  /// Fitted ratio for CTSR (rho) and CPSR (alpha_b); NaN otherwise.
  double fitted_ratio = 0.0;
  std::vector<FrameRow> frames;  ///< filled when per-frame output is requested
};

struct ExperimentResult {
  std::vector<PolicyResult> policies;
};

struct ExperimentOptions {
  bool per_frame = false;
  bool timing = false;
};

/// Runs every policy on the same realizations. Policy and solver errors are
/// rethrown with the policy name and trial index prepended.
ExperimentResult run_experiment(const Scenario& s, const std::vector<PolicyId>& policies,
                                const ExperimentOptions& opt = {});

/// bits/symbol to bits/s for the scenario's frame.
double to_bps(double bits_per_symbol, const FrameSpec& f);

enum class DischargeModel { True, Step };
DischargeModel parse_discharge_model(const std::string& name);
/// Step replaces the discharge curve by its flat approximation; True turns a
/// step_discharge battery back into the resistive curve.
BatteryModel with_discharge_model(const BatteryModel& m, DischargeModel d);

}  // namespace ehtx
