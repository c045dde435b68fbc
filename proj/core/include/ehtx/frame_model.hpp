#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ehtx/battery_model.hpp"

namespace ehtx {

struct NoiseModel {
  enum class Mode { UnitPSD, SpectralDensity };
  Mode mode = Mode::UnitPSD;
  double N0 = 1e-15;
  bool half_factor = true;
  /// Bandwidth in the N0*W noise term; 0 means "use the frame bandwidth".
  double noise_bandwidth = 0.0;

  static NoiseModel unit_psd() { return {}; }
  static NoiseModel spectral_density(double n0, bool half, double noise_bw = 0.0) {
    return {Mode::SpectralDensity, n0, half, noise_bw};
  }
};

struct FrameSpec {
  double harvested_power_c = 0.0;
  double channel_gain_h = 1.0;
  double duration_tau = 1.0;
  double symbols_Ns = 1e6;
  double circuit_power_p = 0.0;
  double bandwidth_W = 1e6;
  NoiseModel noise{};

  void validate() const;
};

struct FrameDecision {
  double rho = 0.0;
  double alpha_a = 1.0;
  double alpha_b = 1.0;
  double gamma = 0.0;
  double d_b = 0.0;

  /// External discharge energy over the transmit phase.
  double e_b(double tau) const { return d_b * (1.0 - rho) * tau; }
};

struct EnergyLedger {
  double stored_in_phase1 = 0.0;       ///< internal energy added while charging only
  double internal_drain = 0.0;         ///< internal energy removed in phase 2
  double internal_store_phase2 = 0.0;  ///< internal energy added in phase 2
  double transmit_energy = 0.0;        ///< radiated energy over the frame
  double circuit_energy = 0.0;         ///< p times the active transmit time
  double loss_total = 0.0;             ///< charge + discharge resistive losses + circuit
  double spilled = 0.0;                ///< harvested energy neither stored nor used

  double net_battery_change() const {
    return stored_in_phase1 + internal_store_phase2 - internal_drain;
  }
};

enum class Constraint {
  EnergyCausality,   // battery cannot go negative
  CapacityEnd,       // end-of-frame level <= B
  CapacityPhase1,    // level after the charging phase <= B
  RhoBounds,         // 0 <= rho <= 1
  RhoBandwidth,      // rho <= rho_W
  AlphaBounds,       // alpha_c <= alpha_a, alpha_b <= 1
  GammaBounds,       // 0 <= gamma < 1
  DischargeBounds,   // 0 <= d_b <= D_p
  ChargeDischargeExclusive,  // (1 - alpha_b) d_b = 0
  InitialEnergy,     // 0 <= B0 <= B
};

std::string to_string(Constraint c);

struct Violation {
  Constraint constraint;
  double slack;  ///< amount by which the constraint is exceeded (> 0)
};

inline constexpr double kFeasTol = 1e-9;

double rho_bandwidth_limit(const FrameSpec& f);

/// UnitPSD: log2(1 + h P) with P the symbol energy. SpectralDensity:
/// (1/2) log2(1 + h P / (N0 W)) with the per-symbol energy standing in for P_t.
double rate_bits_per_symbol(double P, double h, const NoiseModel& n, double frame_bandwidth);

/// SNR per joule of phase energy spread over `symbols` symbols, and the
/// prefactor multiplying log2(1 + snr).
double snr_per_joule(const FrameSpec& f, double symbols);
double rate_prefactor(const NoiseModel& n);

/// alpha_c = max(0, 1 - C_p / c).
double alpha_lower_bound(double c, const BatteryModel& m);

std::vector<Violation> check_feasible(const FrameDecision& d, const FrameSpec& f,
                                      const BatteryModel& m, double B0, bool enforce_bw,
                                      double tol = kFeasTol);

EnergyLedger energy_ledger(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m);

/// Rate of a feasible decision in bits/symbol; throws InfeasibleDecision otherwise.
double frame_rate(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m, double B0,
                  bool enforce_bw = false);

/// Rate without the feasibility check, for inner loops that maintain it.
double frame_rate_unchecked(const FrameDecision& d, const FrameSpec& f);

class InfeasibleDecision : public std::runtime_error {
 public:
  InfeasibleDecision(std::vector<Violation> v);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace ehtx
