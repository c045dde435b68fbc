#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

namespace ehtx {

/// Efficiencies follow the series-resistance curves
///   N_c(c) = 1.5 - 0.5 sqrt(1 + 4 r c / V^2),  N_d(d) = 0.5 + 0.5 sqrt(1 - 4 r d / V^2).
struct InternalResistance {};

/// Rate-independent efficiencies; resistance is ignored. The default split
/// gives a round-trip product of 0.75.
struct FixedEfficiency {
  double eta_c = 0.8660254037844386;
  double eta_d = 0.8660254037844386;
};

/// Internal-resistance charging with a flat discharge efficiency up to the
/// discharge limit (the d -> 0 limit of the resistive curve, i.e. 1.0).
struct StepDischarge {};

using BatteryVariant = std::variant<InternalResistance, FixedEfficiency, StepDischarge>;

struct BatteryModel {
  double capacity_B = std::numeric_limits<double>::infinity();
  double resistance_r = 0.0;
  double nominal_voltage_VB = 1.5;
  BatteryVariant variant = InternalResistance{};

  /// Throws ValidationError when a field is out of range.
  void validate() const;

  /// 2 V^2 / r for resistive charging, +inf for FixedEfficiency or r = 0.
  double max_charge_power() const;
  /// V^2 / (4 r) for resistive discharging, +inf for FixedEfficiency or r = 0.
  double max_discharge_power() const;

  bool is_fixed_efficiency() const { return std::holds_alternative<FixedEfficiency>(variant); }
  bool is_step_discharge() const { return std::holds_alternative<StepDischarge>(variant); }
  std::string variant_name() const;
};

BatteryModel make_internal_resistance(double capacity, double r, double vb = 1.5);
BatteryModel make_fixed_efficiency(double capacity, double eta_c, double eta_d, double vb = 1.5);
BatteryModel make_step_discharge(double capacity, double r, double vb = 1.5);

/// Same battery with discharge replaced by its step approximation. Fixed
/// efficiency models are already flat and are returned unchanged.
BatteryModel step_approximation(const BatteryModel& m);

/// Flat discharge efficiency used by the step approximation (N_d0).
double step_discharge_efficiency(const BatteryModel& m);

double charge_efficiency(double c_p, const BatteryModel& m);
double discharge_efficiency(double d_p, const BatteryModel& m);
double internal_charge_power(double c_p, const BatteryModel& m);
double internal_discharge_power(double d_p, const BatteryModel& m);

/// External discharge power whose internal drain equals target; capped at D_p.
double invert_internal_discharge(double target, const BatteryModel& m);

/// argmax of internal_charge_power over [0, min(c, C_p)].
double optimal_charge_power(double c, const BatteryModel& m);

/// External charge power on [0, upper] whose internal power equals target,
/// where internal_charge_power is increasing on [0, upper].
double invert_internal_charge(double target, double upper, const BatteryModel& m);

// First and second derivatives used by the Newton solver.
double internal_charge_slope(double c_p, const BatteryModel& m);
double internal_charge_curvature(double c_p, const BatteryModel& m);
double internal_discharge_slope(double d_p, const BatteryModel& m);
double internal_discharge_curvature(double d_p, const BatteryModel& m);

}  // namespace ehtx
