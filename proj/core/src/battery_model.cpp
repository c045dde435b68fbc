#include "ehtx/battery_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ehtx/errors.hpp"
#include "ehtx/scalar_search.hpp"

namespace ehtx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDomainSlack = 1e-12;

bool resistive_charge(const BatteryModel& m) {
  return !m.is_fixed_efficiency() && m.resistance_r > 0.0;
}

bool resistive_discharge(const BatteryModel& m) {
  return std::holds_alternative<InternalResistance>(m.variant) && m.resistance_r > 0.0;
}

double k_factor(const BatteryModel& m) {
  return 4.0 * m.resistance_r / (m.nominal_voltage_VB * m.nominal_voltage_VB);
}

[[noreturn]] void domain_fail(const char* what, double value, double limit) {
  std::ostringstream os;
  os << what << ": argument " << value << " outside [0, " << limit << "]";
  throw DomainError(os.str());
}

// Clamps a value within round-off of [0, limit], rejecting anything beyond.
double check_range(const char* what, double x, double limit) {
  if (std::isnan(x) || x < 0.0) domain_fail(what, x, limit);
  if (x > limit) {
    if (x > limit * (1.0 + kDomainSlack) + kDomainSlack * 1e-3) domain_fail(what, x, limit);
    return limit;
  }
  return x;
}

}  // namespace

void BatteryModel::validate() const {
  std::ostringstream os;
  if (std::isnan(capacity_B) || capacity_B < 0.0) os << "battery capacity must be >= 0; ";
  if (std::isnan(resistance_r) || resistance_r < 0.0) os << "battery resistance must be >= 0; ";
  if (!(nominal_voltage_VB > 0.0) || std::isinf(nominal_voltage_VB))
    os << "battery nominal voltage must be > 0; ";
  if (const auto* fe = std::get_if<FixedEfficiency>(&variant)) {
    if (!(fe->eta_c > 0.0 && fe->eta_c <= 1.0)) os << "eta_c must lie in (0, 1]; ";
    if (!(fe->eta_d > 0.0 && fe->eta_d <= 1.0)) os << "eta_d must lie in (0, 1]; ";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw ValidationError(msg.substr(0, msg.size() - 2));
}

double BatteryModel::max_charge_power() const {
  if (!resistive_charge(*this)) return kInf;
  return 2.0 * nominal_voltage_VB * nominal_voltage_VB / resistance_r;
}

double BatteryModel::max_discharge_power() const {
  if (is_fixed_efficiency() || resistance_r <= 0.0) return kInf;
  return nominal_voltage_VB * nominal_voltage_VB / (4.0 * resistance_r);
}

std::string BatteryModel::variant_name() const {
  if (is_fixed_efficiency()) return "fixed_efficiency";
  if (is_step_discharge()) return "step_discharge";
  return "internal_resistance";
}

BatteryModel make_internal_resistance(double capacity, double r, double vb) {
  return BatteryModel{capacity, r, vb, InternalResistance{}};
}

BatteryModel make_fixed_efficiency(double capacity, double eta_c, double eta_d, double vb) {
  return BatteryModel{capacity, 0.0, vb, FixedEfficiency{eta_c, eta_d}};
}

BatteryModel make_step_discharge(double capacity, double r, double vb) {
  return BatteryModel{capacity, r, vb, StepDischarge{}};
}

BatteryModel step_approximation(const BatteryModel& m) {
  if (m.is_fixed_efficiency()) return m;
  BatteryModel s = m;
  s.variant = StepDischarge{};
  return s;
}

double step_discharge_efficiency(const BatteryModel& m) {
  if (const auto* fe = std::get_if<FixedEfficiency>(&m.variant)) return fe->eta_d;
  return 1.0;
}

double charge_efficiency(double c_p, const BatteryModel& m) {
  if (const auto* fe = std::get_if<FixedEfficiency>(&m.variant)) {
    if (std::isnan(c_p) || c_p < 0.0) domain_fail("charge_efficiency", c_p, kInf);
    return fe->eta_c;
  }
  const double x = check_range("charge_efficiency", c_p, m.max_charge_power());
  if (!resistive_charge(m)) return 1.0;
  return 1.5 - 0.5 * std::sqrt(1.0 + k_factor(m) * x);
}

double discharge_efficiency(double d_p, const BatteryModel& m) {
  if (const auto* fe = std::get_if<FixedEfficiency>(&m.variant)) {
    if (std::isnan(d_p) || d_p < 0.0) domain_fail("discharge_efficiency", d_p, kInf);
    return fe->eta_d;
  }
  const double x = check_range("discharge_efficiency", d_p, m.max_discharge_power());
  if (!resistive_discharge(m)) return step_discharge_efficiency(m);
  // k d written as d / D_p so the argument is exactly 0 at the limit.
  return 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - x / m.max_discharge_power()));
}

double internal_charge_power(double c_p, const BatteryModel& m) {
  const double eff = charge_efficiency(c_p, m);
  return eff * std::min(c_p, m.max_charge_power());
}

double internal_discharge_power(double d_p, const BatteryModel& m) {
  const double eff = discharge_efficiency(d_p, m);
  if (d_p == 0.0) return 0.0;
  return std::min(d_p, m.max_discharge_power()) / eff;
}

double invert_internal_discharge(double target, const BatteryModel& m) {
  if (std::isnan(target) || target < 0.0)
    domain_fail("invert_internal_discharge", target, kInf);
  if (target == 0.0) return 0.0;
  const double d_max = m.max_discharge_power();
  if (std::isinf(d_max)) return target * discharge_efficiency(0.0, m);
  if (!resistive_discharge(m)) return std::min(d_max, target * step_discharge_efficiency(m));
  // u = d / N_d(d) with s = sqrt(1 - d / D_p) gives u = 2 D_p (1 - s), hence
  // d = u (1 - u / (4 D_p)) up to u = 2 D_p.
  if (target >= 2.0 * d_max) return d_max;
  return std::min(d_max, target * (1.0 - target / (4.0 * d_max)));
}

double optimal_charge_power(double c, const BatteryModel& m) {
  if (std::isnan(c) || c < 0.0) domain_fail("optimal_charge_power", c, kInf);
  if (!resistive_charge(m)) return c;
  // Stationary point of N_c(x) x: with s = sqrt(1 + k x), s^2 - 2 s - 1/3 = 0.
  const double s = 1.0 + std::sqrt(4.0 / 3.0);
  const double stationary = (s * s - 1.0) / k_factor(m);
  return std::min({c, stationary, m.max_charge_power()});
}

double invert_internal_charge(double target, double upper, const BatteryModel& m) {
  if (std::isnan(target) || target < 0.0) domain_fail("invert_internal_charge", target, kInf);
  if (target == 0.0 || upper <= 0.0) return 0.0;
  if (!resistive_charge(m)) return std::min(upper, target / charge_efficiency(0.0, m));
  return bisect_increasing([&](double x) { return internal_charge_power(x, m); }, target, 0.0,
                           upper, 1e-15);
}

double internal_charge_slope(double c_p, const BatteryModel& m) {
  if (!resistive_charge(m)) return charge_efficiency(0.0, m);
  const double k = k_factor(m);
  const double root = std::sqrt(1.0 + k * c_p);
  return 1.5 - 0.5 * root - 0.25 * k * c_p / root;
}

double internal_charge_curvature(double c_p, const BatteryModel& m) {
  if (!resistive_charge(m)) return 0.0;
  const double k = k_factor(m);
  const double u = 1.0 + k * c_p;
  return -k * (4.0 + 3.0 * k * c_p) / (8.0 * u * std::sqrt(u));
}

double internal_discharge_slope(double d_p, const BatteryModel& m) {
  if (!resistive_discharge(m)) return 1.0 / discharge_efficiency(0.0, m);
  const double y = std::sqrt(std::max(0.0, 1.0 - k_factor(m) * d_p));
  return 1.0 / y;
}

double internal_discharge_curvature(double d_p, const BatteryModel& m) {
  if (!resistive_discharge(m)) return 0.0;
  const double y = std::sqrt(std::max(0.0, 1.0 - k_factor(m) * d_p));
  return k_factor(m) / (2.0 * y * y * y);
}

}  // namespace ehtx
