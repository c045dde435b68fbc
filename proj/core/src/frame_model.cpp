#include "ehtx/frame_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ehtx/errors.hpp"

namespace ehtx {

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::EnergyCausality: return "energy_causality";
    case Constraint::CapacityEnd: return "capacity_end";
    case Constraint::CapacityPhase1: return "capacity_phase1";
    case Constraint::RhoBounds: return "rho_bounds";
    case Constraint::RhoBandwidth: return "rho_bandwidth";
    case Constraint::AlphaBounds: return "alpha_bounds";
    case Constraint::GammaBounds: return "gamma_bounds";
    case Constraint::DischargeBounds: return "discharge_bounds";
    case Constraint::ChargeDischargeExclusive: return "charge_discharge_exclusive";
    case Constraint::InitialEnergy: return "initial_energy";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "infeasible decision:";
  for (const auto& x : v) os << ' ' << to_string(x.constraint) << "(+" << x.slack << ')';
  return os.str();
}

}  // namespace

InfeasibleDecision::InfeasibleDecision(std::vector<Violation> v)
    : std::runtime_error(describe(v)), violations_(std::move(v)) {}

void FrameSpec::validate() const {
  std::ostringstream os;
  if (!(harvested_power_c >= 0.0) || std::isinf(harvested_power_c)) os << "harvested power c must be finite and >= 0; ";
  if (!(channel_gain_h >= 0.0) || std::isinf(channel_gain_h)) os << "channel gain h must be finite and >= 0; ";
  if (!(duration_tau > 0.0) || std::isinf(duration_tau)) os << "frame duration must be > 0; ";
  if (!(symbols_Ns > 0.0) || std::isinf(symbols_Ns)) os << "symbols per frame must be > 0; ";
  if (!(circuit_power_p >= 0.0) || std::isinf(circuit_power_p)) os << "circuit power must be >= 0; ";
  if (!(bandwidth_W > 0.0)) os << "bandwidth must be > 0; ";
  if (bandwidth_W > 0.0 && duration_tau > 0.0 && symbols_Ns > bandwidth_W * duration_tau * (1.0 + 1e-12))
    os << "symbols per frame exceed bandwidth * duration; ";
  if (noise.mode == NoiseModel::Mode::SpectralDensity) {
    if (!(noise.N0 > 0.0)) os << "noise density N0 must be > 0; ";
    if (!(noise.noise_bandwidth >= 0.0)) os << "noise bandwidth must be >= 0; ";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw ValidationError(msg.substr(0, msg.size() - 2));
}

double rho_bandwidth_limit(const FrameSpec& f) {
  return std::max(0.0, 1.0 - f.symbols_Ns / (f.bandwidth_W * f.duration_tau));
}

double rate_bits_per_symbol(double P, double h, const NoiseModel& n, double frame_bandwidth) {
  if (std::isnan(P) || P < 0.0 || std::isnan(h) || h < 0.0) {
    std::ostringstream os;
    os << "rate_bits_per_symbol: negative input (P=" << P << ", h=" << h << ')';
    throw DomainError(os.str());
  }
  if (n.mode == NoiseModel::Mode::UnitPSD) return std::log2(1.0 + h * P);
  const double w = n.noise_bandwidth > 0.0 ? n.noise_bandwidth : frame_bandwidth;
  return rate_prefactor(n) * std::log2(1.0 + h * P / (n.N0 * w));
}

double snr_per_joule(const FrameSpec& f, double symbols) {
  const double h = f.channel_gain_h;
  if (f.noise.mode == NoiseModel::Mode::UnitPSD) return h / symbols;
  const double w = f.noise.noise_bandwidth > 0.0 ? f.noise.noise_bandwidth : f.bandwidth_W;
  return h / (symbols * f.noise.N0 * w);
}

double rate_prefactor(const NoiseModel& n) {
  return n.mode == NoiseModel::Mode::SpectralDensity && n.half_factor ? 0.5 : 1.0;
}

double alpha_lower_bound(double c, const BatteryModel& m) {
  if (c <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - m.max_charge_power() / c);
}

EnergyLedger energy_ledger(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m) {
  const double tau = f.duration_tau;
  const double c = f.harvested_power_c;
  const double p = f.circuit_power_p;
  const double rho = std::clamp(d.rho, 0.0, 1.0);
  const double t1 = rho * tau;
  const double t2 = (1.0 - rho) * tau;
  const double cp_max = m.max_charge_power();
  const double charge_a = std::min(std::max(0.0, (1.0 - d.alpha_a) * c), cp_max);
  const double charge_b = std::min(std::max(0.0, (1.0 - d.alpha_b) * c), cp_max);
  const double db = std::min(std::max(0.0, d.d_b), m.max_discharge_power());

  EnergyLedger L;
  L.stored_in_phase1 = t1 > 0.0 ? internal_charge_power(charge_a, m) * t1 : 0.0;
  L.internal_store_phase2 = t2 > 0.0 ? internal_charge_power(charge_b, m) * t2 : 0.0;
  L.internal_drain = t2 > 0.0 ? internal_discharge_power(db, m) * t2 : 0.0;

  const double direct_a = d.alpha_a * c;
  const bool active_a = d.gamma > 0.0 && direct_a > p && t1 > 0.0;
  const double supply_b = d.alpha_b * c + db;
  const bool active_b = supply_b > p && t2 > 0.0;

  L.transmit_energy = (active_b ? (supply_b - p) * t2 : 0.0) + (active_a ? (direct_a - p) * t1 : 0.0);
  L.circuit_energy = (active_b ? p * t2 : 0.0) + (active_a ? p * t1 : 0.0);
  L.spilled = (active_a ? 0.0 : direct_a * t1) + (active_b ? 0.0 : supply_b * t2);

  const double charge_loss = (charge_a * t1 - L.stored_in_phase1) + (charge_b * t2 - L.internal_store_phase2);
  const double discharge_loss = L.internal_drain - db * t2;
  L.loss_total = charge_loss + discharge_loss + L.circuit_energy;
  return L;
}

std::vector<Violation> check_feasible(const FrameDecision& d, const FrameSpec& f,
                                      const BatteryModel& m, double B0, bool enforce_bw,
                                      double tol) {
  std::vector<Violation> out;
  auto flag = [&](Constraint c, double excess) {
    if (excess > tol || std::isnan(excess)) out.push_back({c, excess});
  };
  const double B = m.capacity_B;
  flag(Constraint::InitialEnergy, std::max(-B0, B0 - B));
  flag(Constraint::RhoBounds, std::max(-d.rho, d.rho - 1.0));
  if (enforce_bw) flag(Constraint::RhoBandwidth, d.rho - rho_bandwidth_limit(f));
  const double a_lo = alpha_lower_bound(f.harvested_power_c, m);
  flag(Constraint::AlphaBounds,
       std::max({a_lo - d.alpha_a, d.alpha_a - 1.0, a_lo - d.alpha_b, d.alpha_b - 1.0}));
  // gamma lives in [0, 1); the open end is checked exactly.
  if (d.gamma >= 1.0) out.push_back({Constraint::GammaBounds, std::max(d.gamma - 1.0, 1e-300)});
  else flag(Constraint::GammaBounds, -d.gamma);
  flag(Constraint::DischargeBounds, std::max(-d.d_b, d.d_b - m.max_discharge_power()));
  flag(Constraint::ChargeDischargeExclusive, (1.0 - d.alpha_b) * d.d_b);

  const EnergyLedger L = energy_ledger(d, f, m);
  const double energy_tol_scale =
      std::max(1.0, std::abs(B0) + L.stored_in_phase1 + L.internal_store_phase2 + L.internal_drain);
  auto flag_energy = [&](Constraint c, double excess) {
    if (excess > tol * energy_tol_scale) out.push_back({c, excess});
  };
  flag_energy(Constraint::EnergyCausality, L.internal_drain - L.internal_store_phase2 - L.stored_in_phase1 - B0);
  if (!std::isinf(B)) {
    flag_energy(Constraint::CapacityPhase1, B0 + L.stored_in_phase1 - B);
    flag_energy(Constraint::CapacityEnd, B0 + L.net_battery_change() - B);
  }
  return out;
}

double frame_rate_unchecked(const FrameDecision& d, const FrameSpec& f) {
  const double tau = f.duration_tau;
  const double c = f.harvested_power_c;
  const double p = f.circuit_power_p;
  double rate = 0.0;
  if (d.gamma > 0.0) {
    const double num = (d.alpha_a * c - p) * d.rho * tau;
    const double Pa = num > 0.0 ? num / (d.gamma * f.symbols_Ns) : 0.0;
    rate += d.gamma * rate_bits_per_symbol(Pa, f.channel_gain_h, f.noise, f.bandwidth_W);
  }
  const double num_b = (d.alpha_b * c - p + d.d_b) * (1.0 - d.rho) * tau;
  const double Pb = num_b > 0.0 ? num_b / ((1.0 - d.gamma) * f.symbols_Ns) : 0.0;
  rate += (1.0 - d.gamma) * rate_bits_per_symbol(Pb, f.channel_gain_h, f.noise, f.bandwidth_W);
  return rate;
}

double frame_rate(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m, double B0,
                  bool enforce_bw) {
  auto v = check_feasible(d, f, m, B0, enforce_bw);
  if (!v.empty()) throw InfeasibleDecision(std::move(v));
  return frame_rate_unchecked(d, f);
}

}  // namespace ehtx
