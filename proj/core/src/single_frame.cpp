#include "ehtx/single_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ehtx/errors.hpp"
#include "ehtx/scalar_search.hpp"

namespace ehtx {

std::string to_string(LimitingFactor l) {
  switch (l) {
    case LimitingFactor::RateOptimal: return "rate_optimal";
    case LimitingFactor::CapacityLimited: return "capacity_limited";
    case LimitingFactor::BandwidthLimited: return "bandwidth_limited";
  }
  return "unknown";
}

double drain_power(double internal_energy, double duration, const BatteryModel& m) {
  if (duration <= 0.0 || internal_energy <= 0.0) return 0.0;
  return std::min(m.max_discharge_power(), invert_internal_discharge(internal_energy / duration, m));
}

namespace {

void check_initial_energy(double B0, const BatteryModel& m) {
  if (std::isnan(B0) || B0 < 0.0 || B0 > m.capacity_B * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "initial battery energy " << B0 << " outside [0, " << m.capacity_B << "]";
    throw ValidationError(os.str());
  }
}

struct DrainObjective {
  const FrameSpec& f;
  const BatteryModel& m;
  double B0;
  double stored_rate;  // internal charge power at the optimal charge rate
  double headroom;     // energy the battery can still take; inf ignores capacity

  double stored(double rho) const { return std::min(stored_rate * rho * f.duration_tau, headroom); }
  double drain(double rho) const {
    const double tau = f.duration_tau;
    if (rho >= 1.0) return 0.0;
    return drain_power(stored(rho) + B0, (1.0 - rho) * tau, m);
  }
  // Transmit energy per unit frame time; the rate is increasing in it.
  double operator()(double rho) const {
    return (f.harvested_power_c - f.circuit_power_p + drain(rho)) * (1.0 - rho);
  }
};

ScalarOptimum maximize_rho(const DrainObjective& obj, double hi, const SingleFrameOptions& opt) {
  ScalarOptimum best = golden_section_max(obj, 0.0, hi, opt.golden_tol);
  if (opt.grid_check_points > 1 && hi > 0.0) {
    const ScalarOptimum grid = grid_then_golden_max(obj, 0.0, hi, opt.grid_check_points, opt.golden_tol);
    if (grid.value > best.value + 1e-9 * std::max(1.0, std::abs(best.value))) best = grid;
  }
  return best;
}

}  // namespace

SingleFrameSolution solve_single_frame(const FrameSpec& f, const BatteryModel& m, double B0,
                                       const SingleFrameOptions& opt) {
  f.validate();
  m.validate();
  check_initial_energy(B0, m);
  B0 = std::min(B0, m.capacity_B);

  const double c = f.harvested_power_c;
  const double tau = f.duration_tau;
  const double cp = optimal_charge_power(c, m);
  const double stored_rate = internal_charge_power(cp, m);
  const double alpha_star = c > 0.0 ? 1.0 - cp / c : 1.0;
  const double cap = opt.enforce_bw ? rho_bandwidth_limit(f) : 1.0;

  SingleFrameSolution sol;
  sol.rho_B = stored_rate > 0.0 ? std::max(0.0, (m.capacity_B - B0) / (stored_rate * tau)) : cap;

  const double inf = std::numeric_limits<double>::infinity();
  const DrainObjective unlimited{f, m, B0, stored_rate, inf};
  const ScalarOptimum unconstrained = maximize_rho(unlimited, cap, opt);
  sol.rho_r = unconstrained.x;

  const double hi = std::min(cap, sol.rho_B);
  const DrainObjective filled{f, m, B0, stored_rate, std::max(0.0, m.capacity_B - B0)};
  ScalarOptimum chosen = unconstrained;
  // The search interval ends at the bandwidth cap, so an argmax there means
  // the cap binds.
  sol.limiting = opt.enforce_bw && unconstrained.x >= cap - 1e-9 ? LimitingFactor::BandwidthLimited
                                                                 : LimitingFactor::RateOptimal;
  if (unconstrained.x > hi) {
    chosen = maximize_rho(unlimited, hi, opt);
    sol.limiting = sol.rho_B < cap ? LimitingFactor::CapacityLimited : LimitingFactor::BandwidthLimited;
  }
  if (opt.slow_fill && hi < cap) {
    // Past rho_B the battery is filled exactly by a slower charge, which
    // shortens the circuit-on phase; this wins when p is large.
    const ScalarOptimum longer = maximize_rho(filled, cap, opt);
    if (longer.x > hi && longer.value > chosen.value + 1e-12 * std::max(1.0, std::abs(chosen.value))) {
      chosen = longer;
      sol.limiting = chosen.x >= cap ? LimitingFactor::BandwidthLimited : LimitingFactor::CapacityLimited;
    }
  }
  const DrainObjective& obj = chosen.x > hi ? filled : unlimited;
  auto charge_split = [&](double rho) {
    if (rho <= 0.0) return 1.0;
    if (rho <= hi || c <= 0.0) return alpha_star;
    const double target = obj.stored(rho) / (rho * tau);
    return std::clamp(1.0 - invert_internal_charge(target, cp, m) / c, alpha_star, 1.0);
  };

  FrameDecision& d = sol.decision;
  d.gamma = 0.0;
  d.alpha_b = 1.0;
  if (chosen.value <= 0.0) {
    // The circuit cannot be powered: bank what the battery can take.
    sol.no_transmission_feasible = true;
    d.rho = stored_rate > 0.0 ? hi : 0.0;
    d.alpha_a = d.rho > 0.0 ? alpha_star : 1.0;
    d.d_b = 0.0;
    sol.rate = 0.0;
    return sol;
  }
  d.rho = chosen.x;
  d.alpha_a = charge_split(d.rho);
  d.d_b = drain_power(B0 + energy_ledger(d, f, m).stored_in_phase1, (1.0 - d.rho) * tau, m);
  sol.rate = frame_rate(d, f, m, B0, opt.enforce_bw);
  return sol;
}

SingleFrameSolution brute_force_single_frame(const FrameSpec& f, const BatteryModel& m, double B0,
                                             const GridResolution& grid, bool enforce_bw) {
  f.validate();
  m.validate();
  check_initial_energy(B0, m);
  if (!(grid.rho_step > 0.0) || !(grid.alpha_step > 0.0))
    throw ValidationError("grid resolutions must be > 0");

  const double c = f.harvested_power_c;
  const double p = f.circuit_power_p;
  const double tau = f.duration_tau;
  const double cap = enforce_bw ? rho_bandwidth_limit(f) : 1.0;
  const double a_lo = alpha_lower_bound(c, m);

  auto axis = [](double lo, double hi, double step) {
    std::vector<double> v;
    for (double x = lo; x < hi - 1e-12; x += step) v.push_back(x);
    v.push_back(hi);
    return v;
  };
  const std::vector<double> rhos = axis(0.0, cap, grid.rho_step);
  const std::vector<double> alphas = axis(a_lo, 1.0, grid.alpha_step);

  SingleFrameSolution best;
  best.decision = FrameDecision{};
  double best_energy = -std::numeric_limits<double>::infinity();
  for (double rho : rhos) {
    for (double alpha : alphas) {
      if (rho == 0.0 && alpha != alphas.front()) continue;
      const double t1 = rho * tau;
      const double t2 = (1.0 - rho) * tau;
      const double stored = rho > 0.0 ? internal_charge_power((1.0 - alpha) * c, m) * t1 : 0.0;
      if (B0 + stored > m.capacity_B + 1e-12) continue;
      for (int full : {1, 0}) {
        const double db = full ? drain_power(B0 + stored, t2, m) : 0.0;
        const double energy = (c - p + db) * t2;
        if (energy > best_energy) {
          best_energy = energy;
          best.decision = FrameDecision{rho, rho > 0.0 ? alpha : 1.0, 1.0, 0.0, db};
        }
      }
    }
  }
  best.rho_r = best.decision.rho;
  best.rho_B = best.decision.rho;
  best.rate = frame_rate_unchecked(best.decision, f);
  best.no_transmission_feasible = best_energy <= 0.0;
  return best;
}

}  // namespace ehtx
