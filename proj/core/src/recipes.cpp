#include "ehtx/recipes.hpp"

#include <cmath>
#include <limits>

#include "ehtx/errors.hpp"
#include "ehtx/offline_opt.hpp"
#include "ehtx/single_frame.hpp"

namespace ehtx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
  for (double& x : v) x = std::pow(10.0, x);
  return v;
}

Scenario adjust(Scenario s, const RecipeOptions& opt) {
  s.seed = opt.seed;
  if (opt.trials > 0) s.trials = opt.trials;
  if (opt.discharge) s.battery = with_discharge_model(s.battery, *opt.discharge);
  return s;
}

BatteryModel adjust(BatteryModel m, const RecipeOptions& opt) {
  return opt.discharge ? with_discharge_model(m, *opt.discharge) : m;
}

CsvTable charge_curve(const std::string& lead, const std::vector<double>& lead_values,
                      const std::vector<double>& resistances, bool vary_voltage) {
  CsvTable t;
  t.header = {"r_ohm", lead, "alpha_a", "external_charge_w", "internal_charge_w"};
  for (double r : resistances)
    for (double x : lead_values) {
      const double c = vary_voltage ? 0.1 : x;
      const BatteryModel m = make_internal_resistance(kInf, r, vary_voltage ? x : 1.5);
      const double cp = optimal_charge_power(c, m);
      const double alpha = c > 0.0 ? 1.0 - cp / c : 1.0;
      t.add_row({format_number(r), format_number(x), format_number(alpha), format_number(cp),
                 format_number(internal_charge_power(cp, m))});
    }
  return t;
}

CsvTable fig4(const RecipeOptions& opt) {
  CsvTable t;
  t.header = {"p_w", "r_ohm", "rate_bps", "rho", "alpha_a", "d_b_w", "limiting"};
  for (double p : {0.01, 0.05}) {
    FrameSpec f = results_frame(p);
    f.harvested_power_c = 0.1;
    for (double r : logspace(0.1, 100.0, 31)) {
      const BatteryModel m = adjust(make_internal_resistance(0.02, r), opt);
      const SingleFrameSolution s = solve_single_frame(f, m, 0.0);
      t.add_row({format_number(p), format_number(r), format_number(to_bps(s.rate, f)),
                 format_number(s.decision.rho), format_number(s.decision.alpha_a), format_number(s.decision.d_b),
                 to_string(s.limiting)});
    }
  }
  return t;
}

CsvTable fig5(const RecipeOptions& opt) {
  CsvTable t;
  t.header = {"model", "frame", "c_w", "transmit_power_w"};
  const std::pair<const char*, BatteryModel> models[] = {
      {"fixed_efficiency", make_fixed_efficiency(kInf, std::sqrt(0.75), std::sqrt(0.75))},
      {"internal_resistance", adjust(make_internal_resistance(kInf, 5.0), opt)},
  };
  for (const auto& [name, m] : models) {
    const PowerProfile prof = fig5_profile(m);
    for (std::size_t i = 0; i < prof.harvest.size(); ++i)
      t.add_row({name, std::to_string(i), format_number(prof.harvest[i]), format_number(prof.transmit_power[i])});
  }
  return t;
}

CsvTable fig6(const RecipeOptions& opt) {
  CsvTable t;
  t.header = {"mean_harvest_w", "r_ohm"};
  for (const auto& h : {"policy", "mean_rate_bps", "std_rate_bps", "runtime_norm_s"}) t.header.push_back(h);
  for (double r : {1.0, 5.0, 20.0})
    for (double mu : linspace(0.02, 0.2, 10)) {
      const Scenario s = adjust(fig6_scenario(mu, r), opt);
      const ExperimentResult res = run_experiment(
          s, {PolicyId::Offline, PolicyId::IdealBattery, PolicyId::NoBattery}, {false, opt.timing});
      append_summary(t, res, {format_number(mu), format_number(r)});
    }
  return t;
}

CsvTable fig7(const RecipeOptions& opt) {
  CsvTable t;
  t.header = {"r_ohm"};
  for (const auto& h : {"policy", "mean_rate_bps", "std_rate_bps", "runtime_norm_s"}) t.header.push_back(h);
  for (double r : kFig7Resistances) {
    const Scenario s = adjust(fig7_scenario(r), opt);
    append_summary(t, run_experiment(s, kFig7Policies, {false, opt.timing}), {format_number(r)});
  }
  return t;
}

CsvTable table2(const RecipeOptions& opt) {
  CsvTable t;
  t.header = {"frames"};
  for (const auto& h : {"policy", "mean_rate_bps", "std_rate_bps", "runtime_norm_s"}) t.header.push_back(h);
  RecipeOptions o = opt;
  o.timing = true;
  for (std::size_t N : {25, 50, 75, 100}) {
    Scenario s = fig7_scenario(5.0);
    s.N = N;
    s.trials = 5;
    s.fit_trials = 100;
    s = adjust(s, o);
    const ExperimentResult res = run_experiment(
        s, {PolicyId::Offline, PolicyId::Statistical, PolicyId::Greedy, PolicyId::Ctsr, PolicyId::Cpsr},
        {false, true});
    append_summary(t, res, {std::to_string(N)});
  }
  return t;
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "table2"};
  return names;
}

FrameSpec results_frame(double circuit_power, double rho_w) {
  FrameSpec f;
  f.duration_tau = 1.0;
  f.symbols_Ns = 1e6;
  f.circuit_power_p = circuit_power;
  // Rounded to whole hertz: 1 - 0.9 is not exact in binary.
  f.bandwidth_W = std::round(f.symbols_Ns / ((1.0 - rho_w) * f.duration_tau));
  f.noise = NoiseModel::spectral_density(1e-15, true, 1e6);
  return f;
}

Scenario fig7_scenario(double resistance) {
  Scenario s;
  s.frame_template = results_frame(0.05);
  s.frame_template.harvested_power_c = 0.05;
  s.N = 5;
  s.B0 = 0.0;
  s.battery = make_step_discharge(0.1, resistance);
  s.harvest = {HarvestLaw::Kind::UniformDiscrete, {0.05, 0.1}, {}};
  s.gain = {GainLaw::Kind::ExponentialUnitMean, {}, {}, 8};
  s.seed = 1;
  s.trials = 10000;
  s.dp_grid_step = 0.0005;
  s.fit_trials = 1000;
  return s;
}

Scenario fig6_scenario(double mean_harvest, double resistance) {
  Scenario s;
  s.frame_template = results_frame(0.01);
  s.frame_template.harvested_power_c = mean_harvest;
  s.N = 20;
  s.battery = make_internal_resistance(0.1, resistance);
  s.harvest = {HarvestLaw::Kind::UniformDiscrete, {0.5 * mean_harvest, 1.5 * mean_harvest}, {}};
  s.gain = {GainLaw::Kind::ExponentialUnitMean, {}, {}, 8};
  s.trials = 100;
  return s;
}

PowerProfile fig5_profile(const BatteryModel& m, std::size_t frames, double c_max) {
  OfflineProblem prob;
  prob.battery = m;
  prob.circuit_zero = true;
  const FrameSpec base = results_frame(0.0);
  PowerProfile out;
  out.harvest = linspace(c_max, 0.0, frames);
  for (double c : out.harvest) prob.frames.push_back(frame_with(base, c, 1.0));
  const OfflineSolution sol = solve_p2(prob);
  for (double E : sol.transmit_energy) out.transmit_power.push_back(E / base.duration_tau);
  return out;
}

CsvTable run_recipe(const std::string& name, const RecipeOptions& opt) {
  if (name == "fig3a") return charge_curve("c_w", linspace(0.0, 0.2, 41), {0.1, 1.0, 5.0, 50.0}, false);
  if (name == "fig3b") return charge_curve("voltage_v", linspace(0.5, 3.0, 26), {0.1, 1.0, 5.0, 50.0}, true);
  if (name == "fig4") return fig4(opt);
  if (name == "fig5") return fig5(opt);
  if (name == "fig6") return fig6(opt);
  if (name == "fig7") return fig7(opt);
  if (name == "table2") return table2(opt);
  std::string list;
  for (const auto& n : recipe_names()) list += (list.empty() ? "" : "|") + n;
  throw ValidationError("unknown recipe '" + name + "' (expected " + list + ")");
}

}  // namespace ehtx
