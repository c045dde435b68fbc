#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehtx/csv.hpp"
#include "ehtx/errors.hpp"
#include "ehtx/experiment.hpp"
#include "ehtx/recipes.hpp"
#include "ehtx/scenario.hpp"
#include "ehtx/single_frame.hpp"

namespace ehtx::cli {
namespace {

struct Globals {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string discharge;
};

void emit(const CsvTable& t, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") write_csv(t, out);
  else write_csv_file(t, path);
}

Scenario load(const Globals& g) {
  if (g.scenario.empty()) throw ValidationError("this subcommand needs --scenario <path>");
  Scenario s = load_scenario(g.scenario);
  if (g.seed) s.seed = *g.seed;
  if (!g.discharge.empty()) s.battery = with_discharge_model(s.battery, parse_discharge_model(g.discharge));
  return s;
}

std::vector<PolicyId> parse_policies(const std::vector<std::string>& names, std::vector<PolicyId> fallback) {
  if (names.empty()) return fallback;
  std::vector<PolicyId> out;
  for (const auto& n : names) out.push_back(parse_policy(n));
  return out;
}

void write_frames(const ExperimentResult& res, const std::string& prefix) {
  for (const PolicyResult& p : res.policies) write_csv_file(frame_table(p), prefix + "." + to_string(p.id) + ".csv");
}

struct SingleFrameArgs {
  double c = 0.1, p = 0.05, r = 5.0, B = 0.1, B0 = 0.0, h = 1.0, voltage = 1.5;
  bool no_bw = false;
};

CsvTable single_frame(const Globals& g, const SingleFrameArgs& a, const CLI::App& sub) {
  FrameSpec f;
  BatteryModel m;
  double B0 = a.B0;
  bool enforce_bw = !a.no_bw;
  if (!g.scenario.empty()) {
    const Scenario s = load(g);
    f = s.frame_template;
    m = s.battery;
    B0 = s.B0;
    enforce_bw = enforce_bw && s.enforce_bw;
    f.harvested_power_c = s.harvest.values.front();
    f.channel_gain_h = s.gain.values.empty() ? 1.0 : s.gain.values.front();
  } else {
    f = Scenario{}.frame_template;
    m = make_internal_resistance(a.B, a.r, a.voltage);
    if (!g.discharge.empty()) m = with_discharge_model(m, parse_discharge_model(g.discharge));
  }
  // Explicit flags win over the scenario.
  if (sub.count("--c")) f.harvested_power_c = a.c;
  else if (g.scenario.empty()) f.harvested_power_c = a.c;
  if (sub.count("--p") || g.scenario.empty()) f.circuit_power_p = a.p;
  if (sub.count("--gain") || g.scenario.empty()) f.channel_gain_h = a.h;
  if (sub.count("--B0")) B0 = a.B0;
  const SingleFrameSolution sol = solve_single_frame(f, m, B0, SingleFrameOptions{enforce_bw, 10000, 1e-10});
  CsvTable t;
  t.header = {"c_w", "p_w", "r_ohm", "rho", "alpha_a", "alpha_b", "d_b_w", "rate_bits_per_symbol", "rate_bps",
              "limiting"};
  t.add_row({format_number(f.harvested_power_c), format_number(f.circuit_power_p), format_number(m.resistance_r),
             format_number(sol.decision.rho), format_number(sol.decision.alpha_a),
             format_number(sol.decision.alpha_b), format_number(sol.decision.d_b), format_number(sol.rate),
             format_number(to_bps(sol.rate, f)), to_string(sol.limiting)});
  return t;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-harvesting transmitter with a resistive battery: power allocation and policy simulation",
               "ehtx"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario file (YAML); see `ehtx schema`");
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("--out", g.out, "Output CSV path, - for stdout");
  app.add_option("--discharge-model", g.discharge, "Discharge curve: true or step")
      ->check(CLI::IsMember({"true", "step"}));

  SingleFrameArgs sf;
  auto* single = app.add_subcommand("single-frame", "Optimal decision of one frame");
  single->add_option("--c", sf.c, "Harvested power, W")->capture_default_str();
  single->add_option("--p", sf.p, "Circuit power, W")->capture_default_str();
  single->add_option("--r", sf.r, "Internal resistance, ohm")->capture_default_str();
  single->add_option("--B", sf.B, "Battery capacity, J")->capture_default_str();
  single->add_option("--B0", sf.B0, "Initial battery energy, J")->capture_default_str();
  single->add_option("--gain", sf.h, "Channel gain")->capture_default_str();
  single->add_option("--voltage", sf.voltage, "Nominal battery voltage, V")->capture_default_str();
  single->add_flag("--no-bandwidth-limit", sf.no_bw, "Drop the rho <= rho_W bound");

  std::vector<std::string> policy_names;
  std::size_t trials = 0;
  std::string frames_out;
  bool timing = false;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--trials", trials, "Override the scenario trial count");
    sub->add_option("--frames-out", frames_out, "Write per-frame tables to <prefix>.<policy>.csv");
    sub->add_flag("--timing", timing, "Measure runtime per frame (otherwise reported as nan)");
  };

  auto* offline = app.add_subcommand("offline", "Offline algorithm and its battery baselines");
  add_run_options(offline);

  auto* online = app.add_subcommand("online", "Online policies on the scenario's random realizations");
  online->add_option("--policy", policy_names, "dp|greedy|statistical|ctsr|cpsr (repeatable); default all")
      ->delimiter(',');
  add_run_options(online);

  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over values of one scenario key");
  sweep->add_option("--param", param, "Dotted key path, e.g. battery.resistance_ohm")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--policy", policy_names, "Policies (repeatable); default offline and all online")
      ->delimiter(',');
  add_run_options(sweep);

  std::string recipe;
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate the data of a figure or table");
  reproduce->add_option("recipe", recipe, "fig3a|fig3b|fig4|fig5|fig6|fig7|table2")->required();
  reproduce->add_option("--trials", trials, "Override the recipe trial count");
  reproduce->add_flag("--timing", timing, "Measure runtime per frame");

  auto* schema = app.add_subcommand("schema", "Print the scenario file format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help() << "\n" << scenario_schema_help();
    return kExitValidation;
  }

  try {
    if (*schema) {
      out << scenario_schema_help();
      return kExitOk;
    }
    if (*single) {
      emit(single_frame(g, sf, *single), g.out, out);
      return kExitOk;
    }
    const ExperimentOptions opt{!frames_out.empty(), timing};
    if (*offline || *online) {
      Scenario s = load(g);
      if (trials > 0) s.trials = trials;
      const std::vector<PolicyId> policies =
          *offline ? std::vector<PolicyId>{PolicyId::Offline, PolicyId::IdealBattery, PolicyId::NoBattery}
                   : parse_policies(policy_names, {PolicyId::Dp, PolicyId::Statistical, PolicyId::Greedy,
                                                   PolicyId::Ctsr, PolicyId::Cpsr});
      const ExperimentResult res = run_experiment(s, policies, opt);
      emit(summary_table(res), g.out, out);
      if (!frames_out.empty()) write_frames(res, frames_out);
      return kExitOk;
    }
    if (*sweep) {
      Scenario base = load(g);
      if (trials > 0) base.trials = trials;
      const std::vector<PolicyId> policies = parse_policies(policy_names, kFig7Policies);
      CsvTable t;
      bool first = true;
      for (const std::string& v : values) {
        const Scenario s = with_override(base, param, v);
        const ExperimentResult res = run_experiment(s, policies, opt);
        if (first) t = summary_table(res, {param}, {v});
        else append_summary(t, res, {v});
        first = false;
        if (!frames_out.empty()) write_frames(res, frames_out + "." + v);
      }
      emit(t, g.out, out);
      return kExitOk;
    }
    if (*reproduce) {
      RecipeOptions ro;
      ro.seed = g.seed.value_or(1);
      ro.trials = trials;
      ro.timing = timing;
      if (!g.discharge.empty()) ro.discharge = parse_discharge_model(g.discharge);
      emit(run_recipe(recipe, ro), g.out, out);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleDecision& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DomainError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ehtx::cli
