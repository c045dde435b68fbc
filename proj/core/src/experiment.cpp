#include "ehtx/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "ehtx/errors.hpp"
#include "ehtx/offline_opt.hpp"
#include "ehtx/rng.hpp"

namespace ehtx {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PolicyName {
  PolicyId id;
  const char* name;
};

constexpr PolicyName kNames[] = {
    {PolicyId::Offline, "offline"}, {PolicyId::IdealBattery, "ideal_battery"},
    {PolicyId::NoBattery, "no_battery"}, {PolicyId::Dp, "dp"},
    {PolicyId::Statistical, "statistical"}, {PolicyId::Greedy, "greedy"},
    {PolicyId::Ctsr, "ctsr"}, {PolicyId::Cpsr, "cpsr"},
};

double draw_from(const std::vector<double>& values, const std::vector<double>& probs, CounterStream& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

double draw_harvest(const HarvestLaw& law, std::size_t n, CounterStream& rng) {
  switch (law.kind) {
    case HarvestLaw::Kind::Deterministic: return law.values[n];
    case HarvestLaw::Kind::UniformDiscrete:
      return law.values[rng.below(static_cast<std::uint32_t>(law.values.size()))];
    case HarvestLaw::Kind::Custom: return draw_from(law.values, law.probabilities, rng);
  }
  return 0.0;
}

double draw_gain(const GainLaw& law, std::size_t n, CounterStream& rng) {
  switch (law.kind) {
    case GainLaw::Kind::Deterministic: return law.values[n];
    case GainLaw::Kind::ExponentialUnitMean: return rng.exponential(1.0);
    case GainLaw::Kind::Custom: return draw_from(law.values, law.probabilities, rng);
  }
  return 1.0;
}

double sample_std(const std::vector<double>& x, double mean) {
  if (x.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

template <class Fn>
auto annotate(PolicyId id, std::optional<std::size_t> trial, Fn&& fn) -> decltype(fn()) {
  auto prefix = [&] {
    std::ostringstream os;
    os << "policy " << to_string(id);
    if (trial) os << " trial " << *trial;
    os << ": ";
    return os.str();
  };
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix() + e.what());
  } catch (const SolverError& e) {
    throw SolverError(prefix() + e.what());
  } catch (const DomainError& e) {
    throw SolverError(prefix() + e.what());
  }
}

OfflineProblem offline_problem(const Scenario& s, const Realization& r) {
  OfflineProblem prob;
  prob.battery = s.battery;
  prob.B0 = s.B0;
  prob.enforce_bw = s.enforce_bw;
  prob.frames.reserve(r.c.size());
  for (std::size_t n = 0; n < r.c.size(); ++n) prob.frames.push_back(frame_with(s.frame_template, r.c[n], r.h[n]));
  return prob;
}

std::unique_ptr<OnlinePolicy> build_online(const Scenario& s, PolicyId id, double& fitted) {
  fitted = kNaN;
  switch (id) {
    case PolicyId::Dp:
      return std::make_unique<DpPolicy>(dp_build(s.harvest_distribution(), s.gain_distribution(), s.frame_template,
                                                 s.battery, s.dp_grid_step, s.N,
                                                 DpOptions{TransitionOptions{64, 1e-9, s.enforce_bw}}));
    case PolicyId::Greedy: return std::make_unique<GreedyPolicy>(s.battery, s.enforce_bw, 256);
    case PolicyId::Statistical:
      return std::make_unique<StatisticalPolicy>(s.battery, s.mean_harvest(), s.mean_gain(), s.enforce_bw);
    case PolicyId::Ctsr: {
      auto p = fit_ctsr(fitting_samples(s), s.mean_harvest(), s.frame_template, s.battery, s.B0, s.enforce_bw);
      fitted = p.rho();
      return std::make_unique<ConstantRatioPolicy>(p);
    }
    case PolicyId::Cpsr: {
      auto p = fit_cpsr(fitting_samples(s), s.frame_template, s.battery, s.B0, s.enforce_bw);
      fitted = p.alpha_b();
      return std::make_unique<ConstantRatioPolicy>(p);
    }
    default: break;
  }
  return nullptr;
}

}  // namespace

std::string to_string(PolicyId p) {
  for (const auto& n : kNames)
    if (n.id == p) return n.name;
  return "unknown";
}

PolicyId parse_policy(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.id;
  std::string list;
  for (const auto& n : kNames) list += (list.empty() ? "" : "|") + std::string(n.name);
  throw ValidationError("unknown policy '" + name + "' (expected " + list + ")");
}

const std::vector<PolicyId>& all_policies() {
  static const std::vector<PolicyId> v = [] {
    std::vector<PolicyId> out;
    for (const auto& n : kNames) out.push_back(n.id);
    return out;
  }();
  return v;
}

Realization generate_realization(const Scenario& s, std::uint32_t trial) {
  CounterStream hs(s.seed, trial, StreamId::Harvest);
  CounterStream gs(s.seed, trial, StreamId::Gain);
  Realization r;
  r.c.reserve(s.N);
  r.h.reserve(s.N);
  for (std::size_t n = 0; n < s.N; ++n) {
    r.c.push_back(draw_harvest(s.harvest, n, hs));
    r.h.push_back(draw_gain(s.gain, n, gs));
  }
  return r;
}

std::vector<Realization> generate_realizations(const Scenario& s) {
  std::vector<Realization> out;
  out.reserve(s.trials);
  for (std::size_t t = 0; t < s.trials; ++t) out.push_back(generate_realization(s, static_cast<std::uint32_t>(t)));
  return out;
}

std::vector<Realization> fitting_samples(const Scenario& s) {
  std::vector<Realization> out;
  out.reserve(s.fit_trials);
  for (std::size_t k = 0; k < s.fit_trials; ++k) {
    CounterStream rng(s.seed, static_cast<std::uint32_t>(k), StreamId::Fitting);
    Realization r;
    for (std::size_t n = 0; n < s.N; ++n) {
      r.c.push_back(draw_harvest(s.harvest, n, rng));
      r.h.push_back(draw_gain(s.gain, n, rng));
    }
    out.push_back(std::move(r));
  }
  return out;
}

double to_bps(double bits_per_symbol, const FrameSpec& f) {
  return bits_per_symbol * f.symbols_Ns / f.duration_tau;
}

ExperimentResult run_experiment(const Scenario& s, const std::vector<PolicyId>& policies,
                                const ExperimentOptions& opt) {
  s.validate();
  const std::vector<Realization> reals = generate_realizations(s);
  const FrameSpec& tmpl = s.frame_template;
  ExperimentResult res;
  for (PolicyId id : policies) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    PolicyResult pr;
    pr.id = id;
    pr.fitted_ratio = kNaN;
    std::unique_ptr<OnlinePolicy> online = annotate(id, std::nullopt, [&] { return build_online(s, id, pr.fitted_ratio); });
    pr.trial_rates_bps.reserve(reals.size());
    for (std::size_t t = 0; t < reals.size(); ++t) {
      const Realization& r = reals[t];
      annotate(id, t, [&] {
        std::vector<FrameDecision> decisions;
        std::vector<double> rates, residuals;
        double avg = 0.0;
        if (online) {
          PolicyTrace tr = simulate_policy(*online, r, tmpl, s.battery, s.B0, s.enforce_bw);
          decisions = std::move(tr.decisions);
          rates = std::move(tr.rates);
          residuals = std::move(tr.residuals);
          avg = tr.rate_avg;
        } else {
          const OfflineProblem prob = offline_problem(s, r);
          OfflineSolution sol = id == PolicyId::Offline        ? algorithm1(prob)
                                : id == PolicyId::IdealBattery ? ideal_battery_baseline(prob)
                                                               : no_battery_baseline(prob);
          decisions = std::move(sol.decisions);
          rates = std::move(sol.rates);
          residuals = std::move(sol.residuals);
          avg = sol.rate_avg;
        }
        pr.trial_rates_bps.push_back(to_bps(avg, tmpl));
        if (opt.per_frame)
          for (std::size_t n = 0; n < decisions.size(); ++n)
            pr.frames.push_back(FrameRow{t, n, decisions[n], decisions[n].e_b(tmpl.duration_tau), residuals[n],
                                         to_bps(rates[n], tmpl)});
      });
    }
    double sum = 0.0;
    for (double v : pr.trial_rates_bps) sum += v;
    pr.mean_rate_bps = pr.trial_rates_bps.empty() ? 0.0 : sum / static_cast<double>(pr.trial_rates_bps.size());
    pr.std_rate_bps = sample_std(pr.trial_rates_bps, pr.mean_rate_bps);
    if (opt.timing) {
      const double secs = std::chrono::duration<double>(clock::now() - t0).count();
      pr.runtime_norm_s = secs / static_cast<double>(reals.size() * s.N);
    } else {
      pr.runtime_norm_s = kNaN;
    }
    res.policies.push_back(std::move(pr));
  }
  return res;
}

DischargeModel parse_discharge_model(const std::string& name) {
  if (name == "true") return DischargeModel::True;
  if (name == "step") return DischargeModel::Step;
  throw ValidationError("discharge model must be 'true' or 'step', got '" + name + "'");
}

BatteryModel with_discharge_model(const BatteryModel& m, DischargeModel d) {
  if (m.is_fixed_efficiency()) return m;
  if (d == DischargeModel::Step) return step_approximation(m);
  BatteryModel out = m;
  out.variant = InternalResistance{};
  return out;
}

}  // namespace ehtx
