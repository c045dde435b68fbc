#include "ehtx/offline_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "barrier_solver.hpp"
#include "ehtx/errors.hpp"
#include "ehtx/single_frame.hpp"

namespace ehtx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReceiveTol = 1e-12;
// Keeps phase-2 charging strictly below the stationary point, where the
// inverse of the stored-power curve has an infinite slope.
constexpr double kStationaryBackoff = 1e-7;

enum class Slot { Charge, Split, ChargeOnly, Direct };

FrameRole role_of(Slot s) {
  switch (s) {
    case Slot::Charge: return FrameRole::ChargePhase;
    case Slot::Split:
    case Slot::Direct: return FrameRole::SplitPower;
    case Slot::ChargeOnly: return FrameRole::ChargeOnly;
  }
  return FrameRole::ChargeOnly;
}

struct FrameCtx {
  double c = 0.0, p = 0.0, tau = 1.0;
  double snr = 0.0;
  double alpha_a = 1.0;      // split used while charging only
  double stored = 0.0;       // internal power stored at that split
  double x_max = 0.0;        // largest phase-2 charge power
  double s_max = 0.0;        // internal power at x_max
  double rho_cap = 0.0;
  bool can_transmit = false;  // harvest alone powers the circuit and the link is usable
  bool deficit = false;       // the link is usable but the circuit needs battery energy
};

std::vector<FrameSpec> effective_frames(const OfflineProblem& prob) {
  std::vector<FrameSpec> out = prob.frames;
  if (prob.circuit_zero)
    for (FrameSpec& f : out) f.circuit_power_p = 0.0;
  return out;
}

double phase2_charge_limit(double c, const BatteryModel& m) {
  if (c <= 0.0) return 0.0;
  const double cp = optimal_charge_power(c, m);
  return cp < c ? cp * (1.0 - kStationaryBackoff) : c;
}

std::vector<FrameCtx> build_contexts(const OfflineProblem& prob, const std::vector<FrameSpec>& frames,
                                     const std::vector<double>& alpha_a) {
  const BatteryModel& m = prob.battery;
  const bool unlimited_discharge = std::isinf(m.max_discharge_power());
  std::vector<FrameCtx> ctx(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameSpec& f = frames[i];
    FrameCtx& x = ctx[i];
    x.c = f.harvested_power_c;
    x.p = f.circuit_power_p;
    x.tau = f.duration_tau;
    x.snr = snr_per_joule(f, f.symbols_Ns);
    if (x.c > 0.0) {
      const double a = alpha_a.empty() ? 1.0 - optimal_charge_power(x.c, m) / x.c : alpha_a[i];
      x.alpha_a = std::clamp(a, alpha_lower_bound(x.c, m), 1.0);
      x.stored = internal_charge_power((1.0 - x.alpha_a) * x.c, m);
    }
    x.x_max = phase2_charge_limit(x.c, m);
    x.s_max = x.x_max > 0.0 ? internal_charge_power(x.x_max, m) : 0.0;
    x.rho_cap = prob.enforce_bw ? rho_bandwidth_limit(f) : 1.0;
    // Without a discharge limit, rho -> 1 would squeeze an unbounded drain
    // into a vanishing transmit phase.
    if (unlimited_discharge) x.rho_cap = std::min(x.rho_cap, 1.0 - 1e-9);
    x.can_transmit = x.c >= x.p && x.snr > 0.0;
    x.deficit = x.c < x.p && x.snr > 0.0;
  }
  return ctx;
}

// Phase-2 charge power whose stored power is s, extended linearly below 0 so
// the barrier may probe the relaxed region.
struct ChargeInverse {
  double x, dx, d2x;
};

ChargeInverse charge_inverse(double s, const FrameCtx& x, const BatteryModel& m) {
  const double sc = std::clamp(s, 0.0, x.s_max);
  const double xv = invert_internal_charge(sc, x.x_max, m);
  const double g1 = internal_charge_slope(xv, m);
  const double g2 = internal_charge_curvature(xv, m);
  ChargeInverse r{xv, 1.0 / g1, -g2 / (g1 * g1 * g1)};
  if (s < 0.0) r.x += s * r.dx;
  return r;
}

// External discharge power whose internal drain is u on the true curve.
struct DischargeInverse {
  double d, dd, d2d;
};

DischargeInverse discharge_inverse(double u, const BatteryModel& m) {
  const double uc = std::max(0.0, u);
  const double dv = invert_internal_discharge(uc, m);
  const double h1 = internal_discharge_slope(dv, m);
  const double h2 = internal_discharge_curvature(dv, m);
  const double y = 1.0 / h1;
  DischargeInverse r{dv, y, -h2 * y * y * y};
  if (u < 0.0) r.d += u * r.dd;
  return r;
}

struct Program {
  std::vector<Slot> slots;
  std::vector<FrameCtx> ctx;
  double Nd0 = 1.0;  // flat discharge efficiency for Charge/Split slots
  detail::BarrierResult raw;
  int solves = 0;
};

detail::FrameTerm make_term(Slot slot, const FrameCtx& x, const BatteryModel& m, double Nd0,
                            double weight) {
  detail::FrameTerm t;
  t.weight = weight;
  t.snr = x.snr;
  const double tau = x.tau;
  const double Dp = m.max_discharge_power();
  switch (slot) {
    case Slot::Charge: {
      t.has_a = x.rho_cap > 0.0 && x.stored > 0.0;
      t.a_lo = 0.0;
      t.a_hi = x.rho_cap;
      t.has_b = true;
      t.b_lo = 0.0;
      t.b_hi = kInf;
      t.qa = x.stored * tau;
      t.mid_a = x.stored * tau;
      t.qb = -1.0 / Nd0;
      if (std::isfinite(Dp)) {
        t.has_couple = true;
        t.couple_a = Dp * tau;
        t.couple_rhs = Dp * tau;
      }
      t.transmits = true;
      const double net = (x.c - x.p) * tau;
      t.energy = [net](double a, double b) {
        detail::EnergyEval e;
        e.E = (1.0 - a) * net + b;
        e.ga = -net;
        e.gb = 1.0;
        return e;
      };
      break;
    }
    case Slot::Split:
    case Slot::ChargeOnly:
    case Slot::Direct: {
      t.has_a = x.s_max > 0.0;
      t.a_lo = 0.0;
      t.a_hi = x.s_max;
      t.qa = tau;
      if (slot == Slot::ChargeOnly) break;
      t.has_b = true;
      t.b_lo = 0.0;
      t.transmits = true;
      const FrameCtx cx = x;
      if (slot == Slot::Split) {
        t.b_hi = std::isfinite(Dp) ? Dp * tau : kInf;
        t.qb = -1.0 / Nd0;
        t.energy = [cx, m](double a, double b) {
          const ChargeInverse ci = charge_inverse(a, cx, m);
          detail::EnergyEval e;
          e.E = (cx.c - ci.x - cx.p) * cx.tau + b;
          e.ga = -cx.tau * ci.dx;
          e.haa = -cx.tau * ci.d2x;
          e.gb = 1.0;
          return e;
        };
      } else {
        // The drain variable is internal power; back off the endpoint where
        // the external curve has zero slope.
        t.b_hi = std::isfinite(Dp) ? internal_discharge_power(Dp, m) * (1.0 - 1e-9) : kInf;
        t.qb = -tau;
        t.energy = [cx, m](double a, double b) {
          const ChargeInverse ci = charge_inverse(a, cx, m);
          const DischargeInverse di = discharge_inverse(b, m);
          detail::EnergyEval e;
          e.E = (cx.c - ci.x + di.d - cx.p) * cx.tau;
          e.ga = -cx.tau * ci.dx;
          e.haa = -cx.tau * ci.d2x;
          e.gb = cx.tau * di.dd;
          e.hbb = cx.tau * di.d2d;
          return e;
        };
      }
      break;
    }
  }
  return t;
}

// `m` is the battery the program is posed on (step approximation for the
// phase-pattern programs, the true curve for the direct program).
void solve_program(const OfflineProblem& prob, const BatteryModel& m, Program& prog,
                   const detail::BarrierResult* warm = nullptr) {
  detail::BarrierProblem bp;
  bp.B0 = std::min(prob.B0, prob.battery.capacity_B);
  bp.B = prob.battery.capacity_B;
  const double weight = 1.0 / static_cast<double>(prog.slots.size());
  double harvest = 0.0;
  for (const FrameCtx& x : prog.ctx) harvest += x.c * x.tau;
  bp.energy_scale = (harvest + bp.B0) * weight;
  if (!(bp.energy_scale > 0.0)) bp.energy_scale = 1.0;
  bp.frames.reserve(prog.slots.size());
  for (std::size_t i = 0; i < prog.slots.size(); ++i)
    bp.frames.push_back(make_term(prog.slots[i], prog.ctx[i], m, prog.Nd0, weight));
  if (warm) {
    bp.start_a = warm->interior_a;
    bp.start_b = warm->interior_b;
  }
  ++prog.solves;
  prog.raw = detail::solve_barrier(bp);
}

void repair_decisions(const OfflineProblem& prob, std::vector<FrameDecision>& out,
                      const BatteryModel& m);

OfflineSolution materialize(const OfflineProblem& prob, const Program& prog,
                            const BatteryModel& charge_m, const BatteryModel& eval_m) {
  const std::size_t N = prog.slots.size();
  std::vector<FrameDecision> decisions(N);
  for (std::size_t i = 0; i < N; ++i) {
    const FrameCtx& x = prog.ctx[i];
    const double a = prog.raw.a[i], b = prog.raw.b[i];
    FrameDecision& d = decisions[i];
    double in = 0.0, out = 0.0;
    switch (prog.slots[i]) {
      case Slot::Charge:
        d.rho = a > 1e-12 ? a : 0.0;
        d.alpha_a = d.rho > 0.0 ? x.alpha_a : 1.0;
        d.alpha_b = 1.0;
        out = b / prog.Nd0;
        d.d_b = drain_power(out, (1.0 - d.rho) * x.tau, eval_m);
        continue;
      case Slot::Split: in = a * x.tau; out = b / prog.Nd0; break;
      case Slot::Direct: in = a * x.tau; out = b * x.tau; break;
      case Slot::ChargeOnly: in = a * x.tau; break;
    }
    // Charging and draining in the same phase is never better than their net.
    const double common = std::min(in, out);
    in -= common;
    out -= common;
    d.rho = 0.0;
    d.alpha_a = 1.0;
    const double xv = in > 0.0 ? invert_internal_charge(std::min(in / x.tau, x.s_max), x.x_max, charge_m) : 0.0;
    d.alpha_b = x.c > 0.0 ? std::clamp(1.0 - xv / x.c, 0.0, 1.0) : 1.0;
    d.d_b = out > 0.0 ? drain_power(out, x.tau, eval_m) : 0.0;
    if (d.d_b > 0.0) d.alpha_b = 1.0;
  }
  repair_decisions(prob, decisions, eval_m);
  OfflineSolution sol = evaluate_decisions(prob, decisions, eval_m);
  sol.roles.resize(N);
  for (std::size_t i = 0; i < N; ++i) sol.roles[i] = role_of(prog.slots[i]);
  sol.stats.convex_solves = prog.solves;
  sol.stats.newton_steps = prog.raw.newton_steps;
  sol.stats.outer_iterations = prog.raw.outer_iterations;
  sol.stats.gap = prog.raw.gap;
  sol.stats.global = true;
  return sol;
}

void accumulate(SolverStats& into, const SolverStats& from) {
  into.convex_solves += from.convex_solves;
  into.newton_steps += from.newton_steps;
  into.outer_iterations += from.outer_iterations;
  into.gap = std::max(into.gap, from.gap);
  into.global = into.global && from.global;
}

std::vector<Slot> slots_for(const std::vector<FrameCtx>& ctx, const PhasePattern& pattern) {
  std::vector<Slot> s(ctx.size());
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (!ctx[i].can_transmit) s[i] = Slot::ChargeOnly;
    else s[i] = pattern[i] == PhaseTag::ChargePhase ? Slot::Charge : Slot::Split;
  }
  return s;
}

struct PatternRun {
  Program prog;
  std::vector<FrameSpec> frames;
  BatteryModel step_m;
};

PatternRun run_pattern(const OfflineProblem& prob, const PhasePattern& pattern,
                       const std::vector<double>& alpha_a) {
  if (pattern.size() != prob.frames.size())
    throw ValidationError("phase pattern length differs from the number of frames");
  if (!alpha_a.empty() && alpha_a.size() != prob.frames.size())
    throw ValidationError("alpha_a list length differs from the number of frames");
  PatternRun run;
  run.frames = effective_frames(prob);
  run.step_m = step_approximation(prob.battery);
  run.prog.ctx = build_contexts(prob, run.frames, alpha_a);
  run.prog.slots = slots_for(run.prog.ctx, pattern);
  run.prog.Nd0 = step_discharge_efficiency(prob.battery);
  solve_program(prob, run.step_m, run.prog);
  if (std::none_of(run.prog.ctx.begin(), run.prog.ctx.end(), [](const FrameCtx& x) { return x.deficit; }))
    return run;

  // Frames whose circuit needs battery energy transmit only if earlier
  // charging can fund them. With their circuit power lowered to the harvest
  // the zero-drain start is interior; the power is then raised back in
  // warm-started steps, which fails once the battery cannot keep up.
  Program tx = run.prog;
  tx.solves = 0;
  std::vector<std::size_t> deficit;
  for (std::size_t i = 0; i < tx.ctx.size(); ++i) {
    if (!tx.ctx[i].deficit) continue;
    deficit.push_back(i);
    tx.slots[i] = pattern[i] == PhaseTag::ChargePhase ? Slot::Charge : Slot::Split;
  }
  auto set_level = [&](double lambda) {
    for (std::size_t i : deficit) {
      const FrameCtx& x = run.prog.ctx[i];
      tx.ctx[i].p = lambda >= 1.0 ? x.p : x.c + lambda * (x.p - x.c);
    }
  };
  set_level(0.0);
  bool funded = false;
  try {
    solve_program(prob, run.step_m, tx);
    double lambda = 0.0, step = 1.0;
    while (step >= 1e-6) {
      const double next = std::min(1.0, lambda + step);
      set_level(next);
      Program trial = tx;
      try {
        solve_program(prob, run.step_m, trial, &tx.raw);
      } catch (const SolverError&) {
        step *= 0.5;
        continue;
      }
      tx = std::move(trial);
      lambda = next;
      if (lambda >= 1.0) {
        funded = true;
        break;
      }
      step *= 2.0;
    }
  } catch (const SolverError&) {
  }
  const int solves = run.prog.solves + tx.solves;
  if (funded && tx.raw.objective > run.prog.raw.objective) run.prog = std::move(tx);
  run.prog.solves = solves;
  return run;
}

const BatteryModel& eval_model(const PatternRun& run, const OfflineProblem& prob, DischargeEval e) {
  return e == DischargeEval::Step ? run.step_m : prob.battery;
}

// Replays decisions on `m` frame by frame and trims whatever the battery
// cannot honour: the charging phase is shortened to respect capacity, the
// drain is capped by the available energy, and phase-2 charging is reduced
// to the remaining room.
void repair_decisions(const OfflineProblem& prob, std::vector<FrameDecision>& out,
                      const BatteryModel& m) {
  const std::vector<FrameSpec> frames = effective_frames(prob);
  const double B = m.capacity_B;
  double level = std::min(prob.B0, B);
  for (std::size_t i = 0; i < out.size(); ++i) {
    FrameDecision& d = out[i];
    const FrameSpec& f = frames[i];
    const double c = f.harvested_power_c;
    const double tau = f.duration_tau;
    const double a_lo = alpha_lower_bound(c, m);
    d.alpha_a = std::clamp(d.alpha_a, a_lo, 1.0);
    d.alpha_b = std::clamp(d.alpha_b, a_lo, 1.0);
    d.d_b = std::clamp(d.d_b, 0.0, m.max_discharge_power());

    double stored1 = 0.0;
    if (d.rho > 0.0) {
      const double rate = internal_charge_power((1.0 - d.alpha_a) * c, m);
      if (rate > 0.0 && level + rate * d.rho * tau > B) d.rho = std::max(0.0, (B - level) / (rate * tau));
      stored1 = rate * d.rho * tau;
    }
    const double t2 = (1.0 - d.rho) * tau;
    if (d.d_b > 0.0) {
      d.d_b = std::min(d.d_b, drain_power(std::max(0.0, level + stored1), t2, m));
    } else if (d.alpha_b < 1.0 && t2 > 0.0) {
      const double x_plan = (1.0 - d.alpha_b) * c;
      const double upper = std::min(x_plan, optimal_charge_power(c, m));
      double x = upper;
      const double room = std::max(0.0, B - level - stored1);
      if (level + stored1 + internal_charge_power(upper, m) * t2 > B)
        x = invert_internal_charge(room / t2, upper, m);
      d.alpha_b = c > 0.0 ? std::clamp(1.0 - x / c, a_lo, 1.0) : 1.0;
    }
    level += energy_ledger(d, f, m).net_battery_change();
  }
}

}  // namespace

std::string to_string(FrameRole r) {
  switch (r) {
    case FrameRole::ChargePhase: return "charge_phase";
    case FrameRole::SplitPower: return "split_power";
    case FrameRole::ChargeOnly: return "charge_only";
  }
  return "unknown";
}

void OfflineProblem::validate() const {
  if (frames.empty()) throw ValidationError("offline problem needs at least one frame");
  battery.validate();
  const double tau = frames.front().duration_tau;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].validate();
    if (std::abs(frames[i].duration_tau - tau) > 1e-12 * tau) {
      std::ostringstream os;
      os << "frame " << i << " duration " << frames[i].duration_tau << " differs from " << tau;
      throw ValidationError(os.str());
    }
  }
  if (std::isnan(B0) || B0 < 0.0 || B0 > battery.capacity_B * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "initial battery energy " << B0 << " outside [0, " << battery.capacity_B << "]";
    throw ValidationError(os.str());
  }
}

OfflineSolution evaluate_decisions(const OfflineProblem& prob, const std::vector<FrameDecision>& decisions,
                                   const BatteryModel& m) {
  const std::vector<FrameSpec> frames = effective_frames(prob);
  const std::size_t N = frames.size();
  if (decisions.size() != N) throw ValidationError("decision count differs from the number of frames");
  OfflineSolution sol;
  sol.decisions = decisions;
  sol.roles.assign(N, FrameRole::ChargePhase);
  sol.e_b.resize(N);
  sol.rates.resize(N);
  sol.residuals.resize(N);
  sol.internal_in.resize(N);
  sol.internal_out.resize(N);
  sol.transmit_energy.resize(N);
  double level = std::min(prob.B0, m.capacity_B);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const FrameDecision& d = decisions[i];
    const FrameSpec& f = frames[i];
    const auto v = check_feasible(d, f, m, level, prob.enforce_bw);
    if (!v.empty()) {
      std::ostringstream os;
      os << "frame " << i << ": " << InfeasibleDecision(v).what();
      throw SolverError(os.str());
    }
    const EnergyLedger L = energy_ledger(d, f, m);
    level += L.net_battery_change();
    sol.internal_in[i] = L.stored_in_phase1 + L.internal_store_phase2;
    sol.internal_out[i] = L.internal_drain;
    sol.transmit_energy[i] = L.transmit_energy;
    sol.residuals[i] = level;
    sol.e_b[i] = d.e_b(f.duration_tau);
    sol.rates[i] = frame_rate_unchecked(d, f);
    sum += sol.rates[i];
    if (d.rho > 0.0) sol.roles[i] = FrameRole::ChargePhase;
    else sol.roles[i] = d.alpha_b < 1.0 ? FrameRole::SplitPower : FrameRole::ChargePhase;
  }
  sol.rate_avg = sum / static_cast<double>(N);
  return sol;
}

std::vector<double> optimal_alpha_a(const OfflineProblem& prob) {
  std::vector<double> out(prob.frames.size(), 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = prob.frames[i].harvested_power_c;
    if (c > 0.0) out[i] = 1.0 - optimal_charge_power(c, prob.battery) / c;
  }
  return out;
}

OfflineSolution solve_p2(const OfflineProblem& prob) {
  prob.validate();
  if (!prob.circuit_zero) throw ValidationError("solve_p2 requires circuit_zero");
  if (prob.battery.is_step_discharge()) throw ValidationError("solve_p2 requires a non-step battery model");
  const std::vector<FrameSpec> frames = effective_frames(prob);
  Program prog;
  prog.ctx = build_contexts(prob, frames, {});
  prog.slots.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i)
    prog.slots[i] = prog.ctx[i].can_transmit ? Slot::Direct : Slot::ChargeOnly;
  solve_program(prob, prob.battery, prog);
  return materialize(prob, prog, prob.battery, prob.battery);
}

OfflineSolution solve_p3_fixed_pattern(const OfflineProblem& prob, const PhasePattern& pattern,
                                       const std::vector<double>& alpha_a_star, DischargeEval eval) {
  prob.validate();
  const PatternRun run = run_pattern(prob, pattern, alpha_a_star);
  return materialize(prob, run.prog, prob.battery, eval_model(run, prob, eval));
}

bool frame_receives_energy(const OfflineSolution& sol, std::size_t i) {
  return sol.internal_out.at(i) - sol.internal_in.at(i) > kReceiveTol;
}

double loss_of_frame(const FrameDecision& d, const FrameSpec& f, const BatteryModel& m) {
  const EnergyLedger L = energy_ledger(d, f, m);
  return L.loss_total + L.spilled;
}

double loss_of_frame(const OfflineProblem& prob, const OfflineSolution& all_charge, std::size_t i,
                     LossMode mode) {
  const BatteryModel step_m = step_approximation(prob.battery);
  FrameSpec f = prob.frames.at(i);
  if (prob.circuit_zero) f.circuit_power_p = 0.0;
  if (mode == LossMode::AllCharge) return loss_of_frame(all_charge.decisions.at(i), f, step_m);

  const double c = f.harvested_power_c;
  const double tau = f.duration_tau;
  if (c <= 0.0) return kInf;
  const double matched = (all_charge.transmit_energy.at(i) / tau + f.circuit_power_p) / c;
  if (matched > 1.0 + 1e-12) return kInf;
  FrameDecision d;
  d.rho = 0.0;
  d.alpha_a = 1.0;
  d.alpha_b = std::clamp(matched, alpha_lower_bound(c, step_m), 1.0);
  d.d_b = 0.0;
  return loss_of_frame(d, f, step_m);
}

OfflineSolution algorithm1(const OfflineProblem& prob) {
  prob.validate();
  const std::size_t N = prob.frames.size();
  const std::vector<double> alpha = optimal_alpha_a(prob);

  const PhasePattern all_charge(N, PhaseTag::ChargePhase);
  const PatternRun first = run_pattern(prob, all_charge, alpha);
  const OfflineSolution first_step = materialize(prob, first.prog, prob.battery, first.step_m);

  PhasePattern pattern = all_charge;
  for (std::size_t i = 0; i < N; ++i) {
    if (first.prog.slots[i] != Slot::Charge || frame_receives_energy(first_step, i)) continue;
    const double zero_rho = loss_of_frame(prob, first_step, i, LossMode::ZeroRho);
    const double charge = loss_of_frame(prob, first_step, i, LossMode::AllCharge);
    if (zero_rho < charge) pattern[i] = PhaseTag::SplitPower;
  }

  OfflineSolution baseline = materialize(prob, first.prog, prob.battery, prob.battery);
  if (pattern == all_charge) return baseline;

  const PatternRun final_run = run_pattern(prob, pattern, alpha);
  OfflineSolution refined = materialize(prob, final_run.prog, prob.battery, prob.battery);
  OfflineSolution& best = refined.rate_avg >= baseline.rate_avg ? refined : baseline;
  const SolverStats other = (&best == &refined) ? baseline.stats : refined.stats;
  accumulate(best.stats, other);
  return best;
}

OfflineSolution solve_p3_enumerate(const OfflineProblem& prob) {
  prob.validate();
  const std::size_t N = prob.frames.size();
  if (N > 20) throw ValidationError("pattern enumeration is limited to 20 frames");
  const std::vector<double> alpha = optimal_alpha_a(prob);
  OfflineSolution best;
  best.rate_avg = -kInf;
  SolverStats total;
  for (unsigned long mask = 0; mask < (1ul << N); ++mask) {
    PhasePattern pattern(N);
    for (std::size_t i = 0; i < N; ++i)
      pattern[i] = (mask >> i) & 1u ? PhaseTag::SplitPower : PhaseTag::ChargePhase;
    OfflineSolution s = solve_p3_fixed_pattern(prob, pattern, alpha, DischargeEval::True);
    accumulate(total, s.stats);
    if (s.rate_avg > best.rate_avg) best = std::move(s);
  }
  best.stats = total;
  return best;
}

OfflineSolution no_battery_baseline(const OfflineProblem& prob) {
  prob.validate();
  return evaluate_decisions(prob, std::vector<FrameDecision>(prob.frames.size()), prob.battery);
}

OfflineSolution ideal_battery_baseline(const OfflineProblem& prob) {
  prob.validate();
  const BatteryModel& m = prob.battery;
  OfflineProblem ideal = prob;
  ideal.battery = make_fixed_efficiency(m.capacity_B, 1.0, 1.0, m.nominal_voltage_VB);
  const OfflineSolution plan = algorithm1(ideal);

  std::vector<FrameDecision> out = plan.decisions;
  repair_decisions(prob, out, m);
  OfflineSolution sol = evaluate_decisions(prob, out, m);
  sol.stats = plan.stats;
  return sol;
}

}  // namespace ehtx
