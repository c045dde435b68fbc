#include "ehtx/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ehtx/errors.hpp"
#include "ehtx/offline_opt.hpp"
#include "ehtx/scalar_search.hpp"
#include "ehtx/single_frame.hpp"

namespace ehtx {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_level(double b, double B) { return std::clamp(b, 0.0, B); }

}  // namespace

void DiscreteDistribution::validate() const {
  if (support.empty()) throw ValidationError("distribution support is empty");
  if (support.size() != probabilities.size())
    throw ValidationError("distribution support and probabilities differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw ValidationError("distribution support must be finite");
    if (!(probabilities[i] >= 0.0)) throw ValidationError("distribution probabilities must be >= 0");
    sum += probabilities[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "distribution probabilities sum to " << sum << ", not 1";
    throw ValidationError(os.str());
  }
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * probabilities[i];
  return m;
}

std::size_t DiscreteDistribution::nearest(double value) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < support.size(); ++i)
    if (std::abs(support[i] - value) < std::abs(support[best] - value)) best = i;
  return best;
}

DiscreteDistribution DiscreteDistribution::point(double value) { return {{value}, {1.0}}; }

DiscreteDistribution DiscreteDistribution::uniform(std::vector<double> support) {
  const std::size_t n = support.size();
  if (n == 0) throw ValidationError("distribution support is empty");
  return {std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

DiscreteDistribution quantize_exponential(int K, double mean) {
  if (K < 1) throw ValidationError("exponential quantization needs K >= 1");
  if (!(mean > 0.0)) throw ValidationError("exponential mean must be > 0");
  DiscreteDistribution d;
  // Conditional mean of Exp(1) on [a, b): ((a+1)e^-a - (b+1)e^-b) / (e^-a - e^-b).
  auto tail = [](double x) { return std::isinf(x) ? 0.0 : (x + 1.0) * std::exp(-x); };
  for (int j = 0; j < K; ++j) {
    const double a = -std::log1p(-static_cast<double>(j) / K);
    const double b = j + 1 == K ? std::numeric_limits<double>::infinity()
                                : -std::log1p(-static_cast<double>(j + 1) / K);
    const double mass = std::exp(-a) - (std::isinf(b) ? 0.0 : std::exp(-b));
    d.support.push_back(mean * (tail(a) - tail(b)) / mass);
    d.probabilities.push_back(1.0 / K);
  }
  return d;
}

FrameSpec frame_with(const FrameSpec& tmpl, double c, double h) {
  FrameSpec f = tmpl;
  f.harvested_power_c = c;
  f.channel_gain_h = h;
  return f;
}

double stage_reward(const FrameSpec& frame, double E) {
  if (!(E > 0.0)) return 0.0;
  return rate_prefactor(frame.noise) * std::log2(1.0 + snr_per_joule(frame, frame.symbols_Ns) * E);
}

Transition best_transition(const FrameSpec& frame, const BatteryModel& m, double b, double b_next,
                           const TransitionOptions& opt) {
  const double c = frame.harvested_power_c;
  const double p = frame.circuit_power_p;
  const double tau = frame.duration_tau;
  const double B = m.capacity_B;
  const double delta = b_next - b;
  Transition best;
  best.transmit_energy = kNegInf;
  if (b < -1e-12 || b_next < -1e-12 || b > B * (1.0 + 1e-12) || b_next > B * (1.0 + 1e-12)) return best;

  // Charge-then-transmit: rho of the frame charges at the optimal split and
  // phase 2 drains whatever exceeds the target.
  const double cp = optimal_charge_power(c, m);
  const double stored_rate = internal_charge_power(cp, m);
  const double alpha_star = c > 0.0 ? 1.0 - cp / c : 1.0;
  const double cap = opt.enforce_bw ? rho_bandwidth_limit(frame) : 1.0;
  const double u_max = internal_discharge_power(m.max_discharge_power(), m);  // +inf if unlimited
  const double charge_per_rho = stored_rate * tau;

  double lo = 0.0, hi = 0.0;
  if (charge_per_rho > 0.0) {
    lo = std::max(0.0, delta / charge_per_rho);
    hi = std::min(cap, (B - b) / charge_per_rho);
    if (std::isfinite(u_max)) hi = std::min(hi, (u_max * tau + delta) / (charge_per_rho + u_max * tau));
    else if (hi >= 1.0) hi = std::nextafter(1.0, 0.0);
  } else if (delta <= 0.0) {
    if (std::isfinite(u_max) && -delta > u_max * tau * (1.0 + 1e-12)) hi = -1.0;
  } else {
    hi = -1.0;
  }
  if (hi >= lo - 1e-15 && (charge_per_rho > 0.0 || delta <= 0.0)) {
    hi = std::max(hi, lo);
    auto drain_at = [&](double rho) {
      const double internal = std::max(0.0, rho * charge_per_rho - delta);
      return drain_power(internal, (1.0 - rho) * tau, m);
    };
    auto energy = [&](double rho) { return (c - p + drain_at(rho)) * (1.0 - rho) * tau; };
    const ScalarOptimum o = hi > lo ? grid_then_golden_max(energy, lo, hi, opt.search_points, opt.golden_tol)
                                    : ScalarOptimum{lo, energy(lo)};
    best.feasible = true;
    best.transmit_energy = o.value;
    best.decision = FrameDecision{o.x, o.x > 0.0 ? alpha_star : 1.0, 1.0, 0.0, drain_at(o.x)};
  }

  // Split power: no charging phase, phase 2 banks delta at a fixed rate.
  if (delta > 0.0 && c > 0.0) {
    const double need = delta / tau;
    if (need <= internal_charge_power(cp, m) * (1.0 + 1e-12)) {
      const double x = invert_internal_charge(std::min(need, stored_rate), cp, m);
      const double E = (c - x - p) * tau;
      if (!best.feasible || E > best.transmit_energy) {
        best.feasible = true;
        best.transmit_energy = E;
        best.decision = FrameDecision{0.0, 1.0, std::clamp(1.0 - x / c, 0.0, 1.0), 0.0, 0.0};
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dynamic program

std::size_t DpPolicy::idx(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const {
  return ((n * C_.support.size() + ic) * H_.support.size() + ih) * grid_.size() + ib;
}

double DpPolicy::expected_value(std::size_t n, std::size_t ib) const {
  return expected_.at(n * grid_.size() + ib);
}

double DpPolicy::value(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const {
  return value_.at(idx(n, ic, ih, ib));
}

std::size_t DpPolicy::action(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const {
  return action_.at(idx(n, ic, ih, ib));
}

std::size_t DpPolicy::grid_index_below(double b) const {
  if (!(b > 0.0)) return 0;
  const double k = std::floor(b / step_ + 1e-9);
  return std::min(grid_.size() - 1, static_cast<std::size_t>(k));
}

DpPolicy dp_build(const DiscreteDistribution& C, const DiscreteDistribution& H, const FrameSpec& tmpl,
                  const BatteryModel& m, double grid_step, std::size_t N, const DpOptions& opt) {
  C.validate();
  H.validate();
  m.validate();
  tmpl.validate();
  if (N < 1) throw ValidationError("DP horizon must be >= 1");
  if (!std::isfinite(m.capacity_B)) throw ValidationError("DP needs a finite battery capacity");
  if (!(grid_step > 0.0) || grid_step > m.capacity_B * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "DP grid step " << grid_step << " must lie in (0, B=" << m.capacity_B << "]";
    throw ValidationError(os.str());
  }
  DpPolicy pol;
  pol.C_ = C;
  pol.H_ = H;
  pol.tmpl_ = tmpl;
  pol.m_ = m;
  pol.opt_ = opt;
  pol.horizon_ = N;
  pol.step_ = grid_step;
  const std::size_t G = static_cast<std::size_t>(std::floor(m.capacity_B / grid_step + 1e-9)) + 1;
  pol.grid_.resize(G);
  for (std::size_t k = 0; k < G; ++k) pol.grid_[k] = std::min(m.capacity_B, k * grid_step);

  const std::size_t nc = C.support.size(), nh = H.support.size();
  pol.transmit_.assign(nc * G * G, kNaN);
  for (std::size_t ic = 0; ic < nc; ++ic) {
    const FrameSpec f = frame_with(tmpl, C.support[ic], 1.0);
    for (std::size_t ib = 0; ib < G; ++ib)
      for (std::size_t jb = 0; jb < G; ++jb) {
        const Transition t = best_transition(f, m, pol.grid_[ib], pol.grid_[jb], opt.transition);
        if (t.feasible) pol.transmit_[(ic * G + ib) * G + jb] = t.transmit_energy;
      }
  }

  pol.value_.assign(N * nc * nh * G, 0.0);
  pol.action_.assign(N * nc * nh * G, 0);
  pol.expected_.assign((N + 1) * G, 0.0);
  for (std::size_t n = N; n-- > 0;) {
    const double* next = &pol.expected_[(n + 1) * G];
    for (std::size_t ic = 0; ic < nc; ++ic)
      for (std::size_t ih = 0; ih < nh; ++ih) {
        const FrameSpec f = frame_with(tmpl, C.support[ic], H.support[ih]);
        for (std::size_t ib = 0; ib < G; ++ib) {
          double best = kNegInf;
          std::size_t arg = 0;
          for (std::size_t jb = 0; jb < G; ++jb) {
            const double E = pol.transmit_[(ic * G + ib) * G + jb];
            if (std::isnan(E)) continue;
            const double v = stage_reward(f, E) + next[jb];
            if (v > best) {
              best = v;
              arg = jb;
            }
          }
          if (!std::isfinite(best)) throw SolverError("DP state has no feasible transition");
          pol.value_[pol.idx(n, ic, ih, ib)] = best;
          pol.action_[pol.idx(n, ic, ih, ib)] = arg;
        }
      }
    for (std::size_t ib = 0; ib < G; ++ib) {
      double e = 0.0;
      for (std::size_t ic = 0; ic < nc; ++ic)
        for (std::size_t ih = 0; ih < nh; ++ih)
          e += C.probabilities[ic] * H.probabilities[ih] * pol.value_[pol.idx(n, ic, ih, ib)];
      pol.expected_[n * G + ib] = e;
    }
  }
  return pol;
}

FrameDecision DpPolicy::act(const SystemState& s, const FrameSpec& frame) const {
  if (s.frame_index_n >= horizon_) throw ValidationError("DP policy asked to act beyond its horizon");
  const std::size_t G = grid_.size();
  const std::size_t ic = C_.nearest(frame.harvested_power_c);
  const double b = clamp_level(s.residual_B, m_.capacity_B);
  const std::size_t ib = grid_index_below(b);
  const double* next = &expected_[(s.frame_index_n + 1) * G];
  // Re-maximize with the realized gain; the tabulated transmit energies do
  // not depend on it.
  double best = kNegInf;
  std::size_t arg = 0;
  for (std::size_t jb = 0; jb < G; ++jb) {
    const double E = transmit_[(ic * G + ib) * G + jb];
    if (std::isnan(E)) continue;
    const double v = stage_reward(frame, E) + next[jb];
    if (v > best) {
      best = v;
      arg = jb;
    }
  }
  // Energy above the grid point rides along to the next frame.
  const double carry = b - grid_[ib];
  const double target = std::min(m_.capacity_B, grid_[arg] + carry);
  Transition t = best_transition(frame, m_, b, target, opt_.transition);
  if (!t.feasible) t = best_transition(frame, m_, b, grid_[arg], opt_.transition);
  if (!t.feasible) throw SolverError("DP action is infeasible from the realized battery level");
  return t.decision;
}

FrameDecision dp_act(const DpPolicy& pol, const SystemState& s, const FrameSpec& frame) {
  return pol.act(s, frame);
}

// ---------------------------------------------------------------------------
// Heuristics

GreedyPolicy::GreedyPolicy(BatteryModel m, bool enforce_bw, int grid_check_points)
    : m_(std::move(m)), enforce_bw_(enforce_bw), grid_points_(grid_check_points) {}

FrameDecision GreedyPolicy::act(const SystemState& s, const FrameSpec& frame) const {
  SingleFrameOptions opt;
  opt.enforce_bw = enforce_bw_;
  opt.grid_check_points = grid_points_;
  return solve_single_frame(frame, m_, clamp_level(s.residual_B, m_.capacity_B), opt).decision;
}

FrameDecision greedy_act(const SystemState& s, const FrameSpec& frame, const BatteryModel& m,
                         bool enforce_bw) {
  return GreedyPolicy(m, enforce_bw).act(s, frame);
}

StatisticalPolicy::StatisticalPolicy(BatteryModel m, double mean_c, double mean_h, bool enforce_bw)
    : m_(std::move(m)), mean_c_(mean_c), mean_h_(mean_h), enforce_bw_(enforce_bw) {
  if (!std::isfinite(mean_c_) || !std::isfinite(mean_h_))
    throw ValidationError("statistical policy needs finite means");
}

FrameDecision StatisticalPolicy::act(const SystemState& s, const FrameSpec& frame) const {
  OfflineProblem prob;
  prob.frames = {frame, frame_with(frame, mean_c_, mean_h_)};
  prob.battery = m_;
  prob.B0 = clamp_level(s.residual_B, m_.capacity_B);
  prob.enforce_bw = enforce_bw_;
  return algorithm1(prob).decisions.front();
}

FrameDecision statistical_act(const SystemState& s, double mean_c, double mean_h, const FrameSpec& frame,
                              const BatteryModel& m, bool enforce_bw) {
  return StatisticalPolicy(m, mean_c, mean_h, enforce_bw).act(s, frame);
}

ConstantRatioPolicy ConstantRatioPolicy::ctsr(BatteryModel m, double rho, double alpha_a, bool enforce_bw) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("CTSR rho must lie in [0, 1]");
  if (!(alpha_a >= 0.0 && alpha_a <= 1.0)) throw ValidationError("CTSR alpha_a must lie in [0, 1]");
  return ConstantRatioPolicy(Kind::CTSR, std::move(m), rho, alpha_a, 1.0, enforce_bw);
}

ConstantRatioPolicy ConstantRatioPolicy::cpsr(BatteryModel m, double alpha_b) {
  if (!(alpha_b >= 0.0 && alpha_b <= 1.0)) throw ValidationError("CPSR alpha_b must lie in [0, 1]");
  return ConstantRatioPolicy(Kind::CPSR, std::move(m), 0.0, 1.0, alpha_b, false);
}

FrameDecision ConstantRatioPolicy::act(const SystemState& s, const FrameSpec& frame) const {
  const double c = frame.harvested_power_c;
  const double tau = frame.duration_tau;
  const double B = m_.capacity_B;
  const double b = clamp_level(s.residual_B, B);
  const double a_lo = alpha_lower_bound(c, m_);
  FrameDecision d;
  if (kind_ == Kind::CPSR) {
    d.alpha_b = std::max(alpha_b_, a_lo);
    // Phase-2 charging is limited by the room left in the battery.
    if (d.alpha_b < 1.0 && c > 0.0) {
      const double x = (1.0 - d.alpha_b) * c;
      if (b + internal_charge_power(x, m_) * tau > B) {
        const double upper = std::min(x, optimal_charge_power(c, m_));
        const double xs = invert_internal_charge(std::max(0.0, B - b) / tau, upper, m_);
        d.alpha_b = std::clamp(1.0 - xs / c, a_lo, 1.0);
      }
    }
    return d;
  }
  d.alpha_a = std::max(alpha_a_, a_lo);
  d.rho = enforce_bw_ ? std::min(rho_, rho_bandwidth_limit(frame)) : rho_;
  const double rate = internal_charge_power((1.0 - d.alpha_a) * c, m_);
  if (rate > 0.0 && b + rate * d.rho * tau > B) d.rho = std::max(0.0, (B - b) / (rate * tau));
  if (d.rho <= 0.0) d.alpha_a = 1.0;
  const double stored = d.rho > 0.0 ? rate * d.rho * tau : 0.0;
  d.d_b = drain_power(b + stored, (1.0 - d.rho) * tau, m_);
  return d;
}

// ---------------------------------------------------------------------------
// Simulation and fitting

PolicyTrace simulate_policy(const OnlinePolicy& policy, const Realization& r, const FrameSpec& tmpl,
                            const BatteryModel& m, double B0, bool enforce_bw) {
  if (r.c.size() != r.h.size()) throw ValidationError("realization harvest and gain lengths differ");
  PolicyTrace tr;
  tr.policy = policy.name();
  double level = B0;
  double sum = 0.0;
  for (std::size_t n = 0; n < r.c.size(); ++n) {
    const FrameSpec f = frame_with(tmpl, r.c[n], r.h[n]);
    const SystemState s{n, r.c[n], r.h[n], level};
    const FrameDecision d = policy.act(s, f);
    const auto v = check_feasible(d, f, m, level, enforce_bw);
    if (!v.empty()) {
      std::ostringstream os;
      os << "policy " << policy.name() << " frame " << n << ": " << InfeasibleDecision(v).what();
      throw SolverError(os.str());
    }
    level = clamp_level(level + energy_ledger(d, f, m).net_battery_change(), m.capacity_B);
    const double rate = frame_rate_unchecked(d, f);
    tr.decisions.push_back(d);
    tr.rates.push_back(rate);
    tr.residuals.push_back(level);
    sum += rate;
  }
  tr.rate_avg = r.c.empty() ? 0.0 : sum / static_cast<double>(r.c.size());
  return tr;
}

namespace {

double mean_rate(const OnlinePolicy& pol, const std::vector<Realization>& samples, const FrameSpec& tmpl,
                 const BatteryModel& m, double B0, bool enforce_bw) {
  double sum = 0.0;
  for (const Realization& r : samples) sum += simulate_policy(pol, r, tmpl, m, B0, enforce_bw).rate_avg;
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

}  // namespace

ConstantRatioPolicy fit_ctsr(const std::vector<Realization>& samples, double mean_c, const FrameSpec& tmpl,
                             const BatteryModel& m, double B0, bool enforce_bw, int search_points) {
  if (samples.empty()) throw ValidationError("CTSR fitting needs at least one sample");
  const double alpha = mean_c > 0.0 ? 1.0 - optimal_charge_power(mean_c, m) / mean_c : 1.0;
  const double cap = enforce_bw ? rho_bandwidth_limit(tmpl) : 1.0;
  auto objective = [&](double rho) {
    return mean_rate(ConstantRatioPolicy::ctsr(m, rho, alpha, enforce_bw), samples, tmpl, m, B0, enforce_bw);
  };
  const ScalarOptimum o = grid_then_golden_max(objective, 0.0, cap, search_points, 1e-6);
  return ConstantRatioPolicy::ctsr(m, o.x, alpha, enforce_bw);
}

ConstantRatioPolicy fit_cpsr(const std::vector<Realization>& samples, const FrameSpec& tmpl,
                             const BatteryModel& m, double B0, bool enforce_bw, int search_points) {
  if (samples.empty()) throw ValidationError("CPSR fitting needs at least one sample");
  auto objective = [&](double alpha_b) {
    return mean_rate(ConstantRatioPolicy::cpsr(m, alpha_b), samples, tmpl, m, B0, enforce_bw);
  };
  const ScalarOptimum o = grid_then_golden_max(objective, 0.0, 1.0, search_points, 1e-6);
  return ConstantRatioPolicy::cpsr(m, o.x);
}

}  // namespace ehtx
