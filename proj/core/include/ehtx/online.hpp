#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ehtx/battery_model.hpp"
#include "ehtx/frame_model.hpp"

namespace ehtx {

struct SystemState {
  std::size_t frame_index_n = 0;  ///< 0-based
  double harvested_C = 0.0;
  double gain_H = 1.0;
  double residual_B = 0.0;
};

struct DiscreteDistribution {
  std::vector<double> support;
  std::vector<double> probabilities;

  /// Throws ValidationError unless the probabilities are nonnegative and sum
  /// to 1 within 1e-12.
  void validate() const;
  double mean() const;
  std::size_t nearest(double value) const;

  static DiscreteDistribution point(double value);
  static DiscreteDistribution uniform(std::vector<double> support);
};

/// K-point equiprobable stand-in for an exponential law: each point is the
/// conditional mean of one of K equal-probability quantile bins.
DiscreteDistribution quantize_exponential(int K, double mean = 1.0);

/// One trial's harvest and gain sequences.
struct Realization {
  std::vector<double> c;
  std::vector<double> h;
};

/// A frame template with the harvest and gain of one frame filled in.
FrameSpec frame_with(const FrameSpec& tmpl, double c, double h);

class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;
  virtual std::string name() const = 0;
  /// Decision for the frame described by `frame` (realized c and h) from the
  /// state `s`. Must be feasible for residual s.residual_B.
  virtual FrameDecision act(const SystemState& s, const FrameSpec& frame) const = 0;
};

struct TransitionOptions {
  int search_points = 64;
  double golden_tol = 1e-9;
  bool enforce_bw = true;
};

/// Largest transmit energy (J) of a frame with harvest c that starts with
/// internal battery energy b and ends with exactly b_next, together with the
/// decision achieving it. Infeasible transitions report feasible = false.
/// The transmit energy does not depend on the channel gain, which is what
/// lets the DP tabulate it once per (c, b, b_next).
struct Transition {
  bool feasible = false;
  double transmit_energy = 0.0;  ///< may be negative: the circuit is then left off
  FrameDecision decision;
};

Transition best_transition(const FrameSpec& frame, const BatteryModel& m, double b, double b_next,
                           const TransitionOptions& opt = {});

/// Stage reward in bits/symbol for transmit energy E on `frame`; 0 if E <= 0.
double stage_reward(const FrameSpec& frame, double E);

struct DpOptions {
  TransitionOptions transition{};
};

/// Finite-horizon dynamic program over a uniform battery grid. Tables are
/// indexed by frame, harvest support index, gain support index and grid
/// index. Immutable after dp_build.
class DpPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "dp"; }
  FrameDecision act(const SystemState& s, const FrameSpec& frame) const override;

  std::size_t horizon() const { return horizon_; }
  const std::vector<double>& battery_grid() const { return grid_; }
  /// Expected value-to-go before frame n (0-based) is revealed; n = horizon
  /// gives the zero terminal table.
  double expected_value(std::size_t n, std::size_t grid_index) const;
  /// Value of state (n, c index, h index, grid index).
  double value(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const;
  /// Grid index of the end-of-frame battery level chosen in that state.
  std::size_t action(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const;
  /// Grid index at or below level b.
  std::size_t grid_index_below(double b) const;

 private:
  friend DpPolicy dp_build(const DiscreteDistribution&, const DiscreteDistribution&, const FrameSpec&,
                           const BatteryModel&, double, std::size_t, const DpOptions&);
  std::size_t idx(std::size_t n, std::size_t ic, std::size_t ih, std::size_t ib) const;

  DiscreteDistribution C_, H_;
  FrameSpec tmpl_;
  BatteryModel m_;
  DpOptions opt_;
  std::size_t horizon_ = 0;
  double step_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> transmit_;  // [ic][ib][ib_next], NaN when infeasible
  std::vector<double> value_;     // [n][ic][ih][ib]
  std::vector<std::size_t> action_;
  std::vector<double> expected_;  // [n][ib], n in [0, horizon]
};

/// Backward recursion from the last frame. grid_step must lie in (0, B].
DpPolicy dp_build(const DiscreteDistribution& C, const DiscreteDistribution& H, const FrameSpec& tmpl,
                  const BatteryModel& m, double grid_step, std::size_t N, const DpOptions& opt = {});

FrameDecision dp_act(const DpPolicy& pol, const SystemState& s, const FrameSpec& frame);

/// Solves the current frame alone with the whole residual available.
class GreedyPolicy : public OnlinePolicy {
 public:
  GreedyPolicy(BatteryModel m, bool enforce_bw = true, int grid_check_points = 256);
  std::string name() const override { return "greedy"; }
  FrameDecision act(const SystemState& s, const FrameSpec& frame) const override;

 private:
  BatteryModel m_;
  bool enforce_bw_;
  int grid_points_;
};

FrameDecision greedy_act(const SystemState& s, const FrameSpec& frame, const BatteryModel& m,
                         bool enforce_bw = true);

/// Two-frame lookahead: the current frame plus a frame with the mean harvest
/// and mean gain, solved offline; the first decision is applied.
class StatisticalPolicy : public OnlinePolicy {
 public:
  StatisticalPolicy(BatteryModel m, double mean_c, double mean_h, bool enforce_bw = true);
  std::string name() const override { return "statistical"; }
  FrameDecision act(const SystemState& s, const FrameSpec& frame) const override;

 private:
  BatteryModel m_;
  double mean_c_, mean_h_;
  bool enforce_bw_;
};

FrameDecision statistical_act(const SystemState& s, double mean_c, double mean_h, const FrameSpec& frame,
                              const BatteryModel& m, bool enforce_bw = true);

/// Same splitting ratios in every frame. CTSR: charge-then-transmit with a
/// fixed time split rho and charging split alpha_a, draining the battery in
/// phase 2. CPSR: no charging phase and a fixed power split alpha_b; the
/// battery is never drained.
class ConstantRatioPolicy : public OnlinePolicy {
 public:
  enum class Kind { CTSR, CPSR };
  static ConstantRatioPolicy ctsr(BatteryModel m, double rho, double alpha_a, bool enforce_bw = true);
  static ConstantRatioPolicy cpsr(BatteryModel m, double alpha_b);

  std::string name() const override { return kind_ == Kind::CTSR ? "ctsr" : "cpsr"; }
  FrameDecision act(const SystemState& s, const FrameSpec& frame) const override;

  Kind kind() const { return kind_; }
  double rho() const { return rho_; }
  double alpha_a() const { return alpha_a_; }
  double alpha_b() const { return alpha_b_; }

 private:
  ConstantRatioPolicy(Kind k, BatteryModel m, double rho, double alpha_a, double alpha_b, bool bw)
      : kind_(k), m_(std::move(m)), rho_(rho), alpha_a_(alpha_a), alpha_b_(alpha_b), enforce_bw_(bw) {}
  Kind kind_;
  BatteryModel m_;
  double rho_, alpha_a_, alpha_b_;
  bool enforce_bw_;
};

struct PolicyTrace {
  std::string policy;
  std::vector<FrameDecision> decisions;
  std::vector<double> rates;      ///< bits/symbol
  std::vector<double> residuals;  ///< J after each frame
  double rate_avg = 0.0;
};

/// Steps the realization forward under `policy`. Throws SolverError if the
/// policy returns an infeasible decision.
PolicyTrace simulate_policy(const OnlinePolicy& policy, const Realization& r, const FrameSpec& tmpl,
                            const BatteryModel& m, double B0, bool enforce_bw = true);

/// Picks rho for CTSR by maximizing the mean rate over `samples`;
/// alpha_a is the optimal charging split at the mean harvest.
ConstantRatioPolicy fit_ctsr(const std::vector<Realization>& samples, double mean_c, const FrameSpec& tmpl,
                             const BatteryModel& m, double B0, bool enforce_bw = true,
                             int search_points = 64);

/// Picks alpha_b for CPSR by maximizing the mean rate over `samples`.
ConstantRatioPolicy fit_cpsr(const std::vector<Realization>& samples, const FrameSpec& tmpl,
                             const BatteryModel& m, double B0, bool enforce_bw = true,
                             int search_points = 64);

}  // namespace ehtx
