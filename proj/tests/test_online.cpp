#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ehtx/battery_model.hpp"
#include "ehtx/errors.hpp"
#include "ehtx/online.hpp"
#include "ehtx/single_frame.hpp"

using namespace ehtx;

namespace {

FrameSpec tmpl(double p) {
  FrameSpec f;
  f.harvested_power_c = 0.05;
  f.circuit_power_p = p;
  f.bandwidth_W = 1e7;
  f.noise = NoiseModel::spectral_density(1e-15, true, 1e6);
  return f;
}

double reward(const FrameSpec& t, const BatteryModel& m, double c, double b, double b_next) {
  const Transition tr = best_transition(frame_with(t, c, 1.0), m, b, b_next);
  if (!tr.feasible) return -std::numeric_limits<double>::infinity();
  return stage_reward(frame_with(t, c, 1.0), tr.transmit_energy);
}

}  // namespace

TEST(Online, ExponentialQuantizationKeepsTheMean) {
  for (int K : {1, 2, 8, 32}) {
    const DiscreteDistribution d = quantize_exponential(K, 1.0);
    EXPECT_NO_THROW(d.validate());
    EXPECT_NEAR(d.mean(), 1.0, 1e-12) << "K=" << K;
    for (std::size_t i = 1; i < d.support.size(); ++i) EXPECT_GT(d.support[i], d.support[i - 1]);
  }
  EXPECT_NEAR(quantize_exponential(4, 2.5).mean(), 2.5, 1e-12);
  EXPECT_THROW(quantize_exponential(0), ValidationError);
}

TEST(Online, DistributionValidation) {
  EXPECT_THROW((DiscreteDistribution{{}, {}}.validate()), ValidationError);
  EXPECT_THROW((DiscreteDistribution{{1.0, 2.0}, {0.5}}.validate()), ValidationError);
  EXPECT_THROW((DiscreteDistribution{{1.0, 2.0}, {0.5, 0.6}}.validate()), ValidationError);
  EXPECT_THROW((DiscreteDistribution{{1.0, 2.0}, {1.5, -0.5}}.validate()), ValidationError);
  const DiscreteDistribution u = DiscreteDistribution::uniform({0.05, 0.1});
  EXPECT_DOUBLE_EQ(u.mean(), 0.075);
  EXPECT_EQ(u.nearest(0.09), 1u);
}

TEST(Online, TransitionEnergyBalance) {
  const BatteryModel m = make_step_discharge(0.01, 0.0);  // lossless
  const FrameSpec f = frame_with(tmpl(0.05), 0.1, 1.0);
  // Lossless: transmit energy = c tau - p (1 - rho) tau - (b_next - b).
  const Transition keep = best_transition(f, m, 0.005, 0.005);
  ASSERT_TRUE(keep.feasible);
  const double rho = keep.decision.rho;
  EXPECT_NEAR(keep.transmit_energy, 0.1 - 0.05 * (1.0 - rho), 1e-9);
  const Transition store = best_transition(f, m, 0.0, 0.01);
  ASSERT_TRUE(store.feasible);
  EXPECT_LE(store.transmit_energy, keep.transmit_energy);
  EXPECT_FALSE(best_transition(frame_with(tmpl(0.05), 0.0, 1.0), m, 0.0, 0.005).feasible);
}

TEST(Online, DpSingleFrameIsGreedy) {
  const BatteryModel m = make_step_discharge(0.01, 5.0);
  const FrameSpec t = tmpl(0.05);
  const DpPolicy dp = dp_build(DiscreteDistribution::uniform({0.05, 0.1}), DiscreteDistribution::point(1.0), t, m,
                               0.0005, 1);
  const GreedyPolicy greedy(m);
  for (double b : {0.0, 0.004, 0.01}) {
    for (double c : {0.05, 0.1}) {
      const FrameSpec f = frame_with(t, c, 1.0);
      const SystemState s{0, c, 1.0, b};
      const double r_dp = frame_rate(dp.act(s, f), f, m, b, true);
      const double r_greedy = frame_rate(greedy.act(s, f), f, m, b, true);
      EXPECT_NEAR(r_dp, r_greedy, 1e-6) << "b=" << b << " c=" << c;
    }
  }
}

// Exhaustive search over every gridded policy of a two-frame problem on a
// three-point grid: 3^2 first-stage maps times 3^6 second-stage maps.
TEST(Online, DpMatchesExhaustivePolicyEnumeration) {
  const BatteryModel m = make_step_discharge(0.01, 5.0);
  const FrameSpec t = tmpl(0.05);
  const std::vector<double> cs{0.05, 0.1}, grid{0.0, 0.005, 0.01};
  const DpPolicy dp = dp_build(DiscreteDistribution::uniform(cs), DiscreteDistribution::point(1.0), t, m, 0.005, 2);
  ASSERT_EQ(dp.battery_grid().size(), 3u);

  double R[2][3][3];
  for (int ic = 0; ic < 2; ++ic)
    for (int ib = 0; ib < 3; ++ib)
      for (int jb = 0; jb < 3; ++jb) R[ic][ib][jb] = reward(t, m, cs[ic], grid[ib], grid[jb]);

  for (int b0 = 0; b0 < 3; ++b0) {
    double best = -std::numeric_limits<double>::infinity();
    for (int p1 = 0; p1 < 9; ++p1) {
      const int a1[2] = {p1 % 3, p1 / 3};
      for (int p2 = 0; p2 < 729; ++p2) {
        int a2[2][3];
        for (int k = 0, code = p2; k < 6; ++k, code /= 3) a2[k / 3][k % 3] = code % 3;
        double v = 0.0;
        for (int c1 = 0; c1 < 2; ++c1) {
          double inner = R[c1][b0][a1[c1]];
          for (int c2 = 0; c2 < 2; ++c2) inner += 0.5 * R[c2][a1[c1]][a2[c2][a1[c1]]];
          v += 0.5 * inner;
        }
        best = std::max(best, v);
      }
    }
    EXPECT_NEAR(dp.expected_value(0, b0), best, 1e-12) << "b0=" << b0;
  }
  EXPECT_DOUBLE_EQ(dp.expected_value(2, 1), 0.0);
}

TEST(Online, DpBuildValidation) {
  const FrameSpec t = tmpl(0.05);
  const auto C = DiscreteDistribution::uniform({0.05, 0.1});
  const auto H = DiscreteDistribution::point(1.0);
  EXPECT_THROW(dp_build(C, H, t, make_step_discharge(0.01, 5.0), 0.02, 2), ValidationError);
  EXPECT_THROW(dp_build(C, H, t, make_step_discharge(std::numeric_limits<double>::infinity(), 5.0), 0.001, 2),
               ValidationError);
  EXPECT_THROW(dp_build(C, H, t, make_step_discharge(0.01, 5.0), 0.001, 0), ValidationError);
}

TEST(Online, CpsrWithoutStorageLeavesBatteryUntouched) {
  const BatteryModel m = make_step_discharge(0.1, 5.0);
  const auto pol = ConstantRatioPolicy::cpsr(m, 1.0);
  const Realization r{{0.05, 0.1, 0.1, 0.05}, {0.3, 1.2, 2.0, 0.7}};
  const PolicyTrace tr = simulate_policy(pol, r, tmpl(0.05), m, 0.03);
  for (double level : tr.residuals) EXPECT_DOUBLE_EQ(level, 0.03);
  EXPECT_DOUBLE_EQ(tr.rates[0], 0.0);  // c = p: nothing left to radiate
}

TEST(Online, ZeroHarvestGivesZeroRates) {
  const BatteryModel m = make_step_discharge(0.1, 5.0);
  const Realization r{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  const GreedyPolicy g(m);
  const StatisticalPolicy st(m, 0.075, 1.0);
  for (const OnlinePolicy* p : {static_cast<const OnlinePolicy*>(&g), static_cast<const OnlinePolicy*>(&st)}) {
    const PolicyTrace tr = simulate_policy(*p, r, tmpl(0.05), m, 0.0);
    for (double x : tr.rates) EXPECT_DOUBLE_EQ(x, 0.0);
    EXPECT_DOUBLE_EQ(tr.rate_avg, 0.0);
  }
}

TEST(Online, GreedyOnEqualFramesRepeatsItself) {
  const BatteryModel m = make_internal_resistance(0.1, 5.0);
  const Realization r{{0.1, 0.1, 0.1}, {1.0, 1.0, 1.0}};
  const PolicyTrace tr = simulate_policy(GreedyPolicy(m), r, tmpl(0.05), m, 0.0);
  for (const FrameDecision& d : tr.decisions) {
    EXPECT_NEAR(d.rho, tr.decisions[0].rho, 1e-12);
    EXPECT_NEAR(d.d_b, tr.decisions[0].d_b, 1e-12);
  }
  const SingleFrameSolution s = solve_single_frame(frame_with(tmpl(0.05), 0.1, 1.0), m, 0.0);
  EXPECT_NEAR(tr.rate_avg, s.rate, 1e-9);
}

TEST(Online, SimulateRejectsLengthMismatch) {
  const BatteryModel m = make_step_discharge(0.1, 5.0);
  EXPECT_THROW(simulate_policy(GreedyPolicy(m), Realization{{0.1, 0.1}, {1.0}}, tmpl(0.05), m, 0.0),
               ValidationError);
}

TEST(Online, ConstantRatioValidation) {
  const BatteryModel m = make_step_discharge(0.1, 5.0);
  EXPECT_THROW(ConstantRatioPolicy::ctsr(m, 1.5, 0.5), ValidationError);
  EXPECT_THROW(ConstantRatioPolicy::ctsr(m, 0.5, -0.1), ValidationError);
  EXPECT_THROW(ConstantRatioPolicy::cpsr(m, 2.0), ValidationError);
}

TEST(Online, CpsrFitPrefersNoStorageWhenHarvestIsAmple) {
  const BatteryModel m = make_internal_resistance(1.0, 0.0);
  std::vector<Realization> samples(20, Realization{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}});
  const ConstantRatioPolicy p = fit_cpsr(samples, tmpl(0.01), m, 0.0);
  EXPECT_NEAR(p.alpha_b(), 1.0, 1e-6);
}

TEST(Online, CtsrFitGridAndGoldenAgree) {
  const BatteryModel m = make_step_discharge(0.1, 5.0);
  std::vector<Realization> samples{{{0.05, 0.1, 0.05}, {0.5, 1.5, 1.0}}, {{0.1, 0.1, 0.05}, {1.0, 0.3, 2.0}}};
  const ConstantRatioPolicy fine = fit_ctsr(samples, 0.075, tmpl(0.05), m, 0.0, true, 2001);
  const ConstantRatioPolicy coarse = fit_ctsr(samples, 0.075, tmpl(0.05), m, 0.0, true, 64);
  auto rate = [&](const ConstantRatioPolicy& p) {
    double s = 0.0;
    for (const auto& r : samples) s += simulate_policy(p, r, tmpl(0.05), m, 0.0).rate_avg;
    return s;
  };
  EXPECT_NEAR(rate(fine), rate(coarse), 1e-3 * rate(fine));
  EXPECT_NEAR(fine.alpha_a(), 1.0 - optimal_charge_power(0.075, m) / 0.075, 1e-15);
}
