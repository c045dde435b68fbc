#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ehtx/errors.hpp"
#include "ehtx/battery_model.hpp"
#include "ehtx/frame_model.hpp"
#include "ehtx/rng.hpp"

using namespace ehtx;

namespace {

FrameSpec frame(double c, double p, double h = 1.0) {
  FrameSpec f;
  f.harvested_power_c = c;
  f.circuit_power_p = p;
  f.channel_gain_h = h;
  f.bandwidth_W = 1e7;
  f.noise = NoiseModel::spectral_density(1e-15, true, 1e6);
  return f;
}

bool has(const std::vector<Violation>& v, Constraint c) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.constraint == c; });
}

}  // namespace

TEST(FrameModel, RateFormulas) {
  NoiseModel unit = NoiseModel::unit_psd();
  EXPECT_DOUBLE_EQ(rate_bits_per_symbol(3.0, 1.0, unit, 1e6), 2.0);
  NoiseModel sd = NoiseModel::spectral_density(1e-15, true);
  // h P / (N0 W) = 2e-9 / 1e-9 = 2 with the frame bandwidth.
  EXPECT_NEAR(rate_bits_per_symbol(2e-9, 1.0, sd, 1e6), 0.5 * std::log2(3.0), 1e-15);
  NoiseModel narrow = NoiseModel::spectral_density(1e-15, false, 1e6);
  EXPECT_NEAR(rate_bits_per_symbol(2e-9, 1.0, narrow, 1e7), std::log2(3.0), 1e-15);
  EXPECT_THROW(rate_bits_per_symbol(-1.0, 1.0, unit, 1e6), DomainError);
}

TEST(FrameModel, BandwidthLimit) {
  EXPECT_NEAR(rho_bandwidth_limit(frame(0.1, 0.0)), 0.9, 1e-15);
  FrameSpec f = frame(0.1, 0.0);
  f.bandwidth_W = 1e6;
  EXPECT_DOUBLE_EQ(rho_bandwidth_limit(f), 0.0);
}

TEST(FrameModel, ValidateRejectsBadFrames) {
  FrameSpec f = frame(0.1, 0.0);
  EXPECT_NO_THROW(f.validate());
  f.harvested_power_c = -1.0;
  EXPECT_THROW(f.validate(), ValidationError);
  f = frame(0.1, 0.0);
  f.bandwidth_W = 1e5;  // fewer than N_s symbols fit
  EXPECT_THROW(f.validate(), ValidationError);
}

TEST(FrameModel, LedgerStoredInChargingPhase) {
  const BatteryModel m = make_internal_resistance(0.1, 5.0);
  const FrameDecision d{0.5, 0.0, 1.0, 0.0, 0.0};
  const EnergyLedger L = energy_ledger(d, frame(0.1, 0.05), m);
  EXPECT_NEAR(L.stored_in_phase1, 0.0406407864531862, 1e-15);
  EXPECT_NEAR(L.transmit_energy, 0.5 * 0.05, 1e-15);
  EXPECT_NEAR(L.circuit_energy, 0.5 * 0.05, 1e-15);
}

TEST(FrameModel, CheckFeasibleFlagsEachConstraint) {
  const BatteryModel m = make_internal_resistance(0.01, 5.0);
  const FrameSpec f = frame(0.1, 0.05);
  EXPECT_TRUE(check_feasible(FrameDecision{}, f, m, 0.0, true).empty());
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.95, 0.0, 1.0, 0.0, 0.0}, f, m, 0.0, true), Constraint::RhoBandwidth));
  EXPECT_FALSE(has(check_feasible(FrameDecision{0.95, 0.0, 1.0, 0.0, 0.0}, f, m, 0.0, false), Constraint::RhoBandwidth));
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.0, 1.0, 1.0, 0.0, 0.05}, f, m, 0.0, true), Constraint::EnergyCausality));
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.5, 0.0, 1.0, 0.0, 0.0}, f, m, 0.0, true), Constraint::CapacityPhase1));
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.0, 1.0, 0.5, 0.0, 0.01}, f, m, 0.005, true),
                  Constraint::ChargeDischargeExclusive));
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.0, 1.0, 1.0, 1.0, 0.0}, f, m, 0.0, true), Constraint::GammaBounds));
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.0, 1.0, 1.0, 0.0, 1.0}, f, m, 0.005, true), Constraint::DischargeBounds));
  EXPECT_TRUE(has(check_feasible(FrameDecision{}, f, m, 0.02, true), Constraint::InitialEnergy));
  EXPECT_THROW(frame_rate(FrameDecision{0.0, 1.0, 1.0, 0.0, 0.05}, f, m, 0.0), InfeasibleDecision);
}

TEST(FrameModel, AlphaLowerBoundAboveChargeLimit) {
  const BatteryModel m = make_internal_resistance(1.0, 50.0);  // C_p = 0.09 W
  EXPECT_NEAR(alpha_lower_bound(0.18, m), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(alpha_lower_bound(0.05, m), 0.0);
  const FrameSpec f = frame(0.18, 0.0);
  EXPECT_TRUE(has(check_feasible(FrameDecision{0.5, 0.2, 1.0, 0.0, 0.0}, f, m, 0.0, true), Constraint::AlphaBounds));
}

// Every joule harvested or drained ends up stored, radiated, lost or spilled.
TEST(FrameModelProperty, LedgerConservesEnergy) {
  CounterStream rng(7, 0, StreamId::Fitting);
  for (int i = 0; i < 2000; ++i) {
    const double r = 0.1 + 50.0 * rng.uniform01();
    const BatteryModel m = make_internal_resistance(1.0, r);
    const double c = 0.2 * rng.uniform01();
    const FrameSpec f = frame(c, 0.1 * rng.uniform01(), rng.exponential(1.0));
    const double a_lo = alpha_lower_bound(c, m);
    FrameDecision d;
    d.rho = 0.9 * rng.uniform01();
    d.alpha_a = a_lo + (1.0 - a_lo) * rng.uniform01();
    if (rng.uniform01() < 0.5) {
      d.alpha_b = a_lo + (1.0 - a_lo) * rng.uniform01();
      d.d_b = 0.0;
    } else {
      d.alpha_b = 1.0;
      d.d_b = m.max_discharge_power() * rng.uniform01();
    }
    const EnergyLedger L = energy_ledger(d, f, m);
    const double in = c * f.duration_tau + L.internal_drain;
    const double out = L.stored_in_phase1 + L.internal_store_phase2 + L.transmit_energy + L.loss_total + L.spilled;
    EXPECT_NEAR(in, out, 1e-12 * (1.0 + in));
    EXPECT_GE(L.loss_total, -1e-15);
    EXPECT_GE(L.transmit_energy, 0.0);
    EXPECT_GE(frame_rate_unchecked(d, f), 0.0);
  }
}

TEST(FrameModelProperty, RateIncreasesWithDischarge) {
  const BatteryModel m = make_step_discharge(1.0, 5.0);
  const FrameSpec f = frame(0.08, 0.05, 1.3);
  double prev = -1.0;
  for (int k = 0; k <= 10; ++k) {
    const FrameDecision d{0.0, 1.0, 1.0, 0.0, 0.01 * k};
    const double rate = frame_rate(d, f, m, 0.5, true);
    EXPECT_GT(rate, prev);
    prev = rate;
  }
}
