#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ehtx/errors.hpp"
#include "ehtx/recipes.hpp"
#include "ehtx/scenario.hpp"

using namespace ehtx;

namespace {

const std::string kMinimal = "schema_version: 1\nharvest:\n  values: [0.1]\n";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "t.yaml");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

void expect_same(const Scenario& a, const Scenario& b) {
  EXPECT_EQ(dump_scenario(a), dump_scenario(b));
}

}  // namespace

TEST(Scenario, MinimalFileGetsDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.N, 1u);
  EXPECT_DOUBLE_EQ(s.frame_template.duration_tau, 1.0);
  EXPECT_DOUBLE_EQ(s.frame_template.symbols_Ns, 1e6);
  EXPECT_DOUBLE_EQ(s.frame_template.bandwidth_W, 1e7);
  EXPECT_DOUBLE_EQ(s.frame_template.noise.noise_bandwidth, 1e6);
  EXPECT_DOUBLE_EQ(s.frame_template.noise.N0, 1e-15);
  EXPECT_EQ(s.frame_template.noise.mode, NoiseModel::Mode::SpectralDensity);
  EXPECT_DOUBLE_EQ(s.battery.nominal_voltage_VB, 1.5);
  EXPECT_TRUE(std::isinf(s.battery.capacity_B));
  EXPECT_EQ(s.trials, 1u);
  EXPECT_EQ(s.gain.values, std::vector<double>{1.0});
}

TEST(Scenario, NegativeResistanceRejected) {
  const std::string msg = error_of(kMinimal + "battery:\n  resistance_ohm: -1\n");
  EXPECT_NE(msg.find("resistance"), std::string::npos) << msg;
}

TEST(Scenario, UnknownKeyReportsPathAndLine) {
  const std::string msg = error_of(kMinimal + "battery:\n  capacity_j: 0.1\n  resistence_ohm: 5\n");
  EXPECT_NE(msg.find("t.yaml:6"), std::string::npos) << msg;
  EXPECT_NE(msg.find("battery.resistence_ohm"), std::string::npos) << msg;
}

TEST(Scenario, TypeErrorsReportPathAndLine) {
  const std::string msg = error_of(kMinimal + "frames: two\n");
  EXPECT_NE(msg.find("t.yaml:4: frames"), std::string::npos) << msg;
  EXPECT_NE(error_of("schema_version: 2\nharvest: {values: [0.1]}\n").find("schema_version"), std::string::npos);
  EXPECT_NE(error_of("harvest: {values: [0.1]}\n").find("schema_version"), std::string::npos);
  EXPECT_NE(error_of("schema_version: 1\nharvest: [0.1\n").find("malformed"), std::string::npos);
}

TEST(Scenario, DeterministicListsMustMatchFrames) {
  EXPECT_NE(error_of("schema_version: 1\nframes: 3\nharvest: {values: [0.1, 0.2]}\n").find("frames = 3"),
            std::string::npos);
  EXPECT_NE(error_of("schema_version: 1\nframes: 2\nharvest: {values: [0.1, 0.2]}\n"
                     "gain: {law: deterministic, values: [1]}\n")
                .find("gain.values"),
            std::string::npos);
  EXPECT_NE(error_of(kMinimal + "trials: 0\n").find("trials"), std::string::npos);
  EXPECT_NE(error_of(kMinimal + "initial_energy_j: 1\nbattery: {capacity_j: 0.5}\n").find("initial_energy_j"),
            std::string::npos);
  EXPECT_NE(error_of("schema_version: 1\nharvest: {law: custom, values: [0.1, 0.2], probabilities: [0.5, 0.6]}\n")
                .find("sum"),
            std::string::npos);
}

TEST(Scenario, DumpRoundTrips) {
  Scenario s = fig7_scenario(5.0);
  s.battery = make_fixed_efficiency(0.2, 0.9, 0.8);
  s.gain = {GainLaw::Kind::Custom, {0.5, 2.0}, {0.25, 0.75}, 8};
  expect_same(parse_scenario(dump_scenario(s)), s);
  const Scenario f7 = fig7_scenario(20.0);
  expect_same(parse_scenario(dump_scenario(f7)), f7);
}

TEST(Scenario, Fig7FileMatchesRecipe) {
  const Scenario file = load_scenario(std::string(EHTX_SOURCE_DIR) + "/scenarios/fig7.yaml");
  expect_same(file, fig7_scenario(5.0));
  EXPECT_NEAR(rho_bandwidth_limit(file.frame_template), 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(file.frame_template.circuit_power_p, 0.05);
  EXPECT_EQ(file.N, 5u);
}

TEST(Scenario, ShippedFilesLoad) {
  for (const char* name : {"fig7.yaml", "fig6_mean100mw.yaml", "deterministic.yaml"})
    EXPECT_NO_THROW(load_scenario(std::string(EHTX_SOURCE_DIR) + "/scenarios/" + name)) << name;
  EXPECT_THROW(load_scenario("/nonexistent/x.yaml"), ValidationError);
}

TEST(Scenario, OverrideByKeyPath) {
  const Scenario s = fig7_scenario(5.0);
  EXPECT_DOUBLE_EQ(with_override(s, "battery.resistance_ohm", "20").battery.resistance_r, 20.0);
  EXPECT_EQ(with_override(s, "frames", "7").N, 7u);
  EXPECT_EQ(with_override(s, "harvest.values", "[0.02, 0.2]").harvest.values, (std::vector<double>{0.02, 0.2}));
  EXPECT_THROW(with_override(s, "battery.resistance_ohm", "-3"), ValidationError);
  EXPECT_THROW(with_override(s, "battery.colour", "red"), ValidationError);
}

TEST(Scenario, DistributionsForOnlinePolicies) {
  const Scenario s = fig7_scenario(5.0);
  EXPECT_DOUBLE_EQ(s.mean_harvest(), 0.075);
  EXPECT_DOUBLE_EQ(s.mean_gain(), 1.0);
  EXPECT_EQ(s.gain_distribution().support.size(), 8u);
  EXPECT_FALSE(scenario_schema_help().empty());
}
