#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehtx/battery_model.hpp"
#include "ehtx/frame_model.hpp"
#include "ehtx/online.hpp"

namespace ehtx {

inline constexpr int kScenarioSchemaVersion = 1;

struct HarvestLaw {
  enum class Kind { Deterministic, UniformDiscrete, Custom };
  Kind kind = Kind::Deterministic;
  std::vector<double> values;  ///< per-frame list or support
  std::vector<double> probabilities;  ///< Custom only
};

struct GainLaw {
  enum class Kind { Deterministic, ExponentialUnitMean, Custom };
  Kind kind = Kind::Deterministic;
  std::vector<double> values;
  std::vector<double> probabilities;
  /// Support size used when the DP needs a discrete stand-in for the
  /// exponential law.
  int dp_quantization = 8;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  /// rho_W = 0.9 and noise over 1 MHz, the configuration of every reproduced figure.
  FrameSpec frame_template{1e-3, 1.0, 1.0, 1e6, 0.0, 1e7, NoiseModel::spectral_density(1e-15, true, 1e6)};
  bool enforce_bw = true;
  std::size_t N = 1;
  double B0 = 0.0;
  BatteryModel battery{};
  HarvestLaw harvest{};
  GainLaw gain{GainLaw::Kind::Deterministic, {1.0}, {}, 8};
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  double dp_grid_step = 0.0005;  ///< J
  std::size_t fit_trials = 1000;  ///< Monte Carlo samples for CTSR/CPSR fitting

  /// Throws ValidationError describing the first offending field.
  void validate() const;

  /// Discrete laws for the online policies; deterministic lists become their
  /// empirical distribution, the exponential gain its K-point quantization.
  DiscreteDistribution harvest_distribution() const;
  DiscreteDistribution gain_distribution() const;
  double mean_harvest() const;
  double mean_gain() const;
};

/// Parses a scenario document. `source` names the document in error
/// messages. Unknown keys are rejected; errors carry the key path and line.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

/// Serializes every field, so that parse_scenario(dump_scenario(s)) == s.
std::string dump_scenario(const Scenario& s);

/// Copy of `s` with the entry at a dotted key path (for example
/// battery.resistance_ohm) replaced by the YAML value `value`, re-validated.
Scenario with_override(const Scenario& s, const std::string& key_path, const std::string& value);

/// Human-readable description of the file format with every default.
std::string scenario_schema_help();

}  // namespace ehtx
