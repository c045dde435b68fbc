#include "ehtx/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ehtx/errors.hpp"

namespace ehtx {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ':' << node.Mark().line + 1;
    os << ": " << (path.empty() ? "" : path + ": ") << msg;
    throw ValidationError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void reject_unknown(const YAML::Node& node, const std::string& path,
                      const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, join(path, key), "unknown key (allowed: " + list + ")");
      }
    }
  }

  double number(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a number");
    const std::string s = node.Scalar();
    if (s == "inf" || s == "Inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, path, "expected a number, got '" + s + "'");
    }
  }

  std::uint64_t unsigned_int(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a non-negative integer");
    const std::string s = node.Scalar();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      fail(node, path, "expected a non-negative integer, got '" + s + "'");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      fail(node, path, "integer out of range: '" + s + "'");
    }
  }

  bool boolean(const YAML::Node& node, const std::string& path) const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, path, "expected true or false");
    }
  }

  std::string text(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& path) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i)
      out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

 private:
  std::string source_;
};

void read_frame(const Reader& r, const YAML::Node& node, Scenario& s) {
  const std::string path = "frame";
  r.require_map(node, path);
  r.reject_unknown(node, path, {"duration_s", "symbols", "bandwidth_hz", "circuit_power_w",
                                "enforce_bandwidth", "noise"});
  FrameSpec& f = s.frame_template;
  if (node["duration_s"]) f.duration_tau = r.number(node["duration_s"], "frame.duration_s");
  if (node["symbols"]) f.symbols_Ns = r.number(node["symbols"], "frame.symbols");
  if (node["bandwidth_hz"]) f.bandwidth_W = r.number(node["bandwidth_hz"], "frame.bandwidth_hz");
  if (node["circuit_power_w"]) f.circuit_power_p = r.number(node["circuit_power_w"], "frame.circuit_power_w");
  if (node["enforce_bandwidth"]) s.enforce_bw = r.boolean(node["enforce_bandwidth"], "frame.enforce_bandwidth");
  if (const YAML::Node n = node["noise"]) {
    r.require_map(n, "frame.noise");
    r.reject_unknown(n, "frame.noise", {"model", "n0_w_per_hz", "half_factor", "bandwidth_hz"});
    if (n["model"]) {
      const std::string m = r.text(n["model"], "frame.noise.model");
      if (m == "spectral_density") f.noise.mode = NoiseModel::Mode::SpectralDensity;
      else if (m == "unit_psd") f.noise.mode = NoiseModel::Mode::UnitPSD;
      else r.fail(n["model"], "frame.noise.model", "expected spectral_density or unit_psd, got '" + m + "'");
    }
    if (n["n0_w_per_hz"]) f.noise.N0 = r.number(n["n0_w_per_hz"], "frame.noise.n0_w_per_hz");
    if (n["half_factor"]) f.noise.half_factor = r.boolean(n["half_factor"], "frame.noise.half_factor");
    if (n["bandwidth_hz"]) f.noise.noise_bandwidth = r.number(n["bandwidth_hz"], "frame.noise.bandwidth_hz");
  }
}

void read_battery(const Reader& r, const YAML::Node& node, Scenario& s) {
  const std::string path = "battery";
  r.require_map(node, path);
  r.reject_unknown(node, path, {"model", "capacity_j", "resistance_ohm", "voltage_v", "eta_c", "eta_d"});
  BatteryModel& b = s.battery;
  std::string model = "internal_resistance";
  if (node["model"]) model = r.text(node["model"], "battery.model");
  if (model == "internal_resistance") b.variant = InternalResistance{};
  else if (model == "step_discharge") b.variant = StepDischarge{};
  else if (model == "fixed_efficiency") b.variant = FixedEfficiency{};
  else r.fail(node["model"], "battery.model",
              "expected internal_resistance, step_discharge or fixed_efficiency, got '" + model + "'");
  if (node["capacity_j"]) b.capacity_B = r.number(node["capacity_j"], "battery.capacity_j");
  if (node["resistance_ohm"]) b.resistance_r = r.number(node["resistance_ohm"], "battery.resistance_ohm");
  if (node["voltage_v"]) b.nominal_voltage_VB = r.number(node["voltage_v"], "battery.voltage_v");
  const bool has_eta = node["eta_c"] || node["eta_d"];
  if (auto* fe = std::get_if<FixedEfficiency>(&b.variant)) {
    if (node["eta_c"]) fe->eta_c = r.number(node["eta_c"], "battery.eta_c");
    if (node["eta_d"]) fe->eta_d = r.number(node["eta_d"], "battery.eta_d");
  } else if (has_eta) {
    r.fail(node["eta_c"] ? node["eta_c"] : node["eta_d"], "battery",
           "eta_c/eta_d apply only to model fixed_efficiency");
  }
}

void read_harvest(const Reader& r, const YAML::Node& node, Scenario& s) {
  const std::string path = "harvest";
  r.require_map(node, path);
  r.reject_unknown(node, path, {"law", "values", "probabilities"});
  HarvestLaw& h = s.harvest;
  const std::string law = node["law"] ? r.text(node["law"], "harvest.law") : "deterministic";
  if (law == "deterministic") h.kind = HarvestLaw::Kind::Deterministic;
  else if (law == "uniform_discrete") h.kind = HarvestLaw::Kind::UniformDiscrete;
  else if (law == "custom") h.kind = HarvestLaw::Kind::Custom;
  else r.fail(node["law"], "harvest.law", "expected deterministic, uniform_discrete or custom, got '" + law + "'");
  if (!node["values"]) r.fail(node, path, "missing key 'values'");
  h.values = r.numbers(node["values"], "harvest.values");
  h.probabilities.clear();
  if (node["probabilities"]) {
    if (h.kind != HarvestLaw::Kind::Custom)
      r.fail(node["probabilities"], "harvest.probabilities", "probabilities apply only to law custom");
    h.probabilities = r.numbers(node["probabilities"], "harvest.probabilities");
  } else if (h.kind == HarvestLaw::Kind::Custom) {
    r.fail(node, path, "law custom needs 'probabilities'");
  }
}

void read_gain(const Reader& r, const YAML::Node& node, Scenario& s) {
  const std::string path = "gain";
  r.require_map(node, path);
  r.reject_unknown(node, path, {"law", "values", "probabilities", "dp_quantization"});
  GainLaw& g = s.gain;
  const std::string law = node["law"] ? r.text(node["law"], "gain.law") : "deterministic";
  if (law == "deterministic") g.kind = GainLaw::Kind::Deterministic;
  else if (law == "exponential") g.kind = GainLaw::Kind::ExponentialUnitMean;
  else if (law == "custom") g.kind = GainLaw::Kind::Custom;
  else r.fail(node["law"], "gain.law", "expected deterministic, exponential or custom, got '" + law + "'");
  g.values.clear();
  g.probabilities.clear();
  if (node["values"]) {
    if (g.kind == GainLaw::Kind::ExponentialUnitMean)
      r.fail(node["values"], "gain.values", "law exponential takes no values");
    g.values = r.numbers(node["values"], "gain.values");
  } else if (g.kind != GainLaw::Kind::ExponentialUnitMean) {
    r.fail(node, path, "missing key 'values'");
  }
  if (node["probabilities"]) {
    if (g.kind != GainLaw::Kind::Custom)
      r.fail(node["probabilities"], "gain.probabilities", "probabilities apply only to law custom");
    g.probabilities = r.numbers(node["probabilities"], "gain.probabilities");
  } else if (g.kind == GainLaw::Kind::Custom) {
    r.fail(node, path, "law custom needs 'probabilities'");
  }
  if (node["dp_quantization"])
    g.dp_quantization = static_cast<int>(r.unsigned_int(node["dp_quantization"], "gain.dp_quantization"));
}

void check_distribution(const std::vector<double>& values, const std::vector<double>& probs,
                        const std::string& what) {
  DiscreteDistribution d{values, probs};
  try {
    d.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

std::string number_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void Scenario::validate() const {
  if (schema_version != kScenarioSchemaVersion) {
    std::ostringstream os;
    os << "schema_version " << schema_version << " is not supported (expected " << kScenarioSchemaVersion << ")";
    throw ValidationError(os.str());
  }
  try {
    frame_template.validate();
    battery.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  if (N < 1) throw ValidationError("frames must be >= 1");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (fit_trials < 1) throw ValidationError("online.fit_trials must be >= 1");
  if (!(dp_grid_step > 0.0)) throw ValidationError("online.dp_grid_step_j must be > 0");
  if (std::isnan(B0) || B0 < 0.0 || B0 > battery.capacity_B)
    throw ValidationError("initial_energy_j must lie in [0, battery.capacity_j]");

  for (double v : harvest.values)
    if (!(v >= 0.0) || std::isinf(v)) throw ValidationError("harvest.values must be finite and >= 0");
  switch (harvest.kind) {
    case HarvestLaw::Kind::Deterministic:
      if (harvest.values.size() != N) {
        std::ostringstream os;
        os << "harvest.values has " << harvest.values.size() << " entries; deterministic law needs frames = " << N;
        throw ValidationError(os.str());
      }
      break;
    case HarvestLaw::Kind::UniformDiscrete:
      if (harvest.values.empty()) throw ValidationError("harvest.values must not be empty");
      break;
    case HarvestLaw::Kind::Custom:
      check_distribution(harvest.values, harvest.probabilities, "harvest");
      break;
  }
  for (double v : gain.values)
    if (!(v >= 0.0) || std::isinf(v)) throw ValidationError("gain.values must be finite and >= 0");
  switch (gain.kind) {
    case GainLaw::Kind::Deterministic:
      if (gain.values.size() != N) {
        std::ostringstream os;
        os << "gain.values has " << gain.values.size() << " entries; deterministic law needs frames = " << N;
        throw ValidationError(os.str());
      }
      break;
    case GainLaw::Kind::ExponentialUnitMean:
      if (gain.dp_quantization < 1) throw ValidationError("gain.dp_quantization must be >= 1");
      break;
    case GainLaw::Kind::Custom:
      check_distribution(gain.values, gain.probabilities, "gain");
      break;
  }
}

DiscreteDistribution Scenario::harvest_distribution() const {
  if (harvest.kind == HarvestLaw::Kind::Custom) return {harvest.values, harvest.probabilities};
  return DiscreteDistribution::uniform(harvest.values);
}

DiscreteDistribution Scenario::gain_distribution() const {
  switch (gain.kind) {
    case GainLaw::Kind::ExponentialUnitMean: return quantize_exponential(gain.dp_quantization, 1.0);
    case GainLaw::Kind::Custom: return {gain.values, gain.probabilities};
    case GainLaw::Kind::Deterministic: break;
  }
  return DiscreteDistribution::uniform(gain.values);
}

double Scenario::mean_harvest() const { return harvest_distribution().mean(); }

double Scenario::mean_gain() const {
  if (gain.kind == GainLaw::Kind::ExponentialUnitMean) return 1.0;
  return gain_distribution().mean();
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ": malformed document: " << e.msg;
    throw ValidationError(os.str());
  }
  const Reader r(source);
  if (!root.IsMap()) r.fail(root, "", "document must be a mapping");
  r.reject_unknown(root, "", {"schema_version", "frames", "trials", "seed", "initial_energy_j", "frame",
                              "battery", "harvest", "gain", "online"});
  Scenario s;
  if (!root["schema_version"]) r.fail(root, "", "missing key 'schema_version'");
  s.schema_version = static_cast<int>(r.unsigned_int(root["schema_version"], "schema_version"));
  if (s.schema_version != kScenarioSchemaVersion)
    r.fail(root["schema_version"], "schema_version",
           "unsupported version " + std::to_string(s.schema_version) + " (expected " +
               std::to_string(kScenarioSchemaVersion) + ")");
  if (root["frames"]) s.N = r.unsigned_int(root["frames"], "frames");
  if (root["trials"]) s.trials = r.unsigned_int(root["trials"], "trials");
  if (root["seed"]) s.seed = r.unsigned_int(root["seed"], "seed");
  if (root["initial_energy_j"]) s.B0 = r.number(root["initial_energy_j"], "initial_energy_j");
  if (root["frame"]) read_frame(r, root["frame"], s);
  if (root["battery"]) read_battery(r, root["battery"], s);
  if (root["harvest"]) read_harvest(r, root["harvest"], s);
  else r.fail(root, "", "missing key 'harvest'");
  if (root["gain"]) read_gain(r, root["gain"], s);
  else s.gain.values.assign(s.N, 1.0);
  if (const YAML::Node o = root["online"]) {
    r.require_map(o, "online");
    r.reject_unknown(o, "online", {"dp_grid_step_j", "fit_trials"});
    if (o["dp_grid_step_j"]) s.dp_grid_step = r.number(o["dp_grid_step_j"], "online.dp_grid_step_j");
    if (o["fit_trials"]) s.fit_trials = r.unsigned_int(o["fit_trials"], "online.fit_trials");
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string dump_scenario(const Scenario& s) {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + number_text(v[i]);
    return out + "]";
  };
  const FrameSpec& f = s.frame_template;
  os << "schema_version: " << s.schema_version << "\n"
     << "frames: " << s.N << "\n"
     << "trials: " << s.trials << "\n"
     << "seed: " << s.seed << "\n"
     << "initial_energy_j: " << number_text(s.B0) << "\n"
     << "frame:\n"
     << "  duration_s: " << number_text(f.duration_tau) << "\n"
     << "  symbols: " << number_text(f.symbols_Ns) << "\n"
     << "  bandwidth_hz: " << number_text(f.bandwidth_W) << "\n"
     << "  circuit_power_w: " << number_text(f.circuit_power_p) << "\n"
     << "  enforce_bandwidth: " << (s.enforce_bw ? "true" : "false") << "\n"
     << "  noise:\n"
     << "    model: " << (f.noise.mode == NoiseModel::Mode::UnitPSD ? "unit_psd" : "spectral_density") << "\n"
     << "    n0_w_per_hz: " << number_text(f.noise.N0) << "\n"
     << "    half_factor: " << (f.noise.half_factor ? "true" : "false") << "\n"
     << "    bandwidth_hz: " << number_text(f.noise.noise_bandwidth) << "\n"
     << "battery:\n"
     << "  model: " << s.battery.variant_name() << "\n"
     << "  capacity_j: " << number_text(s.battery.capacity_B) << "\n"
     << "  resistance_ohm: " << number_text(s.battery.resistance_r) << "\n"
     << "  voltage_v: " << number_text(s.battery.nominal_voltage_VB) << "\n";
  if (const auto* fe = std::get_if<FixedEfficiency>(&s.battery.variant))
    os << "  eta_c: " << number_text(fe->eta_c) << "\n  eta_d: " << number_text(fe->eta_d) << "\n";
  const char* hlaw = s.harvest.kind == HarvestLaw::Kind::Deterministic    ? "deterministic"
                     : s.harvest.kind == HarvestLaw::Kind::UniformDiscrete ? "uniform_discrete"
                                                                           : "custom";
  os << "harvest:\n  law: " << hlaw << "\n  values: " << list(s.harvest.values) << "\n";
  if (s.harvest.kind == HarvestLaw::Kind::Custom) os << "  probabilities: " << list(s.harvest.probabilities) << "\n";
  const char* glaw = s.gain.kind == GainLaw::Kind::Deterministic          ? "deterministic"
                     : s.gain.kind == GainLaw::Kind::ExponentialUnitMean ? "exponential"
                                                                         : "custom";
  os << "gain:\n  law: " << glaw << "\n";
  if (s.gain.kind != GainLaw::Kind::ExponentialUnitMean) os << "  values: " << list(s.gain.values) << "\n";
  if (s.gain.kind == GainLaw::Kind::Custom) os << "  probabilities: " << list(s.gain.probabilities) << "\n";
  os << "  dp_quantization: " << s.gain.dp_quantization << "\n"
     << "online:\n"
     << "  dp_grid_step_j: " << number_text(s.dp_grid_step) << "\n"
     << "  fit_trials: " << s.fit_trials << "\n";
  return os.str();
}

Scenario with_override(const Scenario& s, const std::string& key_path, const std::string& value) {
  YAML::Node root = YAML::Load(dump_scenario(s));
  YAML::Node cur = root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key_path.find('.', start);
    const std::string part = key_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError("malformed key path '" + key_path + "'");
    if (dot == std::string::npos) {
      try {
        cur[part] = YAML::Load(value);
      } catch (const YAML::Exception& e) {
        throw ValidationError("override " + key_path + ": cannot parse value '" + value + "'");
      }
      break;
    }
    cur.reset(cur[part]);
    start = dot + 1;
  }
  YAML::Emitter out;
  out << root;
  return parse_scenario(out.c_str(), "override " + key_path + "=" + value);
}

std::string scenario_schema_help() {
  return R"(Scenario file (YAML), schema_version 1. Defaults in parentheses.

schema_version: 1                 required
frames: N                         number of frames per trial (1)
trials: T                         Monte Carlo trials (1)
seed: S                           64-bit seed (1)
initial_energy_j: B0              battery energy before frame 1 (0)
frame:
  duration_s                      frame length tau (1)
  symbols                         symbols per frame N_s (1e6)
  bandwidth_hz                    frame bandwidth W (1e7); rho <= 1 - N_s/(W tau)
  circuit_power_w                 transmitter circuit power p (0)
  enforce_bandwidth               apply the rho <= rho_W bound (true)
  noise:
    model                         spectral_density | unit_psd (spectral_density)
    n0_w_per_hz                   noise density N0 (1e-15)
    half_factor                   rate = 0.5 log2(1 + SNR) (true)
    bandwidth_hz                  bandwidth in the N0 W term; 0 uses frame.bandwidth_hz (1e6)
battery:
  model                           internal_resistance | step_discharge | fixed_efficiency
  capacity_j                      capacity B, number or inf (inf)
  resistance_ohm                  internal resistance r (0)
  voltage_v                       nominal voltage V_B (1.5)
  eta_c, eta_d                    fixed_efficiency only (0.8660254037844386 each)
harvest:                          required
  law                             deterministic | uniform_discrete | custom
  values                          per-frame list (deterministic, length frames) or support, W
  probabilities                   custom only, sums to 1
gain:                             (deterministic, all 1)
  law                             deterministic | exponential | custom
  values                          as for harvest; not used by exponential (unit mean)
  probabilities                   custom only
  dp_quantization                 points standing in for the exponential law in the DP (8)
online:
  dp_grid_step_j                  DP battery grid step (0.0005)
  fit_trials                      samples used to fit CTSR/CPSR ratios (1000)
Unknown keys are rejected.
)";
}

}  // namespace ehtx
