#include "covertsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "covertsim/rng.hpp"
#include "json.hpp"

namespace covertsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(section, "must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) fail(section, "unknown key '" + key + "'");
  }
}

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& section, const std::string& key) {
  const json* v = find(j, key);
  if (!v) fail(section, "missing required key '" + key + "'");
  if (!v->is_number()) fail(section + "." + key, "must be a number");
  return v->get<double>();
}

double get_number_or(const json& j, const std::string& section, const std::string& key,
                     double def) {
  return find(j, key) ? get_number(j, section, key) : def;
}

std::int64_t get_int(const json& j, const std::string& section, const std::string& key) {
  const json* v = find(j, key);
  if (!v) fail(section, "missing required key '" + key + "'");
  if (!v->is_number_integer()) fail(section + "." + key, "must be an integer");
  return v->get<std::int64_t>();
}

std::int64_t get_int_or(const json& j, const std::string& section, const std::string& key,
                        std::int64_t def) {
  return find(j, key) ? get_int(j, section, key) : def;
}

std::string get_string(const json& j, const std::string& section, const std::string& key) {
  const json* v = find(j, key);
  if (!v) fail(section, "missing required key '" + key + "'");
  if (!v->is_string()) fail(section + "." + key, "must be a string");
  return v->get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& section,
                                     const std::string& key) {
  const json* v = find(j, key);
  if (!v) fail(section, "missing required key '" + key + "'");
  if (!v->is_array() || v->empty()) fail(section + "." + key, "must be a nonempty array");
  std::vector<double> out;
  for (const json& e : *v) {
    if (!e.is_number()) fail(section + "." + key, "must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::int64_t> get_int_array(const json& j, const std::string& section,
                                        const std::string& key) {
  const json* v = find(j, key);
  if (!v) fail(section, "missing required key '" + key + "'");
  if (!v->is_array() || v->empty()) fail(section + "." + key, "must be a nonempty array");
  std::vector<std::int64_t> out;
  for (const json& e : *v) {
    if (!e.is_number_integer()) fail(section + "." + key, "must contain only integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

/// "fading": {"rate": r} or {"mean": m}; returns the rate.
double parse_fading(const json& j, const std::string& section) {
  const json* v = find(j, "fading");
  if (!v) fail(section, "missing required key 'fading'");
  check_keys(*v, section + ".fading", {"rate", "mean"});
  const bool has_rate = find(*v, "rate") != nullptr;
  const bool has_mean = find(*v, "mean") != nullptr;
  if (has_rate == has_mean)
    fail(section + ".fading", "exactly one of 'rate' and 'mean' is required");
  const double value = get_number(*v, section + ".fading", has_rate ? "rate" : "mean");
  if (!(value > 0.0)) fail(section + ".fading", "value must be positive");
  return has_rate ? value : 1.0 / value;
}

Field parse_field(const json& j, const std::string& section) {
  const std::string s = get_string(j, section, "field");
  try {
    return field_from_string(s);
  } catch (const std::invalid_argument& e) {
    fail(section + ".field", e.what());
  }
}

QuadratureSpec parse_quadrature(const json& j) {
  check_keys(j, "quadrature", {"method", "nodes", "rel_tol", "abs_tol", "max_subdivisions"});
  QuadratureSpec spec;
  if (find(j, "method")) {
    const std::string m = get_string(j, "quadrature", "method");
    if (m == "laguerre")
      spec.method = QuadratureMethod::gauss_laguerre;
    else if (m == "adaptive")
      spec.method = QuadratureMethod::adaptive_subdivision;
    else
      fail("quadrature.method", "expected laguerre|adaptive, got '" + m + "'");
  }
  spec.node_count = int(get_int_or(j, "quadrature", "nodes", spec.node_count));
  spec.rel_tol = get_number_or(j, "quadrature", "rel_tol", spec.rel_tol);
  spec.abs_tol = get_number_or(j, "quadrature", "abs_tol", spec.abs_tol);
  spec.max_subdivisions =
      int(get_int_or(j, "quadrature", "max_subdivisions", spec.max_subdivisions));
  try {
    spec.validate();
  } catch (const std::exception& e) {
    fail("quadrature", e.what());
  }
  return spec;
}

SystemParams parse_scenario(const json& j) {
  check_keys(j, "scenario", {"n", "num_blocks", "fading", "noise_var", "alice_power", "field"});
  const std::int64_t n = get_int(j, "scenario", "n");
  const std::int64_t m = get_int(j, "scenario", "num_blocks");
  const double rate = parse_fading(j, "scenario");
  const double noise = get_number(j, "scenario", "noise_var");
  const double power = get_number(j, "scenario", "alice_power");
  const Field field = parse_field(j, "scenario");
  try {
    return SystemParams::create(n, m, rate, noise, power, field);
  } catch (const std::exception& e) {
    fail("scenario", e.what());
  }
}

DetectorKind parse_detector(const json& j, const std::string& section) {
  const std::string s = get_string(j, section, "detector");
  try {
    return detector_from_string(s);
  } catch (const std::invalid_argument& e) {
    fail(section + ".detector", e.what());
  }
}

DetectionConfig parse_detection(const json& j) {
  check_keys(j, "detection", {"detector", "target_pfa", "trials", "calibration_trials"});
  DetectionConfig d;
  d.detector = parse_detector(j, "detection");
  d.target_pfa = get_number(j, "detection", "target_pfa");
  if (!(d.target_pfa > 0.0 && d.target_pfa < 1.0))
    fail("detection.target_pfa", "must lie in (0, 1)");
  d.trials = get_int_or(j, "detection", "trials", d.trials);
  d.calibration_trials = get_int_or(j, "detection", "calibration_trials", d.calibration_trials);
  if (d.trials < 1) fail("detection.trials", "must be positive");
  if (d.calibration_trials < 1) fail("detection.calibration_trials", "must be positive");
  return d;
}

BoundsConfig parse_bounds(const json& j) {
  check_keys(j, "bounds", {"samples", "floor_direction"});
  BoundsConfig b;
  b.samples = get_int_or(j, "bounds", "samples", b.samples);
  if (b.samples < 10000) fail("bounds.samples", "must be >= 10000");
  if (find(j, "floor_direction")) {
    const std::string s = get_string(j, "bounds", "floor_direction");
    try {
      b.floor_direction = kl_direction_from_string(s);
    } catch (const std::invalid_argument& e) {
      fail("bounds.floor_direction", e.what());
    }
  }
  return b;
}

std::pair<SweepKind, SweepConfig> parse_sweep(const json& j) {
  check_keys(j, "sweep",
             {"kind", "rho_grid", "n_values", "block_len", "n", "block_counts", "c", "fading",
              "noise_var", "field", "detector", "target_pfa", "trials", "calibration_trials"});
  const std::string kind_str = get_string(j, "sweep", "kind");
  SweepKind kind;
  if (kind_str == "phase")
    kind = SweepKind::phase;
  else if (kind_str == "block")
    kind = SweepKind::block;
  else
    fail("sweep.kind", "expected phase|block, got '" + kind_str + "'");

  SweepConfig cfg;
  cfg.rho_grid = get_number_array(j, "sweep", "rho_grid");
  cfg.c = get_number(j, "sweep", "c");
  cfg.fading_rate = parse_fading(j, "sweep");
  cfg.noise_var = get_number(j, "sweep", "noise_var");
  if (!(cfg.noise_var > 0.0)) fail("sweep.noise_var", "must be positive");
  cfg.field = parse_field(j, "sweep");
  cfg.detector = parse_detector(j, "sweep");
  cfg.target_pfa = get_number(j, "sweep", "target_pfa");
  if (!(cfg.target_pfa > 0.0 && cfg.target_pfa < 1.0))
    fail("sweep.target_pfa", "must lie in (0, 1)");
  cfg.trials = get_int_or(j, "sweep", "trials", cfg.trials);
  cfg.calibration_trials = get_int_or(j, "sweep", "calibration_trials", cfg.calibration_trials);

  if (kind == SweepKind::phase) {
    if (find(j, "n") || find(j, "block_counts"))
      fail("sweep", "phase sweeps take 'n_values'/'block_len', not 'n'/'block_counts'");
    cfg.n_values = get_int_array(j, "sweep", "n_values");
    cfg.block_len = get_int_or(j, "sweep", "block_len", 1);
  } else {
    if (find(j, "n_values") || find(j, "block_len"))
      fail("sweep", "block sweeps take 'n'/'block_counts', not 'n_values'/'block_len'");
    cfg.n_fixed = get_int(j, "sweep", "n");
    cfg.block_counts = get_int_array(j, "sweep", "block_counts");
  }
  return {kind, cfg};
}

ContourSection parse_contour(const json& j) {
  check_keys(j, "contour", {"z_max", "z_step"});
  ContourSection c;
  c.z_max = get_number_or(j, "contour", "z_max", c.z_max);
  c.z_step = get_number_or(j, "contour", "z_step", c.z_step);
  if (!(c.z_step > 0.0) || c.z_max < c.z_step)
    fail("contour", "need 0 < z_step <= z_max");
  return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  check_keys(j, "top level",
             {"seed", "quadrature", "scenario", "detection", "bounds", "sweep", "contour"});

  RunConfig cfg;
  if (find(j, "seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer()) fail("seed", "must be a nonnegative integer");
    if (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)
      fail("seed", "must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (find(j, "quadrature")) cfg.quadrature = parse_quadrature(j["quadrature"]);
  if (find(j, "scenario")) cfg.scenario = parse_scenario(j["scenario"]);
  if (find(j, "detection")) cfg.detection = parse_detection(j["detection"]);
  if (find(j, "bounds")) cfg.bounds = parse_bounds(j["bounds"]);
  if (find(j, "sweep")) {
    auto [kind, sweep] = parse_sweep(j["sweep"]);
    cfg.sweep_kind = kind;
    sweep.master_seed = cfg.seed;
    sweep.quadrature = cfg.quadrature;
    cfg.sweep = std::move(sweep);
  }
  if (find(j, "contour")) cfg.contour = parse_contour(j["contour"]);

  cfg.canonical_json = j.dump(2);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash64(cfg.canonical_json)));
  cfg.config_hash = hex;
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

constexpr const char* kUnitPreset = R"({
  "seed": 1,
  "quadrature": {"method": "laguerre", "nodes": 64},
  "scenario": {
    "n": 1,
    "num_blocks": 1,
    "fading": {"rate": 1.0},
    "noise_var": 1.0,
    "alice_power": 1.0,
    "field": "complex"
  },
  "detection": {
    "detector": "lrt",
    "target_pfa": 0.01,
    "trials": 100000,
    "calibration_trials": 100000
  },
  "bounds": {"samples": 100000, "floor_direction": "f0_f1"}
})";

constexpr const char* kFig3Preset = R"({
  "seed": 20260819,
  "quadrature": {"method": "laguerre", "nodes": 64},
  "sweep": {
    "kind": "phase",
    "rho_grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "n_values": [100, 1000, 10000, 100000],
    "block_len": 1,
    "c": 0.03,
    "fading": {"mean": 100.0},
    "noise_var": 1.0,
    "field": "complex",
    "detector": "lrt",
    "target_pfa": 0.01,
    "trials": 10000,
    "calibration_trials": 10000
  }
})";

constexpr const char* kFig4Preset = R"({
  "seed": 20260819,
  "quadrature": {"method": "laguerre", "nodes": 64},
  "sweep": {
    "kind": "block",
    "rho_grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "n": 1000,
    "block_counts": [10, 100, 1000],
    "c": 0.03,
    "fading": {"mean": 100.0},
    "noise_var": 1.0,
    "field": "complex",
    "detector": "lrt",
    "target_pfa": 0.01,
    "trials": 10000,
    "calibration_trials": 10000
  }
})";

constexpr const char* kFig5Preset = R"({
  "seed": 20260819,
  "quadrature": {"method": "laguerre", "nodes": 64},
  "scenario": {
    "n": 2,
    "num_blocks": 2,
    "fading": {"rate": 1.0},
    "noise_var": 1.0,
    "alice_power": 1.0,
    "field": "real"
  },
  "detection": {
    "detector": "lrt",
    "target_pfa": 0.01,
    "trials": 100000,
    "calibration_trials": 100000
  },
  "contour": {"z_max": 12.0, "z_step": 0.2}
})";

}  // namespace

std::vector<std::string> preset_names() { return {"unit", "fig3", "fig4", "fig5"}; }

std::string preset_text(const std::string& name) {
  if (name == "unit") return kUnitPreset;
  if (name == "fig3") return kFig3Preset;
  if (name == "fig4") return kFig4Preset;
  if (name == "fig5") return kFig5Preset;
  throw std::invalid_argument("unknown preset '" + name +
                              "' (expected unit|fig3|fig4|fig5)");
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["subcommand"] = manifest.subcommand;
  j["config_hash"] = manifest.config_hash;
  j["master_seed"] = manifest.master_seed;
  j["workers"] = manifest.workers;
  j["tool_version"] = manifest.tool_version;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  j["outputs"] = manifest.outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("manifest: cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace covertsim
