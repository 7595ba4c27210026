#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "covertsim/bounds.hpp"
#include "covertsim/detectors.hpp"
#include "covertsim/experiments.hpp"
#include "covertsim/params.hpp"
#include "covertsim/quadrature.hpp"

namespace covertsim {

inline constexpr const char* kToolVersion = "1.0.0";

/// Detector calibration and evaluation settings (the "detection" config
/// section).
struct DetectionConfig {
  DetectorKind detector = DetectorKind::lrt;
  double target_pfa = 0.01;
  std::int64_t trials = 10000;
  std::int64_t calibration_trials = 10000;
};

/// Divergence-report settings (the "bounds" section).
struct BoundsConfig {
  std::int64_t samples = 100000;
  KlDirection floor_direction = KlDirection::f0_f1;
};

enum class SweepKind { phase, block };

/// Grid settings for the contour study (the "contour" section); the
/// scenario itself comes from the "scenario" section.
struct ContourSection {
  double z_max = 12.0;
  double z_step = 0.2;
};

/// A fully parsed and validated run description. Sections are optional;
/// each subcommand demands the ones it needs. The embedded sweep config
/// already carries the top-level seed and quadrature settings (re-stamped
/// by the CLI after flag overrides).
struct RunConfig {
  std::uint64_t seed = 1;
  QuadratureSpec quadrature;
  std::optional<SystemParams> scenario;
  std::optional<DetectionConfig> detection;
  std::optional<BoundsConfig> bounds;
  std::optional<SweepKind> sweep_kind;
  std::optional<SweepConfig> sweep;
  std::optional<ContourSection> contour;

  /// Sorted-key dump of the parsed document and its 64-bit FNV hash (hex).
  /// Key order and whitespace in the source file do not affect the hash.
  std::string canonical_json;
  std::string config_hash;
};

/// Parses and validates a JSON run description. Errors name the offending
/// section and key.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Built-in run descriptions ("unit", "fig3", "fig4", "fig5") as JSON
/// text; they parse through the same path as user config files.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string tool_version = kToolVersion;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace covertsim
