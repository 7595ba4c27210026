#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "covertsim/bounds.hpp"
#include "covertsim/config.hpp"
#include "covertsim/csv.hpp"
#include "covertsim/detectors.hpp"
#include "covertsim/experiments.hpp"
#include "covertsim/params.hpp"

using namespace covertsim;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir;
  std::string quadrature_method;
  int nodes = 0;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON run description (see README)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", opts.preset, "built-in run description")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_option("--workers", opts.workers, "worker threads (never changes output bytes)")
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--out-dir", opts.out_dir,
                  "output directory (default: $COVERTSIM_OUT_DIR or '.')");
  cmd->add_option("--quadrature", opts.quadrature_method, "mixture integration method")
      ->check(CLI::IsMember({"laguerre", "adaptive"}));
  cmd->add_option("--nodes", opts.nodes, "quadrature node count override")
      ->check(CLI::Range(2, 1000000));
}

RunConfig resolve_config(const CommonOpts& opts) {
  if (opts.config_path.empty() == opts.preset.empty())
    throw std::invalid_argument("exactly one of --config and --preset is required");
  RunConfig cfg = opts.preset.empty() ? load_config_file(opts.config_path)
                                      : parse_config_text(preset_text(opts.preset));
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.quadrature_method.empty())
    cfg.quadrature.method = opts.quadrature_method == "laguerre"
                                ? QuadratureMethod::gauss_laguerre
                                : QuadratureMethod::adaptive_subdivision;
  if (opts.nodes > 0) cfg.quadrature.node_count = opts.nodes;
  cfg.quadrature.validate();
  if (cfg.sweep) {
    cfg.sweep->master_seed = cfg.seed;
    cfg.sweep->quadrature = cfg.quadrature;
  }
  return cfg;
}

std::filesystem::path resolve_out_dir(const CommonOpts& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv("COVERTSIM_OUT_DIR"); env && *env) return env;
  return ".";
}

std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig& cfg,
                                                               const std::string& subcommand) {
  return {{"tool_version", kToolVersion},
          {"subcommand", subcommand},
          {"config_hash", cfg.config_hash},
          {"master_seed", std::to_string(cfg.seed)}};
}

void append_scenario_cells(std::vector<std::string>& row, const SystemParams& p) {
  row.push_back(to_string(p.field));
  row.push_back(std::to_string(p.n));
  row.push_back(std::to_string(p.num_blocks));
  row.push_back(std::to_string(p.block_len));
  row.push_back(format_double(p.fading_rate));
  row.push_back(format_double(p.noise_var));
  row.push_back(format_double(p.alice_power));
}

const std::vector<std::string> kScenarioColumns = {
    "field", "n", "num_blocks", "block_len", "fading_rate", "noise_var", "alice_power"};

std::vector<std::string> with_scenario_columns(std::vector<std::string> extra) {
  std::vector<std::string> cols = kScenarioColumns;
  cols.insert(cols.end(), extra.begin(), extra.end());
  return cols;
}

/// Shared tail of every runner: stamp the manifest and report the files.
void finish_run(const std::filesystem::path& out_dir, RunManifest manifest,
                std::chrono::steady_clock::time_point start) {
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(out_dir / "manifest.json", manifest);
  for (const std::string& name : manifest.outputs)
    std::printf("wrote %s\n", (out_dir / name).string().c_str());
  std::printf("wrote %s\n", (out_dir / "manifest.json").string().c_str());
}

int run_bounds(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(opts);
  if (!cfg.scenario)
    throw std::invalid_argument("bounds needs a 'scenario' config section");
  const SystemParams& p = *cfg.scenario;
  const BoundsConfig bc = cfg.bounds.value_or(BoundsConfig{});
  const std::filesystem::path out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);

  const KlReport rep =
      make_kl_report(p, bc.samples, cfg.seed, cfg.quadrature, bc.floor_direction, opts.workers);

  std::printf("scenario: field=%s n=%lld M=%lld B=%lld lambda=%.9g noise_var=%.9g "
              "alice_power=%.9g\n",
              to_string(p.field), (long long)p.n, (long long)p.num_blocks,
              (long long)p.block_len, p.fading_rate, p.noise_var, p.alice_power);
  std::printf("d(f1||f0) per block   = %.9g  (stderr %.3g, %lld samples)\n", rep.d_f1_f0.value,
              rep.d_f1_f0.std_error, (long long)rep.samples);
  std::printf("d(f0||f1) per block   = %.9g  (stderr %.3g)\n", rep.d_f0_f1.value,
              rep.d_f0_f1.std_error);
  std::printf("kl_bound_ei per block = %.9g\n", rep.bound_ei);
  std::printf("kl_bound_simple       = %.9g\n", rep.bound_simple);
  std::printf("pe_floor (%s, M=%lld) = %.9g\n", to_string(rep.floor_direction),
              (long long)rep.num_blocks, rep.pe_floor_value);

  CsvTable table;
  table.metadata = base_metadata(cfg, "bounds");
  table.columns = with_scenario_columns({"samples", "d_f1_f0", "d_f1_f0_stderr", "d_f0_f1",
                                         "d_f0_f1_stderr", "bound_ei", "bound_simple",
                                         "floor_direction", "pe_floor"});
  std::vector<std::string> row;
  append_scenario_cells(row, p);
  row.push_back(std::to_string(rep.samples));
  row.push_back(format_double(rep.d_f1_f0.value));
  row.push_back(format_double(rep.d_f1_f0.std_error));
  row.push_back(format_double(rep.d_f0_f1.value));
  row.push_back(format_double(rep.d_f0_f1.std_error));
  row.push_back(format_double(rep.bound_ei));
  row.push_back(format_double(rep.bound_simple));
  row.push_back(to_string(rep.floor_direction));
  row.push_back(format_double(rep.pe_floor_value));
  table.add_row(std::move(row));
  write_csv_file(out_dir / "bounds.csv", table);

  RunManifest manifest;
  manifest.subcommand = "bounds";
  manifest.config_hash = cfg.config_hash;
  manifest.master_seed = cfg.seed;
  manifest.workers = opts.workers;
  manifest.outputs = {"bounds.csv"};
  finish_run(out_dir, std::move(manifest), start);
  return 0;
}

int run_calibrate_or_simulate(const CommonOpts& opts, bool also_estimate) {
  const auto start = std::chrono::steady_clock::now();
  const char* name = also_estimate ? "simulate" : "calibrate";
  const RunConfig cfg = resolve_config(opts);
  if (!cfg.scenario)
    throw std::invalid_argument(std::string(name) + " needs a 'scenario' config section");
  const SystemParams& p = *cfg.scenario;
  const DetectionConfig dc = cfg.detection.value_or(DetectionConfig{});
  const std::filesystem::path out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);

  const CalibratedDetector det = calibrate(dc.detector, p, dc.target_pfa,
                                           dc.calibration_trials, cfg.seed, cfg.quadrature,
                                           opts.workers);
  const double analytic = dc.detector == DetectorKind::power
                              ? pd_threshold_analytic(p, dc.target_pfa)
                              : std::numeric_limits<double>::quiet_NaN();
  std::printf("detector=%s target_pfa=%.9g calibration_trials=%lld\n", to_string(det.kind),
              det.target_pfa, (long long)det.calibration_trials);
  std::printf("threshold = %.9g\n", det.threshold);
  if (dc.detector == DetectorKind::power)
    std::printf("threshold_analytic = %.9g\n", analytic);

  CsvTable table;
  table.metadata = base_metadata(cfg, name);
  RunManifest manifest;
  manifest.subcommand = name;
  manifest.config_hash = cfg.config_hash;
  manifest.master_seed = cfg.seed;
  manifest.workers = opts.workers;

  if (!also_estimate) {
    table.columns = with_scenario_columns(
        {"detector", "target_pfa", "calibration_trials", "threshold", "threshold_analytic"});
    std::vector<std::string> row;
    append_scenario_cells(row, p);
    row.push_back(to_string(det.kind));
    row.push_back(format_double(det.target_pfa));
    row.push_back(std::to_string(det.calibration_trials));
    row.push_back(format_double(det.threshold));
    row.push_back(format_double(analytic));
    table.add_row(std::move(row));
    write_csv_file(out_dir / "calibration.csv", table);
    manifest.outputs = {"calibration.csv"};
  } else {
    const ErrorEstimate est =
        estimate_errors(det, p, dc.trials, cfg.seed, cfg.quadrature, opts.workers);
    std::printf("p_fa = %.9g (+/- %.3g)\np_md = %.9g (+/- %.3g)\np_e  = %.9g\n", est.p_fa,
                est.half_width_fa, est.p_md, est.half_width_md, est.p_e);
    table.columns = with_scenario_columns({"detector", "target_pfa", "calibration_trials",
                                           "threshold", "trials", "p_fa", "p_md", "p_e",
                                           "half_width_fa", "half_width_md"});
    std::vector<std::string> row;
    append_scenario_cells(row, p);
    row.push_back(to_string(det.kind));
    row.push_back(format_double(det.target_pfa));
    row.push_back(std::to_string(det.calibration_trials));
    row.push_back(format_double(det.threshold));
    row.push_back(std::to_string(est.trials));
    row.push_back(format_double(est.p_fa));
    row.push_back(format_double(est.p_md));
    row.push_back(format_double(est.p_e));
    row.push_back(format_double(est.half_width_fa));
    row.push_back(format_double(est.half_width_md));
    table.add_row(std::move(row));
    write_csv_file(out_dir / "errors.csv", table);
    manifest.outputs = {"errors.csv"};
  }
  finish_run(out_dir, std::move(manifest), start);
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(opts);
  if (!cfg.sweep) throw std::invalid_argument("sweep needs a 'sweep' config section");
  const std::filesystem::path out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);

  const auto log_row = [](const SweepRow& row) {
    std::printf("cell n=%lld M=%lld rho=%.4g alice_power=%.4g p_e=%.4g status=%s\n",
                (long long)row.n, (long long)row.num_blocks, row.rho, row.alice_power, row.p_e,
                row.status.c_str());
    std::fflush(stdout);
  };
  const std::vector<SweepRow> rows =
      *cfg.sweep_kind == SweepKind::phase
          ? run_phase_sweep(*cfg.sweep, opts.workers, log_row)
          : run_block_sweep(*cfg.sweep, opts.workers, log_row);

  write_csv_file(out_dir / "sweep.csv", sweep_to_csv(rows, base_metadata(cfg, "sweep")));

  RunManifest manifest;
  manifest.subcommand = "sweep";
  manifest.config_hash = cfg.config_hash;
  manifest.master_seed = cfg.seed;
  manifest.workers = opts.workers;
  manifest.outputs = {"sweep.csv"};
  finish_run(out_dir, std::move(manifest), start);

  int failed = 0;
  for (const SweepRow& row : rows)
    if (!row.ok()) {
      ++failed;
      std::fprintf(stderr, "failed cell n=%lld M=%lld rho=%.9g: %s\n", (long long)row.n,
                   (long long)row.num_blocks, row.rho, row.status.c_str());
    }
  return failed == 0 ? 0 : 1;
}

int run_contour_cmd(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(opts);
  if (!cfg.scenario) throw std::invalid_argument("contour needs a 'scenario' config section");
  const DetectionConfig dc = cfg.detection.value_or(DetectionConfig{});
  const ContourSection cs = cfg.contour.value_or(ContourSection{});
  const std::filesystem::path out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);

  ContourConfig cc;
  cc.params = *cfg.scenario;
  cc.target_pfa = dc.target_pfa;
  cc.calibration_trials = dc.calibration_trials;
  cc.master_seed = cfg.seed;
  cc.z_max = cs.z_max;
  cc.z_step = cs.z_step;
  cc.quadrature = cfg.quadrature;
  const ContourGrid grid = run_contour(cc, opts.workers);

  std::printf("lrt_threshold (calibrated)      = %.9g\n", grid.lrt_threshold);
  std::printf("pd_threshold (analytic)         = %.9g\n", grid.pd_threshold);
  std::printf("pd_threshold (calibrated check) = %.9g\n", grid.pd_threshold_calibrated);

  write_csv_file(out_dir / "contour.csv", contour_to_csv(grid, base_metadata(cfg, "contour")));

  RunManifest manifest;
  manifest.subcommand = "contour";
  manifest.config_hash = cfg.config_hash;
  manifest.master_seed = cfg.seed;
  manifest.workers = opts.workers;
  manifest.outputs = {"contour.csv"};
  finish_run(out_dir, std::move(manifest), start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-fading covert channel simulator and bound calculator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOpts simulate_opts, calibrate_opts, sweep_opts, contour_opts, bounds_opts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "calibrate a detector, then estimate its error rates on fresh trials");
  add_common_flags(simulate, simulate_opts);
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "find the detector threshold for the target false-alarm rate");
  add_common_flags(calibrate_cmd, calibrate_opts);
  CLI::App* sweep =
      app.add_subcommand("sweep", "phase-transition sweep over rho and n (or block counts)");
  add_common_flags(sweep, sweep_opts);
  CLI::App* contour =
      app.add_subcommand("contour", "LRT-vs-power-detector decision surfaces on a z^2 grid");
  add_common_flags(contour, contour_opts);
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "closed-form and Monte Carlo divergence figures");
  add_common_flags(bounds_cmd, bounds_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_calibrate_or_simulate(simulate_opts, true);
    if (calibrate_cmd->parsed()) return run_calibrate_or_simulate(calibrate_opts, false);
    if (sweep->parsed()) return run_sweep(sweep_opts);
    if (contour->parsed()) return run_contour_cmd(contour_opts);
    if (bounds_cmd->parsed()) return run_bounds(bounds_opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
