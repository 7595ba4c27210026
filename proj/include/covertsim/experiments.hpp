#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "covertsim/csv.hpp"
#include "covertsim/detectors.hpp"
#include "covertsim/params.hpp"
#include "covertsim/quadrature.hpp"

namespace covertsim {

/// Grid description for the phase-transition sweeps. Each cell sets
/// alice_power = c * n^{-rho}, calibrates the detector on noise-only
/// trials, then estimates error rates on fresh trials. Cell streams are
/// derived from (master_seed, n, num_blocks, rho), so results do not
/// depend on scheduling or worker count.
struct SweepConfig {
  double fading_rate = 1.0;
  double noise_var = 1.0;
  Field field = Field::complex;
  DetectorKind detector = DetectorKind::lrt;
  double target_pfa = 0.01;
  std::vector<double> rho_grid;

  // Phase sweep: several n at a fixed block length.
  std::vector<std::int64_t> n_values;
  std::int64_t block_len = 1;

  // Block sweep: fixed n, several block counts (block_len = n / M).
  std::int64_t n_fixed = 0;
  std::vector<std::int64_t> block_counts;

  double c = 1.0;
  std::int64_t trials = 10000;
  std::int64_t calibration_trials = 10000;
  std::uint64_t master_seed = 1;
  QuadratureSpec quadrature;
};

/// One sweep cell. On failure the numeric results are NaN and status
/// carries the sanitized error text; "ok" otherwise.
struct SweepRow {
  std::int64_t n = 0;
  std::int64_t num_blocks = 0;
  std::int64_t block_len = 0;
  double rho = 0.0;
  double alice_power = 0.0;
  std::string detector;
  double threshold = 0.0;
  double p_fa = 0.0;
  double p_md = 0.0;
  double p_e = 0.0;
  double half_width_fa = 0.0;
  double half_width_md = 0.0;
  std::int64_t trials = 0;
  std::uint64_t cell_seed = 0;
  std::string status;

  bool ok() const { return status == "ok"; }
};

using RowCallback = std::function<void(const SweepRow&)>;

/// Phase transition vs rho for each n in n_values. Cells run in a fixed
/// order; worker parallelism lives inside the per-cell trial loops.
/// Failed cells are marked and the sweep continues.
std::vector<SweepRow> run_phase_sweep(const SweepConfig& cfg, int workers = 1,
                                      const RowCallback& on_row = {});

/// Phase transition vs rho for each block count at fixed n_fixed.
std::vector<SweepRow> run_block_sweep(const SweepConfig& cfg, int workers = 1,
                                      const RowCallback& on_row = {});

/// Largest adjacent-rho increase of p_e among the rows of one curve
/// (rows must share the ascending rho order the sweeps emit).
double max_adjacent_jump(const std::vector<SweepRow>& rows);

CsvTable sweep_to_csv(const std::vector<SweepRow>& rows,
                      std::vector<std::pair<std::string, std::string>> metadata);
std::vector<SweepRow> sweep_from_csv(const CsvTable& table);

/// Grid study of the two-block test statistics: the LRT surface
/// Lambda(z1_sq, z2_sq) = block_llr(z1_sq) + block_llr(z2_sq) against the
/// power detector's plane z1_sq + z2_sq. Requires a two-block,
/// single-symbol scenario.
struct ContourConfig {
  SystemParams params = SystemParams::create(2, 2, 1.0, 1.0, 1.0, Field::real);
  double target_pfa = 0.01;
  std::int64_t calibration_trials = 100000;
  std::uint64_t master_seed = 1;
  double z_max = 12.0;
  double z_step = 0.2;
  QuadratureSpec quadrature;
};

struct ContourGrid {
  std::vector<double> axis;      // z^2 grid, shared by both coordinates
  std::vector<double> llr_axis;  // block LLR at each axis value
  double lrt_threshold = 0.0;    // calibrated LRT threshold tau'
  double pd_threshold = 0.0;     // analytic power threshold tau
  double pd_threshold_calibrated = 0.0;  // Monte Carlo cross-check of tau
  std::int64_t calibration_trials = 0;
  std::uint64_t master_seed = 0;

  double lambda(std::size_t i, std::size_t j) const { return llr_axis[i] + llr_axis[j]; }
  bool lrt_accepts(std::size_t i, std::size_t j) const {
    return lambda(i, j) > lrt_threshold;
  }
  bool pd_accepts(std::size_t i, std::size_t j) const {
    return axis[i] + axis[j] > pd_threshold;
  }
};

ContourGrid run_contour(const ContourConfig& cfg, int workers = 1);

/// Long-format rows (z1_sq, z2_sq, lambda_llr, pd_accept, lrt_accept),
/// row-major over the grid; thresholds go into the metadata.
CsvTable contour_to_csv(const ContourGrid& grid,
                        std::vector<std::pair<std::string, std::string>> metadata);

}  // namespace covertsim
