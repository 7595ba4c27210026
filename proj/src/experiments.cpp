#include "covertsim/experiments.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "covertsim/rng.hpp"

namespace covertsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string sanitize_status(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  if (text.empty()) text = "error";
  return text;
}

void validate_common(const SweepConfig& cfg) {
  if (cfg.rho_grid.empty()) throw std::invalid_argument("sweep: rho_grid is empty");
  for (std::size_t i = 0; i < cfg.rho_grid.size(); ++i) {
    const double rho = cfg.rho_grid[i];
    if (!(rho > 0.0 && rho < 1.0))
      throw std::invalid_argument("sweep: rho_grid values must lie in (0, 1)");
    if (i > 0 && !(rho > cfg.rho_grid[i - 1]))
      throw std::invalid_argument("sweep: rho_grid must be strictly ascending");
  }
  if (!(cfg.c > 0.0)) throw std::invalid_argument("sweep: c must be positive");
  if (cfg.trials < 1000) throw std::invalid_argument("sweep: trials must be >= 1000");
  if (cfg.calibration_trials < 1000)
    throw std::invalid_argument("sweep: calibration_trials must be >= 1000");
  cfg.quadrature.validate();
}

SweepRow run_cell(const SweepConfig& cfg, std::int64_t n, std::int64_t num_blocks,
                  double rho, int workers) {
  SweepRow row;
  row.n = n;
  row.num_blocks = num_blocks;
  row.block_len = n / num_blocks;
  row.rho = rho;
  row.alice_power = cfg.c * std::pow(double(n), -rho);
  row.detector = to_string(cfg.detector);
  row.trials = cfg.trials;
  row.cell_seed = derive_seed(cfg.master_seed,
                              {hash64("sweep-cell"), std::uint64_t(n),
                               std::uint64_t(num_blocks), std::bit_cast<std::uint64_t>(rho)});
  row.threshold = row.p_fa = row.p_md = row.p_e = kNan;
  row.half_width_fa = row.half_width_md = kNan;
  try {
    const SystemParams params = SystemParams::create(
        n, num_blocks, cfg.fading_rate, cfg.noise_var, row.alice_power, cfg.field);
    const CalibratedDetector det =
        calibrate(cfg.detector, params, cfg.target_pfa, cfg.calibration_trials,
                  row.cell_seed, cfg.quadrature, workers);
    const ErrorEstimate est =
        estimate_errors(det, params, cfg.trials, row.cell_seed, cfg.quadrature, workers);
    row.threshold = det.threshold;
    row.p_fa = est.p_fa;
    row.p_md = est.p_md;
    row.p_e = est.p_e;
    row.half_width_fa = est.half_width_fa;
    row.half_width_md = est.half_width_md;
    row.status = "ok";
  } catch (const std::exception& e) {
    row.status = sanitize_status(e.what());
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_phase_sweep(const SweepConfig& cfg, int workers,
                                      const RowCallback& on_row) {
  validate_common(cfg);
  if (cfg.n_values.empty()) throw std::invalid_argument("sweep: n_values is empty");
  if (cfg.block_len < 1) throw std::invalid_argument("sweep: block_len must be >= 1");
  for (std::int64_t n : cfg.n_values)
    if (n < 1 || n % cfg.block_len != 0)
      throw std::invalid_argument("sweep: every n must be a positive multiple of block_len");

  std::vector<SweepRow> rows;
  rows.reserve(cfg.n_values.size() * cfg.rho_grid.size());
  for (std::int64_t n : cfg.n_values)
    for (double rho : cfg.rho_grid) {
      rows.push_back(run_cell(cfg, n, n / cfg.block_len, rho, workers));
      if (on_row) on_row(rows.back());
    }
  return rows;
}

std::vector<SweepRow> run_block_sweep(const SweepConfig& cfg, int workers,
                                      const RowCallback& on_row) {
  validate_common(cfg);
  if (cfg.n_fixed < 1) throw std::invalid_argument("sweep: n must be >= 1");
  if (cfg.block_counts.empty()) throw std::invalid_argument("sweep: block_counts is empty");
  for (std::int64_t m : cfg.block_counts)
    if (m < 1 || cfg.n_fixed % m != 0)
      throw std::invalid_argument("sweep: every block count must divide n");

  std::vector<SweepRow> rows;
  rows.reserve(cfg.block_counts.size() * cfg.rho_grid.size());
  for (std::int64_t m : cfg.block_counts)
    for (double rho : cfg.rho_grid) {
      rows.push_back(run_cell(cfg, cfg.n_fixed, m, rho, workers));
      if (on_row) on_row(rows.back());
    }
  return rows;
}

double max_adjacent_jump(const std::vector<SweepRow>& rows) {
  double best = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!rows[i].ok() || !rows[i - 1].ok()) continue;
    best = std::max(best, rows[i].p_e - rows[i - 1].p_e);
  }
  return best;
}

CsvTable sweep_to_csv(const std::vector<SweepRow>& rows,
                      std::vector<std::pair<std::string, std::string>> metadata) {
  CsvTable table;
  table.metadata = std::move(metadata);
  table.columns = {"n",    "num_blocks", "block_len",     "rho",
                   "alice_power", "detector",   "threshold",     "p_fa",
                   "p_md", "p_e",        "half_width_fa", "half_width_md",
                   "trials", "cell_seed", "status"};
  for (const SweepRow& r : rows)
    table.add_row({std::to_string(r.n), std::to_string(r.num_blocks),
                   std::to_string(r.block_len), format_double(r.rho),
                   format_double(r.alice_power), r.detector, format_double(r.threshold),
                   format_double(r.p_fa), format_double(r.p_md), format_double(r.p_e),
                   format_double(r.half_width_fa), format_double(r.half_width_md),
                   std::to_string(r.trials), std::to_string(r.cell_seed), r.status});
  return table;
}

std::vector<SweepRow> sweep_from_csv(const CsvTable& table) {
  const std::size_t c_n = table.column_index("n");
  const std::size_t c_m = table.column_index("num_blocks");
  const std::size_t c_b = table.column_index("block_len");
  const std::size_t c_rho = table.column_index("rho");
  const std::size_t c_pow = table.column_index("alice_power");
  const std::size_t c_det = table.column_index("detector");
  const std::size_t c_thr = table.column_index("threshold");
  const std::size_t c_fa = table.column_index("p_fa");
  const std::size_t c_md = table.column_index("p_md");
  const std::size_t c_pe = table.column_index("p_e");
  const std::size_t c_hfa = table.column_index("half_width_fa");
  const std::size_t c_hmd = table.column_index("half_width_md");
  const std::size_t c_tr = table.column_index("trials");
  const std::size_t c_seed = table.column_index("cell_seed");
  const std::size_t c_status = table.column_index("status");

  std::vector<SweepRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& cells : table.rows) {
    SweepRow r;
    r.n = std::strtoll(cells[c_n].c_str(), nullptr, 10);
    r.num_blocks = std::strtoll(cells[c_m].c_str(), nullptr, 10);
    r.block_len = std::strtoll(cells[c_b].c_str(), nullptr, 10);
    r.rho = std::strtod(cells[c_rho].c_str(), nullptr);
    r.alice_power = std::strtod(cells[c_pow].c_str(), nullptr);
    r.detector = cells[c_det];
    r.threshold = std::strtod(cells[c_thr].c_str(), nullptr);
    r.p_fa = std::strtod(cells[c_fa].c_str(), nullptr);
    r.p_md = std::strtod(cells[c_md].c_str(), nullptr);
    r.p_e = std::strtod(cells[c_pe].c_str(), nullptr);
    r.half_width_fa = std::strtod(cells[c_hfa].c_str(), nullptr);
    r.half_width_md = std::strtod(cells[c_hmd].c_str(), nullptr);
    r.trials = std::strtoll(cells[c_tr].c_str(), nullptr, 10);
    r.cell_seed = std::strtoull(cells[c_seed].c_str(), nullptr, 10);
    r.status = cells[c_status];
    rows.push_back(std::move(r));
  }
  return rows;
}

ContourGrid run_contour(const ContourConfig& cfg, int workers) {
  const SystemParams& p = cfg.params;
  if (p.num_blocks != 2 || p.block_len != 1)
    throw std::invalid_argument("contour: scenario must have two single-symbol blocks");
  if (!(cfg.z_step > 0.0) || cfg.z_max < cfg.z_step)
    throw std::invalid_argument("contour: need 0 < z_step <= z_max");
  if (!(cfg.target_pfa > 0.0 && cfg.target_pfa < 1.0))
    throw std::invalid_argument("contour: target_pfa must lie in (0, 1)");
  cfg.quadrature.validate();

  ContourGrid grid;
  grid.master_seed = cfg.master_seed;
  grid.calibration_trials = cfg.calibration_trials;

  const auto count = std::size_t(std::llround(cfg.z_max / cfg.z_step));
  const BlockLlrEvaluator llr(p, cfg.quadrature);
  for (std::size_t i = 0; i <= count; ++i) {
    const double z = double(i) * cfg.z_step;
    grid.axis.push_back(z);
    grid.llr_axis.push_back(llr(z));
  }

  grid.lrt_threshold =
      calibrate(DetectorKind::lrt, p, cfg.target_pfa, cfg.calibration_trials,
                derive_seed(cfg.master_seed, {hash64("contour-lrt")}), cfg.quadrature, workers)
          .threshold;
  grid.pd_threshold = pd_threshold_analytic(p, cfg.target_pfa);
  grid.pd_threshold_calibrated =
      calibrate(DetectorKind::power, p, cfg.target_pfa, cfg.calibration_trials,
                derive_seed(cfg.master_seed, {hash64("contour-pd")}), cfg.quadrature, workers)
          .threshold;
  return grid;
}

CsvTable contour_to_csv(const ContourGrid& grid,
                        std::vector<std::pair<std::string, std::string>> metadata) {
  CsvTable table;
  table.metadata = std::move(metadata);
  table.metadata.emplace_back("lrt_threshold", format_double(grid.lrt_threshold));
  table.metadata.emplace_back("pd_threshold", format_double(grid.pd_threshold));
  table.metadata.emplace_back("pd_threshold_calibrated",
                              format_double(grid.pd_threshold_calibrated));
  table.metadata.emplace_back("calibration_trials",
                              std::to_string(grid.calibration_trials));
  table.columns = {"z1_sq", "z2_sq", "lambda_llr", "pd_accept", "lrt_accept"};
  for (std::size_t i = 0; i < grid.axis.size(); ++i)
    for (std::size_t j = 0; j < grid.axis.size(); ++j)
      table.add_row({format_double(grid.axis[i]), format_double(grid.axis[j]),
                     format_double(grid.lambda(i, j)),
                     grid.pd_accepts(i, j) ? "1" : "0",
                     grid.lrt_accepts(i, j) ? "1" : "0"});
  return table;
}

}  // namespace covertsim
