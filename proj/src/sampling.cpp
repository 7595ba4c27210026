#include "covertsim/sampling.hpp"

#include <cmath>
#include <cstddef>

namespace covertsim {
namespace {

// All samplers work block by block, and under H1 the gain draw precedes
// its block's components. The energy-only paths must keep this exact
// order so that a shared stream state yields bitwise-equal energies.

double sum_squares(const double* v, std::size_t len) {
  double acc = 0.0;
  for (std::size_t j = 0; j < len; ++j) acc += v[j] * v[j];
  return acc;
}

}  // namespace

std::vector<double> recompute_block_energies(const Observation& obs) {
  const std::size_t per_block = static_cast<std::size_t>(obs.per_block);
  const std::size_t num_blocks = obs.samples.size() / per_block;
  std::vector<double> energies(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i)
    energies[i] = sum_squares(obs.samples.data() + i * per_block, per_block);
  return energies;
}

Observation sample_h0(const SystemParams& params, RngStream& rng) {
  const std::size_t per_block = static_cast<std::size_t>(params.block_len * params.components());
  const std::size_t num_blocks = static_cast<std::size_t>(params.num_blocks);
  const double sd = std::sqrt(params.noise_var);
  Observation obs;
  obs.per_block = static_cast<std::int64_t>(per_block);
  obs.samples.resize(per_block * num_blocks);
  obs.block_energies.resize(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    double* block = obs.samples.data() + i * per_block;
    rng.fill_normals({block, per_block}, sd);
    obs.block_energies[i] = sum_squares(block, per_block);
  }
  return obs;
}

FadingRealization sample_fading(const SystemParams& params, RngStream& rng) {
  FadingRealization fading;
  fading.gains.resize(static_cast<std::size_t>(params.num_blocks));
  for (double& g : fading.gains) g = rng.next_exponential(params.fading_rate);
  return fading;
}

H1Draw sample_h1(const SystemParams& params, RngStream& rng) {
  const std::size_t per_block = static_cast<std::size_t>(params.block_len * params.components());
  const std::size_t num_blocks = static_cast<std::size_t>(params.num_blocks);
  H1Draw draw;
  draw.obs.per_block = static_cast<std::int64_t>(per_block);
  draw.obs.samples.resize(per_block * num_blocks);
  draw.obs.block_energies.resize(num_blocks);
  draw.fading.gains.resize(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    const double gain = rng.next_exponential(params.fading_rate);
    draw.fading.gains[i] = gain;
    const double sd = std::sqrt(params.noise_var + params.alice_power * gain);
    double* block = draw.obs.samples.data() + i * per_block;
    rng.fill_normals({block, per_block}, sd);
    draw.obs.block_energies[i] = sum_squares(block, per_block);
  }
  return draw;
}

std::vector<double> sample_h0_energies(const SystemParams& params, RngStream& rng) {
  const std::size_t per_block = static_cast<std::size_t>(params.block_len * params.components());
  const std::size_t num_blocks = static_cast<std::size_t>(params.num_blocks);
  const double sd = std::sqrt(params.noise_var);
  std::vector<double> scratch(per_block);
  std::vector<double> energies(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    rng.fill_normals({scratch.data(), per_block}, sd);
    energies[i] = sum_squares(scratch.data(), per_block);
  }
  return energies;
}

std::vector<double> sample_h1_energies(const SystemParams& params, RngStream& rng) {
  const std::size_t per_block = static_cast<std::size_t>(params.block_len * params.components());
  const std::size_t num_blocks = static_cast<std::size_t>(params.num_blocks);
  std::vector<double> scratch(per_block);
  std::vector<double> energies(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) {
    const double gain = rng.next_exponential(params.fading_rate);
    rng.fill_normals({scratch.data(), per_block},
                     std::sqrt(params.noise_var + params.alice_power * gain));
    energies[i] = sum_squares(scratch.data(), per_block);
  }
  return energies;
}

}  // namespace covertsim
