#pragma once

#include <cstdint>
#include <vector>

#include "covertsim/params.hpp"

namespace covertsim {

/// Per-block power gains for one channel realization, x_i >= 0.
struct FadingRealization {
  std::vector<double> gains;
};

/// One length-n observation at the adversary, stored as real components.
/// Complex symbols are interleaved (re0, im0, re1, im1, ...), so
/// samples.size() == n * components. Block i occupies the contiguous
/// range [i * per_block, (i+1) * per_block) with per_block =
/// block_len * components. block_energies holds S_i = sum of squared
/// components of block i, filled in by the samplers.
struct Observation {
  std::vector<double> samples;
  std::vector<double> block_energies;
  std::int64_t per_block = 0;
};

/// Recomputes S_i from the raw samples (same summation order as the
/// samplers, so the result matches obs.block_energies bit for bit).
std::vector<double> recompute_block_energies(const Observation& obs);

}  // namespace covertsim
