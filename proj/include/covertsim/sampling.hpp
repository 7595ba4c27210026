#pragma once

#include <utility>
#include <vector>

#include "covertsim/observation.hpp"
#include "covertsim/params.hpp"
#include "covertsim/rng.hpp"

namespace covertsim {

/// Observation plus the fading draw that produced it (kept for
/// genie-aided diagnostics).
struct H1Draw {
  Observation obs;
  FadingRealization fading;
};

/// Noise-only observation: every real component iid N(0, noise_var).
Observation sample_h0(const SystemParams& params, RngStream& rng);

/// Per-block power gains, iid Exp(fading_rate).
FadingRealization sample_fading(const SystemParams& params, RngStream& rng);

/// Signal-plus-noise observation: per block, draws x_i ~ Exp(fading_rate)
/// and then fills the block with iid N(0, noise_var + alice_power * x_i)
/// components.
H1Draw sample_h1(const SystemParams& params, RngStream& rng);

/// Energy-only variants for trial loops that never look at raw samples.
/// They consume the generator in exactly the same order as the full
/// samplers (per block: gain draw, then the block's components), so for a
/// given stream state the energies are bitwise identical to
/// sample_h*(...).block_energies while touching only one block of
/// scratch.
std::vector<double> sample_h0_energies(const SystemParams& params, RngStream& rng);
std::vector<double> sample_h1_energies(const SystemParams& params, RngStream& rng);

}  // namespace covertsim
