#pragma once

#include <cstdint>
#include <vector>

#include "treise/core.hpp"
#include "treise/rng.hpp"

namespace treise {

/// Parameters for random mask generation.
///
/// densities: chance that a coarse cell survives (unmasked), each in (0,1].
/// granularities: coarse cells along the time axis, each in [1, T].
/// channel_joint=false draws an independent grid per channel; true draws one
/// shared time grid broadcast to all channels.
struct MaskGenSpec {
    std::vector<double> densities;
    std::vector<int> granularities;
    int per_combo_count = 32;
    bool channel_joint = false;
    std::uint64_t seed = 0;
};

/// Defaults spanning sparse-to-dense and coarse-to-fine for a given length:
/// P = {0.1..0.9 step 0.1}, G = {ceil(T/16), ceil(T/8), ceil(T/4)} clamped to
/// [1,T] and deduplicated, N = 32. At most 9*3*32 = 864 masks.
MaskGenSpec default_mask_spec(std::size_t timesteps, std::uint64_t seed);

/// One mask plus the coarse grid and crop offset it was built from. The grid
/// is exposed so statistical tests can check the raw Bernoulli cells.
struct MaskDraw {
    Mask mask;
    Matrix grid;      // (C or 1) x g binarized cells
    int crop_offset;  // in [0, cell_len)
};

/// Draw one mask: binarize a uniform grid at threshold p, linearly upsample
/// along time to (g+1)*ceil(T/g) samples, then crop a T-long window at a
/// random offset. Channels are never interpolated across. g == T skips the
/// resampling entirely so the mask stays binary.
MaskDraw generate_mask_detailed(std::size_t channels, std::size_t timesteps, double density,
                                int granularity, Rng& rng, bool channel_joint);

Mask generate_mask(std::size_t channels, std::size_t timesteps, double density,
                   int granularity, Rng& rng, bool channel_joint);

/// The full set: |P|*|G|*N masks in deterministic order (density-major, then
/// granularity, then index). Each mask draws from its own child stream of the
/// spec seed, so the result is reproducible regardless of generation order.
MaskSet generate_maskset(std::size_t channels, std::size_t timesteps, const MaskGenSpec& spec);

}  // namespace treise
