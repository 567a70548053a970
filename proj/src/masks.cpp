#include "treise/masks.hpp"

#include <algorithm>
#include <cmath>

namespace treise {

namespace {

void validate(std::size_t channels, std::size_t timesteps, double density, int granularity) {
    if (channels < 1 || timesteps < 1)
        throw InvalidSpecError("mask: shape must have C >= 1 and T >= 1");
    if (!(density > 0.0) || density > 1.0)
        throw InvalidSpecError("mask: density must lie in (0,1]");
    if (granularity < 1 || static_cast<std::size_t>(granularity) > timesteps)
        throw InvalidSpecError("mask: granularity must lie in [1, T]");
}

// Linear resample of `row` (g cells) to `out_len` samples with edge clamping.
// Output sample u sits at source coordinate (u+0.5)*g/out_len - 0.5.
void upsample_row(const double* row, int g, double* out, int out_len) {
    const double scale = static_cast<double>(g) / static_cast<double>(out_len);
    for (int u = 0; u < out_len; ++u) {
        const double src = (static_cast<double>(u) + 0.5) * scale - 0.5;
        const double fl = std::floor(src);
        const double frac = src - fl;
        const long i0 = static_cast<long>(fl);
        const long a = std::clamp(i0, 0L, static_cast<long>(g - 1));
        const long b = std::clamp(i0 + 1, 0L, static_cast<long>(g - 1));
        out[u] = (1.0 - frac) * row[a] + frac * row[b];
    }
}

}  // namespace

MaskGenSpec default_mask_spec(std::size_t timesteps, std::uint64_t seed) {
    MaskGenSpec spec;
    for (int i = 1; i <= 9; ++i) spec.densities.push_back(0.1 * i);
    const auto t = static_cast<long>(timesteps);
    std::vector<long> gs = {(t + 15) / 16, (t + 7) / 8, (t + 3) / 4};
    for (long g : gs) {
        g = std::clamp(g, 1L, t);
        if (std::find(spec.granularities.begin(), spec.granularities.end(),
                      static_cast<int>(g)) == spec.granularities.end())
            spec.granularities.push_back(static_cast<int>(g));
    }
    spec.per_combo_count = 32;
    spec.channel_joint = false;
    spec.seed = seed;
    return spec;
}

MaskDraw generate_mask_detailed(std::size_t channels, std::size_t timesteps, double density,
                                int granularity, Rng& rng, bool channel_joint) {
    validate(channels, timesteps, density, granularity);
    const std::size_t grid_rows = channel_joint ? 1 : channels;
    const auto g = static_cast<std::size_t>(granularity);

    Matrix grid(grid_rows, g);
    for (std::size_t r = 0; r < grid_rows; ++r)
        for (std::size_t c = 0; c < g; ++c)
            grid(r, c) = rng.uniform() < density ? 1.0 : 0.0;

    Matrix values(channels, timesteps);
    int offset = 0;
    if (g == timesteps) {
        // Full-resolution grid: no resampling, entries stay binary.
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const std::size_t r = channel_joint ? 0 : ch;
            for (std::size_t t = 0; t < timesteps; ++t) values(ch, t) = grid(r, t);
        }
    } else {
        const std::size_t cell_len = (timesteps + g - 1) / g;
        const std::size_t up_len = (g + 1) * cell_len;
        offset = static_cast<int>(rng.uniform_below(cell_len));
        std::vector<double> up(up_len);
        for (std::size_t r = 0; r < grid_rows; ++r) {
            upsample_row(&grid.data()[r * g], static_cast<int>(g), up.data(),
                         static_cast<int>(up_len));
            if (channel_joint) {
                for (std::size_t ch = 0; ch < channels; ++ch)
                    for (std::size_t t = 0; t < timesteps; ++t)
                        values(ch, t) = up[offset + t];
            } else {
                for (std::size_t t = 0; t < timesteps; ++t) values(r, t) = up[offset + t];
            }
        }
    }
    return MaskDraw{Mask{std::move(values), density, granularity}, std::move(grid), offset};
}

Mask generate_mask(std::size_t channels, std::size_t timesteps, double density,
                   int granularity, Rng& rng, bool channel_joint) {
    return generate_mask_detailed(channels, timesteps, density, granularity, rng, channel_joint)
        .mask;
}

MaskSet generate_maskset(std::size_t channels, std::size_t timesteps, const MaskGenSpec& spec) {
    if (spec.densities.empty() || spec.granularities.empty())
        throw InvalidSpecError("maskset: densities and granularities must be non-empty");
    if (spec.per_combo_count < 1)
        throw InvalidSpecError("maskset: per-combination count must be >= 1");
    for (double p : spec.densities) validate(channels, timesteps, p, spec.granularities.front());
    for (int g : spec.granularities) validate(channels, timesteps, spec.densities.front(), g);

    std::vector<double> densities = spec.densities;
    std::vector<int> granularities = spec.granularities;
    std::sort(densities.begin(), densities.end());
    densities.erase(std::unique(densities.begin(), densities.end()), densities.end());
    std::sort(granularities.begin(), granularities.end());
    granularities.erase(std::unique(granularities.begin(), granularities.end()),
                        granularities.end());

    const Rng root(spec.seed);
    std::vector<Mask> masks;
    masks.reserve(densities.size() * granularities.size() *
                  static_cast<std::size_t>(spec.per_combo_count));
    for (std::size_t pi = 0; pi < densities.size(); ++pi) {
        const Rng p_stream = root.child(pi);
        for (std::size_t gi = 0; gi < granularities.size(); ++gi) {
            const Rng g_stream = p_stream.child(gi);
            for (int i = 0; i < spec.per_combo_count; ++i) {
                Rng mask_rng = g_stream.child(static_cast<std::uint64_t>(i));
                masks.push_back(generate_mask(channels, timesteps, densities[pi],
                                              granularities[gi], mask_rng, spec.channel_joint));
            }
        }
    }
    return MaskSet(std::move(masks), std::move(densities), std::move(granularities),
                   spec.per_combo_count, spec.channel_joint, spec.seed);
}

}  // namespace treise
