#include "treise/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "treise/attribution.hpp"
#include "treise/masks.hpp"
#include "treise/rng.hpp"

namespace treise {

LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidInputError("fit_linear: size mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw InvalidInputError("fit_linear: needs at least 3 points");
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InvalidInputError("fit_linear: degenerate xs (all equal)");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    if (syy == 0.0) {
        fit.r_squared = 1.0;  // zero residual and zero variance
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss_res += r * r;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

double time_median_seconds(const std::function<void()>& fn, int repetitions) {
    if (repetitions < 1) throw InvalidInputError("timing: repetitions must be >= 1");
    fn();  // warm-up, discarded
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int i = 0; i < repetitions; ++i) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

std::vector<BenchRow> run_bench(std::span<const std::size_t> timestep_grid,
                                std::span<const int> mask_count_grid, std::size_t channels,
                                std::uint64_t seed) {
    std::vector<BenchRow> rows;
    const Rng root(seed);
    for (std::size_t ti = 0; ti < timestep_grid.size(); ++ti) {
        const std::size_t timesteps = timestep_grid[ti];
        const OracleAnomalyClassifier oracle(Shape{channels, timesteps});

        Rng sample_rng = root.child(ti);
        Matrix x(channels, timesteps);
        for (double& v : x.data()) v = sample_rng.gaussian();
        x(0, timesteps / 2) = 8.0;

        for (std::size_t ni = 0; ni < mask_count_grid.size(); ++ni) {
            const int n = mask_count_grid[ni];
            MaskGenSpec spec;
            spec.densities = {0.5};
            spec.granularities = {
                std::max(1, static_cast<int>((timesteps + 7) / 8))};
            spec.per_combo_count = n;
            spec.seed = seed;

            BenchRow row;
            row.timesteps = timesteps;
            row.mask_count = n;
            row.maskgen_seconds = time_median_seconds(
                [&] { (void)generate_maskset(channels, timesteps, spec); });

            const MaskSet masks = generate_maskset(channels, timesteps, spec);
            CallCountingClassifier counted(oracle);
            const int target = 1;
            row.attribution_seconds = time_median_seconds(
                [&] { (void)timereise_attribution(x, counted, target, masks); });
            counted.reset();
            (void)timereise_attribution(x, counted, target, masks);
            row.timereise_passes = counted.forward_passes();

            counted.reset();
            const double base = oracle.score(x)[1];
            (void)occlusion_attribution(x, counted, target, base, 1, 1, BaselineKind::Zero, {});
            row.occlusion_passes = counted.forward_passes();
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace treise
