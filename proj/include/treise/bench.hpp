#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <vector>

#include "treise/classifiers.hpp"

namespace treise {

/// Transparent wrapper counting sample evaluations. Outputs pass through
/// bitwise unchanged; the counter is atomic so concurrent scoring stays
/// accurate.
class CallCountingClassifier final : public Classifier {
public:
    explicit CallCountingClassifier(const Classifier& inner) : inner_(&inner) {}

    int num_classes() const override { return inner_->num_classes(); }
    Shape input_shape() const override { return inner_->input_shape(); }
    bool has_gradients() const override { return inner_->has_gradients(); }

    std::vector<double> score(const Matrix& x) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return inner_->score(x);
    }
    std::vector<std::vector<double>> score_batch(std::span<const Matrix> xs) const override {
        count_.fetch_add(xs.size(), std::memory_order_relaxed);
        return inner_->score_batch(xs);
    }
    Matrix gradient(const Matrix& x, int k) const override { return inner_->gradient(x, k); }

    std::uint64_t forward_passes() const noexcept {
        return count_.load(std::memory_order_relaxed);
    }
    void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

private:
    const Classifier* inner_;
    mutable std::atomic<std::uint64_t> count_{0};
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares with the coefficient of determination. Constant ys
/// fit the line exactly (zero residual, zero variance), so R^2 is defined as
/// 1 in that case.
LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys);

/// Median wall-clock seconds of `repetitions` runs on a monotonic clock; one
/// extra warm-up run is discarded. Measurements run serially.
double time_median_seconds(const std::function<void()>& fn, int repetitions = 5);

/// One cell of the runtime table produced by the bench command.
struct BenchRow {
    std::size_t timesteps = 0;
    int mask_count = 0;          // N (single density/granularity combination)
    double maskgen_seconds = 0.0;
    double attribution_seconds = 0.0;
    std::uint64_t timereise_passes = 0;
    std::uint64_t occlusion_passes = 0;  // window=stride=1, equals C*T
};

/// Measures mask generation and attribution across a grid of N and T on the
/// analytic classifier; occlusion pass counts are included for contrast.
std::vector<BenchRow> run_bench(std::span<const std::size_t> timestep_grid,
                                std::span<const int> mask_count_grid, std::size_t channels,
                                std::uint64_t seed);

}  // namespace treise
