#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treise/errors.hpp"

namespace treise {

/// Dense real matrix, row-major (channel-major, time-minor). Row index is the
/// channel, column index the timestep. Row-major keeps the time axis
/// contiguous, which is the hot direction for interpolation and continuity.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const Matrix& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool all_finite(const Matrix& m);
double min_value(const Matrix& m);
double max_value(const Matrix& m);

/// Rescale to [0,1] with min at 0 and max at 1 exactly. A constant input has
/// no ordering information; it maps to all-zeros with degenerate=true so
/// downstream metrics can still run.
std::pair<Matrix, bool> minmax_normalize(const Matrix& m);

/// One multivariate series: (channels x timesteps) values plus an optional
/// class label. Immutable after construction.
class TimeSeriesSample {
public:
    TimeSeriesSample(Matrix values, std::optional<int> label = std::nullopt);

    const Matrix& values() const noexcept { return values_; }
    const std::optional<int>& label() const noexcept { return label_; }
    std::size_t channels() const noexcept { return values_.rows(); }
    std::size_t timesteps() const noexcept { return values_.cols(); }

private:
    Matrix values_;
    std::optional<int> label_;
};

/// Rectangular labeled collection. Channel means are always recomputed from
/// the sample values, never trusted from a file.
class Dataset {
public:
    Dataset(std::vector<TimeSeriesSample> samples, int num_classes, std::string name);

    const std::vector<TimeSeriesSample>& samples() const noexcept { return samples_; }
    int num_classes() const noexcept { return num_classes_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<double>& channel_means() const noexcept { return channel_means_; }

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t channels() const noexcept { return samples_.front().channels(); }
    std::size_t timesteps() const noexcept { return samples_.front().timesteps(); }

private:
    std::vector<TimeSeriesSample> samples_;
    int num_classes_;
    std::string name_;
    std::vector<double> channel_means_;
};

/// Mean of all values per channel, across samples and timesteps.
std::vector<double> per_channel_means(const Dataset& d);

/// Standard deviation of all values per channel (population form). Used to
/// size perturbation magnitudes for the robustness metrics.
std::vector<double> per_channel_stds(const Dataset& d);

/// One soft occlusion mask. Entries live in [0,1]; fractional values arise
/// from upsampling the coarse grid.
struct Mask {
    Matrix values;
    double density = 0.0;
    int granularity = 0;
};

/// Occurrence denominator can underflow to ~0 for a feature no mask covers;
/// it is clamped here to keep the normalization finite without biasing
/// covered features.
inline constexpr double kOccurrenceFloor = 1e-12;

/// An ordered set of masks for one input shape together with the per-feature
/// occurrence totals used for normalization.
class MaskSet {
public:
    MaskSet(std::vector<Mask> masks, std::vector<double> densities,
            std::vector<int> granularities, int per_combo_count, bool channel_joint,
            std::uint64_t seed);

    const std::vector<Mask>& masks() const noexcept { return masks_; }
    const Matrix& occurrence() const noexcept { return occurrence_; }
    const std::vector<double>& densities() const noexcept { return densities_; }
    const std::vector<int>& granularities() const noexcept { return granularities_; }
    int per_combo_count() const noexcept { return per_combo_count_; }
    bool channel_joint() const noexcept { return channel_joint_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::size_t count() const noexcept { return masks_.size(); }
    std::size_t channels() const noexcept { return occurrence_.rows(); }
    std::size_t timesteps() const noexcept { return occurrence_.cols(); }

    /// Number of occurrence entries that hit the floor clamp. Nonzero values
    /// deserve a warning: some features were (almost) never sampled.
    std::size_t floored_occurrences() const noexcept { return floored_; }

private:
    std::vector<Mask> masks_;
    Matrix occurrence_;
    std::vector<double> densities_;
    std::vector<int> granularities_;
    int per_combo_count_;
    bool channel_joint_;
    std::uint64_t seed_;
    std::size_t floored_ = 0;
};

/// Per-feature importance scores for one prediction. Either min==0 and max==1
/// exactly, or the map is degenerate and all-zero.
class AttributionMap {
public:
    AttributionMap(Matrix scores, bool degenerate, std::string method, int target_class);

    const Matrix& scores() const noexcept { return scores_; }
    bool degenerate() const noexcept { return degenerate_; }
    const std::string& method() const noexcept { return method_; }
    int target_class() const noexcept { return target_class_; }

private:
    Matrix scores_;
    bool degenerate_;
    std::string method_;
    int target_class_;
};

/// minmax_normalize + wrap, shared by every attribution engine so all methods
/// are normalized identically.
AttributionMap make_attribution_map(const Matrix& raw, std::string method, int target_class);

}  // namespace treise
