#include "treise/core.hpp"

#include <algorithm>
#include <cmath>

namespace treise {

bool all_finite(const Matrix& m) {
    for (double v : m.data())
        if (!std::isfinite(v)) return false;
    return true;
}

double min_value(const Matrix& m) {
    return *std::min_element(m.data().begin(), m.data().end());
}

double max_value(const Matrix& m) {
    return *std::max_element(m.data().begin(), m.data().end());
}

std::pair<Matrix, bool> minmax_normalize(const Matrix& m) {
    if (m.empty()) throw InvalidInputError("minmax_normalize: empty matrix");
    if (!all_finite(m)) throw InvalidInputError("minmax_normalize: non-finite input");
    const double lo = min_value(m);
    const double hi = max_value(m);
    if (!(hi > lo)) return {Matrix(m.rows(), m.cols(), 0.0), true};
    Matrix out(m.rows(), m.cols());
    const double range = hi - lo;
    auto src = m.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = std::clamp((src[i] - lo) / range, 0.0, 1.0);
    return {std::move(out), false};
}

TimeSeriesSample::TimeSeriesSample(Matrix values, std::optional<int> label)
    : values_(std::move(values)), label_(label) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw InvalidInputError("sample: needs at least one channel and one timestep");
    if (!all_finite(values_)) throw InvalidInputError("sample: non-finite value");
    if (label_ && *label_ < 0) throw InvalidInputError("sample: negative label");
}

Dataset::Dataset(std::vector<TimeSeriesSample> samples, int num_classes, std::string name)
    : samples_(std::move(samples)), num_classes_(num_classes), name_(std::move(name)) {
    if (samples_.empty()) throw InvalidInputError("dataset: empty");
    if (num_classes_ < 1) throw InvalidInputError("dataset: num_classes must be >= 1");
    const std::size_t c = samples_.front().channels();
    const std::size_t t = samples_.front().timesteps();
    for (const auto& s : samples_) {
        if (s.channels() != c || s.timesteps() != t)
            throw InvalidInputError("dataset: samples disagree on shape");
        if (s.label() && *s.label() >= num_classes_)
            throw InvalidInputError("dataset: label out of range");
    }
    channel_means_ = per_channel_means(*this);
}

std::vector<double> per_channel_means(const Dataset& d) {
    if (d.samples().empty()) throw InvalidInputError("per_channel_means: empty dataset");
    const std::size_t c = d.channels();
    const std::size_t t = d.timesteps();
    std::vector<double> sums(c, 0.0);
    for (const auto& s : d.samples())
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t ts = 0; ts < t; ++ts) sums[ch] += s.values()(ch, ts);
    const double n = static_cast<double>(d.size() * t);
    for (double& v : sums) v /= n;
    return sums;
}

std::vector<double> per_channel_stds(const Dataset& d) {
    const auto means = d.channel_means();
    const std::size_t c = d.channels();
    const std::size_t t = d.timesteps();
    std::vector<double> sq(c, 0.0);
    for (const auto& s : d.samples())
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t ts = 0; ts < t; ++ts) {
                const double dv = s.values()(ch, ts) - means[ch];
                sq[ch] += dv * dv;
            }
    const double n = static_cast<double>(d.size() * t);
    for (double& v : sq) v = std::sqrt(v / n);
    return sq;
}

MaskSet::MaskSet(std::vector<Mask> masks, std::vector<double> densities,
                 std::vector<int> granularities, int per_combo_count, bool channel_joint,
                 std::uint64_t seed)
    : masks_(std::move(masks)),
      densities_(std::move(densities)),
      granularities_(std::move(granularities)),
      per_combo_count_(per_combo_count),
      channel_joint_(channel_joint),
      seed_(seed) {
    if (masks_.empty()) throw InvalidInputError("maskset: empty");
    const std::size_t expected =
        densities_.size() * granularities_.size() * static_cast<std::size_t>(per_combo_count_);
    if (masks_.size() != expected)
        throw InvalidInputError("maskset: |masks| != |P|*|G|*N");
    const Matrix& first = masks_.front().values;
    occurrence_ = Matrix(first.rows(), first.cols(), 0.0);
    for (const auto& m : masks_) {
        if (!m.values.same_shape(first))
            throw InvalidInputError("maskset: masks disagree on shape");
        auto src = m.values.data();
        auto dst = occurrence_.data();
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (src[i] < 0.0 || src[i] > 1.0)
                throw InvalidInputError("maskset: mask entry outside [0,1]");
            dst[i] += src[i];
        }
    }
    for (double& v : occurrence_.data())
        if (v < kOccurrenceFloor) {
            v = kOccurrenceFloor;
            ++floored_;
        }
}

AttributionMap::AttributionMap(Matrix scores, bool degenerate, std::string method,
                               int target_class)
    : scores_(std::move(scores)),
      degenerate_(degenerate),
      method_(std::move(method)),
      target_class_(target_class) {
    if (scores_.empty()) throw InvalidInputError("attribution map: empty");
    if (degenerate_) {
        for (double v : scores_.data())
            if (v != 0.0) throw InvalidInputError("attribution map: degenerate but nonzero");
    } else {
        double lo = min_value(scores_);
        double hi = max_value(scores_);
        if (lo != 0.0 || hi != 1.0)
            throw InvalidInputError("attribution map: scores must span [0,1] exactly");
    }
}

AttributionMap make_attribution_map(const Matrix& raw, std::string method, int target_class) {
    auto [scores, degenerate] = minmax_normalize(raw);
    return AttributionMap(std::move(scores), degenerate, std::move(method), target_class);
}

}  // namespace treise
