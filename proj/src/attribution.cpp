#include "treise/attribution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "treise/rng.hpp"

namespace treise {

namespace {

void check_shapes(const Matrix& x, const Classifier& clf) {
    const Shape s = clf.input_shape();
    if (x.rows() != s.channels || x.cols() != s.timesteps)
        throw InvalidInputError("attribution: sample shape does not match classifier");
}

void check_target(const Classifier& clf, int target) {
    if (target < 0 || target >= clf.num_classes())
        throw InvalidInputError("attribution: target class out of range");
}

void check_means(std::span<const double> means, std::size_t channels, const char* who) {
    if (means.size() != channels)
        throw InvalidInputError(std::string(who) + ": channel means vector has wrong length");
}

double baseline_value(BaselineKind kind, std::span<const double> means, std::size_t channel) {
    return kind == BaselineKind::ChannelMean ? means[channel] : 0.0;
}

// Window starts 0, stride, 2*stride, ...; the final window may be partial.
std::size_t window_start_count(std::size_t timesteps, std::size_t window, std::size_t stride) {
    if (timesteps <= window) return 1;
    return (timesteps - window + stride - 1) / stride + 1;
}

}  // namespace

int resolve_target(const Matrix& x, const Classifier& clf, std::optional<int> requested) {
    check_shapes(x, clf);
    if (requested) {
        check_target(clf, *requested);
        return *requested;
    }
    return predict_class(clf, x);
}

Matrix apply_perturbation(const Matrix& x, const Matrix& mask, Perturbation kind,
                          std::span<const double> channel_means) {
    if (!x.same_shape(mask)) throw InvalidInputError("perturbation: mask shape mismatch");
    Matrix out(x.rows(), x.cols());
    switch (kind) {
        case Perturbation::Multiply:
        case Perturbation::ZeroReplace:
            for (std::size_t i = 0; i < out.size(); ++i)
                out.data()[i] = x.data()[i] * mask.data()[i];
            break;
        case Perturbation::MeanReplace: {
            check_means(channel_means, x.rows(), "mean replace");
            for (std::size_t c = 0; c < x.rows(); ++c)
                for (std::size_t t = 0; t < x.cols(); ++t) {
                    const double m = mask(c, t);
                    out(c, t) = m * x(c, t) + (1.0 - m) * channel_means[c];
                }
            break;
        }
    }
    return out;
}

Matrix timereise_raw_map(std::span<const double> scores, const MaskSet& masks) {
    if (scores.size() != masks.count())
        throw InvalidInputError("timereise: one score per mask required");
    Matrix raw(masks.channels(), masks.timesteps(), 0.0);
    auto acc = raw.data();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto mv = masks.masks()[i].values.data();
        const double s = scores[i];
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += s * mv[j];
    }
    auto occ = masks.occurrence().data();
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] /= occ[j];
    return raw;
}

AttributionMap timereise_attribution(const Matrix& x, const Classifier& clf, int target,
                                     const MaskSet& masks, Perturbation perturbation,
                                     std::span<const double> channel_means) {
    check_shapes(x, clf);
    check_target(clf, target);
    if (masks.channels() != x.rows() || masks.timesteps() != x.cols())
        throw InvalidInputError("timereise: mask set shape does not match sample");

    std::vector<double> scores(masks.count());
    for (std::size_t i = 0; i < masks.count(); ++i) {
        const Matrix xp =
            apply_perturbation(x, masks.masks()[i].values, perturbation, channel_means);
        scores[i] = clf.score(xp)[static_cast<std::size_t>(target)];
    }
    // Identical scores make R/occurrence constant; dividing per feature would
    // only leave rounding dust for min-max to amplify.
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (*lo == *hi)
        return AttributionMap(Matrix(x.rows(), x.cols(), 0.0), true, "timereise", target);
    return make_attribution_map(timereise_raw_map(scores, masks), "timereise", target);
}

Matrix occlusion_raw_drops(const Matrix& x, const Classifier& clf, int target, double base_prob,
                           int window, int stride, BaselineKind baseline,
                           std::span<const double> channel_means) {
    check_shapes(x, clf);
    check_target(clf, target);
    const std::size_t timesteps = x.cols();
    if (window < 1 || static_cast<std::size_t>(window) > timesteps)
        throw InvalidSpecError("occlusion: window must lie in [1, T]");
    if (stride < 1 || stride > window)
        throw InvalidSpecError("occlusion: stride must lie in [1, window]");
    if (baseline == BaselineKind::ChannelMean) check_means(channel_means, x.rows(), "occlusion");

    Matrix drop_sum(x.rows(), x.cols(), 0.0);
    Matrix cover(x.rows(), x.cols(), 0.0);
    const std::size_t starts =
        window_start_count(timesteps, static_cast<std::size_t>(window), static_cast<std::size_t>(stride));
    Matrix xp = x;
    for (std::size_t c = 0; c < x.rows(); ++c) {
        const double fill = baseline_value(baseline, channel_means, c);
        for (std::size_t s = 0; s < starts; ++s) {
            const std::size_t begin = s * static_cast<std::size_t>(stride);
            const std::size_t end = std::min(timesteps, begin + static_cast<std::size_t>(window));
            for (std::size_t t = begin; t < end; ++t) xp(c, t) = fill;
            const double drop = base_prob - clf.score(xp)[static_cast<std::size_t>(target)];
            for (std::size_t t = begin; t < end; ++t) {
                drop_sum(c, t) += drop;
                cover(c, t) += 1.0;
                xp(c, t) = x(c, t);
            }
        }
    }
    for (std::size_t i = 0; i < drop_sum.size(); ++i) drop_sum.data()[i] /= cover.data()[i];
    return drop_sum;
}

AttributionMap occlusion_attribution(const Matrix& x, const Classifier& clf, int target,
                                     double base_prob, int window, int stride,
                                     BaselineKind baseline,
                                     std::span<const double> channel_means) {
    return make_attribution_map(
        occlusion_raw_drops(x, clf, target, base_prob, window, stride, baseline, channel_means),
        "occlusion", target);
}

Matrix feature_ablation_raw_drops(const Matrix& x, const Classifier& clf, int target,
                                  double base_prob, int group_size, BaselineKind baseline,
                                  std::span<const double> channel_means) {
    check_shapes(x, clf);
    check_target(clf, target);
    const std::size_t timesteps = x.cols();
    if (group_size < 1 || static_cast<std::size_t>(group_size) > timesteps)
        throw InvalidSpecError("feature ablation: group size must lie in [1, T]");
    if (baseline == BaselineKind::ChannelMean)
        check_means(channel_means, x.rows(), "feature ablation");

    Matrix drops(x.rows(), x.cols(), 0.0);
    Matrix xp = x;
    for (std::size_t c = 0; c < x.rows(); ++c) {
        const double fill = baseline_value(baseline, channel_means, c);
        for (std::size_t begin = 0; begin < timesteps;
             begin += static_cast<std::size_t>(group_size)) {
            const std::size_t end =
                std::min(timesteps, begin + static_cast<std::size_t>(group_size));
            for (std::size_t t = begin; t < end; ++t) xp(c, t) = fill;
            const double drop = base_prob - clf.score(xp)[static_cast<std::size_t>(target)];
            for (std::size_t t = begin; t < end; ++t) {
                drops(c, t) = drop;
                xp(c, t) = x(c, t);
            }
        }
    }
    return drops;
}

AttributionMap feature_ablation_attribution(const Matrix& x, const Classifier& clf, int target,
                                            double base_prob, int group_size,
                                            BaselineKind baseline,
                                            std::span<const double> channel_means) {
    return make_attribution_map(feature_ablation_raw_drops(x, clf, target, base_prob, group_size,
                                                           baseline, channel_means),
                                "feature_ablation", target);
}

Matrix lime_raw_coefficients(const Matrix& x, const Classifier& clf, int target, int n_samples,
                             double mask_density, double ridge_lambda, std::uint64_t seed,
                             std::span<const double> channel_means) {
    check_shapes(x, clf);
    check_target(clf, target);
    if (n_samples < 1) throw InvalidSpecError("lime: n_samples must be >= 1");
    if (!(mask_density > 0.0) || mask_density >= 1.0)
        throw InvalidSpecError("lime: mask density must lie in (0,1)");
    if (!(ridge_lambda > 0.0)) throw InvalidSpecError("lime: ridge lambda must be positive");
    check_means(channel_means, x.rows(), "lime");

    const std::size_t dim = x.size();
    const auto n = static_cast<std::size_t>(n_samples);
    Eigen::MatrixXd design(n, dim);
    Eigen::VectorXd response(n);

    const Rng root(seed);
    Matrix mask(x.rows(), x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        Rng draw = root.child(i);
        for (std::size_t j = 0; j < dim; ++j)
            mask.data()[j] = draw.uniform() < mask_density ? 1.0 : 0.0;
        const Matrix xp = apply_perturbation(x, mask, Perturbation::MeanReplace, channel_means);
        response(static_cast<Eigen::Index>(i)) =
            clf.score(xp)[static_cast<std::size_t>(target)];
        for (std::size_t j = 0; j < dim; ++j)
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mask.data()[j];
    }

    // A zero-variance response has exactly zero coefficients; skip the solve
    // rather than fitting rounding noise.
    if (response.minCoeff() == response.maxCoeff()) return Matrix(x.rows(), x.cols(), 0.0);

    // Unpenalized intercept via centering; ridge keeps the system positive
    // definite for any design.
    const Eigen::RowVectorXd col_means = design.colwise().mean();
    design.rowwise() -= col_means;
    const double y_mean = response.mean();
    response.array() -= y_mean;

    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += ridge_lambda;
    const Eigen::VectorXd coef = gram.ldlt().solve(design.transpose() * response);

    Matrix out(x.rows(), x.cols());
    for (std::size_t j = 0; j < dim; ++j) out.data()[j] = coef(static_cast<Eigen::Index>(j));
    return out;
}

AttributionMap lime_attribution(const Matrix& x, const Classifier& clf, int target,
                                int n_samples, double mask_density, double ridge_lambda,
                                std::uint64_t seed, std::span<const double> channel_means) {
    return make_attribution_map(lime_raw_coefficients(x, clf, target, n_samples, mask_density,
                                                      ridge_lambda, seed, channel_means),
                                "lime", target);
}

Matrix integrated_gradients_raw(const Matrix& x, const Classifier& clf, int target,
                                const Matrix& baseline, int steps) {
    check_shapes(x, clf);
    check_target(clf, target);
    if (!x.same_shape(baseline)) throw InvalidInputError("ig: baseline shape mismatch");
    if (steps < 1) throw InvalidSpecError("ig: steps must be >= 1");
    if (!clf.has_gradients())
        throw UnsupportedOperationError("ig: classifier does not provide gradients");

    Matrix grad_sum(x.rows(), x.cols(), 0.0);
    Matrix point(x.rows(), x.cols());
    for (int k = 1; k <= steps; ++k) {
        const double a = static_cast<double>(k) / static_cast<double>(steps);
        for (std::size_t i = 0; i < point.size(); ++i)
            point.data()[i] = baseline.data()[i] + a * (x.data()[i] - baseline.data()[i]);
        const Matrix g = clf.gradient(point, target);
        for (std::size_t i = 0; i < grad_sum.size(); ++i) grad_sum.data()[i] += g.data()[i];
    }
    Matrix ig(x.rows(), x.cols());
    const double inv = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < ig.size(); ++i)
        ig.data()[i] = (x.data()[i] - baseline.data()[i]) * grad_sum.data()[i] * inv;
    return ig;
}

AttributionMap integrated_gradients_attribution(const Matrix& x, const Classifier& clf,
                                                int target, const Matrix& baseline, int steps) {
    Matrix raw = integrated_gradients_raw(x, clf, target, baseline, steps);
    for (double& v : raw.data()) v = std::abs(v);
    return make_attribution_map(raw, "integrated_gradients", target);
}

AttributionMap uniform_attribution(std::size_t channels, std::size_t timesteps, int target) {
    return AttributionMap(Matrix(channels, timesteps, 0.0), true, "uniform", target);
}

}  // namespace treise
