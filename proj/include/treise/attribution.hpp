#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "treise/classifiers.hpp"
#include "treise/core.hpp"

namespace treise {

/// How a mask is applied to the input. Multiply (the default) scales values
/// by the mask; MeanReplace blends towards the per-channel mean; ZeroReplace
/// keeps only the surviving values.
enum class Perturbation { Multiply, MeanReplace, ZeroReplace };

enum class BaselineKind { ChannelMean, Zero };

/// Target class for an attribution, resolved once on the unperturbed sample:
/// either the requested class or the prediction (ties -> lowest index).
int resolve_target(const Matrix& x, const Classifier& clf, std::optional<int> requested);

Matrix apply_perturbation(const Matrix& x, const Matrix& mask, Perturbation kind,
                          std::span<const double> channel_means);

/// Occurrence-normalized reduction of per-mask scores, accumulated in
/// canonical mask-index order so the result is identical no matter how the
/// scores were computed or scheduled.
Matrix timereise_raw_map(std::span<const double> scores, const MaskSet& masks);

/// Randomized-mask attribution: score the perturbed input under every mask,
/// weight each mask by the target-class probability, normalize per feature by
/// occurrence, then min-max. Costs exactly |masks| forward passes regardless
/// of the input shape.
AttributionMap timereise_attribution(const Matrix& x, const Classifier& clf, int target,
                                     const MaskSet& masks,
                                     Perturbation perturbation = Perturbation::Multiply,
                                     std::span<const double> channel_means = {});

/// Sliding-window occlusion. base_prob is the unperturbed target probability
/// (computed by the caller, typically during target resolution) so the engine
/// spends exactly C * ceil((T-window)/stride + 1) forward passes. Overlapping
/// windows average their drops so stride choices do not rescale scores.
Matrix occlusion_raw_drops(const Matrix& x, const Classifier& clf, int target, double base_prob,
                           int window, int stride, BaselineKind baseline,
                           std::span<const double> channel_means);

AttributionMap occlusion_attribution(const Matrix& x, const Classifier& clf, int target,
                                     double base_prob, int window, int stride,
                                     BaselineKind baseline,
                                     std::span<const double> channel_means);

/// Non-overlapping groups along time, each feature ablated exactly once.
Matrix feature_ablation_raw_drops(const Matrix& x, const Classifier& clf, int target,
                                  double base_prob, int group_size, BaselineKind baseline,
                                  std::span<const double> channel_means);

AttributionMap feature_ablation_attribution(const Matrix& x, const Classifier& clf, int target,
                                            double base_prob, int group_size,
                                            BaselineKind baseline,
                                            std::span<const double> channel_means);

/// Local ridge surrogate: draw Bernoulli(mask_density) keep-masks, perturb
/// with mean-replacement, regress target probabilities on the binary mask
/// indicators (intercept unpenalized). Returns the coefficient matrix.
Matrix lime_raw_coefficients(const Matrix& x, const Classifier& clf, int target, int n_samples,
                             double mask_density, double ridge_lambda, std::uint64_t seed,
                             std::span<const double> channel_means);

AttributionMap lime_attribution(const Matrix& x, const Classifier& clf, int target,
                                int n_samples, double mask_density, double ridge_lambda,
                                std::uint64_t seed, std::span<const double> channel_means);

/// Signed integrated gradients with a right-endpoint Riemann sum:
///   IG = (x - baseline) .* (1/steps) * sum_k grad P_target at
///        baseline + (k/steps)(x - baseline),  k = 1..steps.
Matrix integrated_gradients_raw(const Matrix& x, const Classifier& clf, int target,
                                const Matrix& baseline, int steps);

/// Magnitude of the signed IG, min-max normalized. Magnitude ranking is what
/// the downstream metrics consume.
AttributionMap integrated_gradients_attribution(const Matrix& x, const Classifier& clf,
                                                int target, const Matrix& baseline, int steps);

/// All-equal importance control; by the map invariant this is the degenerate
/// all-zeros map, and ranking falls back to channel-major, time-minor order.
AttributionMap uniform_attribution(std::size_t channels, std::size_t timesteps, int target);

}  // namespace treise
