#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treise/attribution.hpp"
#include "treise/classifiers.hpp"
#include "treise/core.hpp"

namespace treise {

/// Classifier output tracked while features are progressively replaced
/// (deletion) or restored (insertion), plus the trapezoidal area.
struct CausalCurve {
    std::vector<double> fractions;  // strictly increasing, 0 .. 1
    std::vector<double> values;     // probability or accuracy per fraction
    double auc = 0.0;
};

enum class CurveMode { Deletion, Insertion };
enum class RankDirection { LowerBetter, HigherBetter };

/// Feature order used by the causal curves: descending attribution, ties in
/// channel-major, time-minor order. Returned as flat indices (c*T + t).
std::vector<std::size_t> attribution_ranking(const Matrix& scores);

/// Remove the most important features first, replacing them with the
/// per-channel mean (or zero), and record the target-class probability at
/// num_steps+1 evenly spaced fractions.
CausalCurve deletion_curve(const Matrix& x, const AttributionMap& map, const Classifier& clf,
                           int target, std::span<const double> channel_means, int num_steps,
                           BaselineKind baseline = BaselineKind::ChannelMean);

/// Mirror of deletion: start from the all-baseline sample and restore the
/// most important original values first.
CausalCurve insertion_curve(const Matrix& x, const AttributionMap& map, const Classifier& clf,
                            int target, std::span<const double> channel_means, int num_steps,
                            BaselineKind baseline = BaselineKind::ChannelMean);

/// Accuracy of argmax predictions against true labels across a subset, at
/// each fraction. One map per sample, aligned by index.
CausalCurve subset_accuracy_curve(std::span<const TimeSeriesSample> subset,
                                  std::span<const AttributionMap> maps, const Classifier& clf,
                                  CurveMode mode, std::span<const double> channel_means,
                                  int num_steps,
                                  BaselineKind baseline = BaselineKind::ChannelMean);

/// Monte Carlo estimate of
///   E_I[(<I, phi> - (P_t(x) - P_t(x - I)))^2],
/// I i.i.d. Gaussian(0, noise_sigma^2) per feature. phi is an attribution
/// map's score matrix. Deterministic given the seed.
double infidelity(const Matrix& x, const Matrix& phi, const Classifier& clf, int target,
                  int n_pert, double noise_sigma, std::uint64_t seed);

/// Worst-case relative attribution change over n_pert uniform perturbations
/// bounded by radius in the max norm. The attribution is recomputed for each
/// perturbed input with its own randomness held fixed, so only the input
/// varies.
double sensitivity_max(const Matrix& x,
                       const std::function<AttributionMap(const Matrix&)>& attribution_fn,
                       double radius, int n_pert, std::uint64_t seed);

struct ContinuityResult {
    double total = 0.0;       // sum of |S[c][t] - S[c][t+1]|
    double normalized = 0.0;  // total / (C * (T-1)); 0 when T < 2
};

/// Total variation along time. Zero iff the map is constant along time in
/// every channel.
ContinuityResult continuity(const Matrix& map_scores);

/// values[dataset][method] -> average rank per method (1 = best, ties share
/// the average rank).
std::vector<double> friedman_ranks(const std::vector<std::vector<double>>& values,
                                   RankDirection direction);

/// Nemenyi critical difference: q_alpha(k) * sqrt(k(k+1) / (6n)). The q table
/// covers k = 2..10 at alpha in {0.01, 0.05, 0.10}.
double critical_difference(int k, int n, double alpha = 0.05);

/// One metric value plus the randomness and samples that produced it.
struct MetricCell {
    double value = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> sample_ids;
};

/// Per-dataset, per-method results for the five measures.
struct MetricSummary {
    std::vector<std::string> dataset_names;
    std::vector<std::string> method_names;
    // metric name -> [dataset][method]
    std::map<std::string, std::vector<std::vector<MetricCell>>> metrics;
    int subset_size = 100;
    std::string auc_basis = "probability";  // or "accuracy"

    static const std::vector<std::string>& metric_names();
    const MetricCell& cell(const std::string& metric, std::size_t dataset,
                           std::size_t method) const;
};

/// Tab-separated table of every metric, one row per (dataset, metric).
void write_summary_table(std::ostream& out, const MetricSummary& summary);

/// Deletion/insertion block: one row per dataset, del and ins columns per
/// method.
void write_del_ins_table(std::ostream& out, const MetricSummary& summary);

/// Average ranks (and the critical difference when >= 2 datasets) for each
/// metric, using the metric's preferred direction.
void write_rank_table(std::ostream& out, const MetricSummary& summary, double alpha = 0.05);

}  // namespace treise
