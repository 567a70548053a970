#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "treise/classifiers.hpp"
#include "treise/core.hpp"
#include "treise/metrics.hpp"

namespace treise {

/// Parameters of the synthetic point-anomaly generator. Normal samples are
/// pure Gaussian noise; anomalous samples carry exactly one spike whose
/// magnitude (in noise-sigma units) makes the class unambiguous while keeping
/// the oracle's response smooth.
struct AnomalyGenSpec {
    int n_train = 35000;
    int n_test = 15000;
    int timesteps = 50;
    int channels = 3;
    double noise_sigma = 1.0;
    double spike_min = 6.0;  // noise-sigma units
    double spike_max = 10.0;
    double anomaly_rate = 0.5;
    std::uint64_t seed = 0;
};

/// Location of the single spike that defines an anomalous sample.
struct GroundTruthMap {
    int split = 0;  // 0 = train, 1 = test
    int sample_index = 0;
    int channel = 0;
    int timestep = 0;

    Matrix to_matrix(std::size_t channels, std::size_t timesteps) const;
    friend bool operator==(const GroundTruthMap&, const GroundTruthMap&) = default;
};

struct AnomalyData {
    Dataset train;
    Dataset test;
    std::vector<GroundTruthMap> ground_truth;
};

/// Deterministic given the seed; every sample draws from its own substream,
/// so generation order does not matter. Labels: 0 normal, 1 anomalous. The
/// spike overwrites the noise value at its position with sign*magnitude*sigma,
/// making it the sample's largest-|value| feature.
AnomalyData generate_anomaly_dataset(const AnomalyGenSpec& spec);

/// UCR-style text: one sample per line, label first, then T values, tab- or
/// comma-delimited. Labels are re-indexed densely from 0 preserving their
/// sorted original order.
Dataset parse_univariate_tsv(const std::filesystem::path& path);
void write_univariate_tsv(const std::filesystem::path& path, const Dataset& d);

/// JSON lines, one object per sample: {"label": L, "values": [C arrays of T]}.
Dataset parse_multivariate_jsonl(const std::filesystem::path& path);
void write_multivariate_jsonl(const std::filesystem::path& path, const Dataset& d);

void write_ground_truth_jsonl(const std::filesystem::path& path,
                              const std::vector<GroundTruthMap>& truth);
std::vector<GroundTruthMap> parse_ground_truth_jsonl(const std::filesystem::path& path);

/// Self-describing binary container shared by all artifacts: magic, schema
/// version, kind, JSON provenance block, kind-specific payload, checksum.
/// Loading validates the header, the checksum and every type invariant.
enum class ArtifactKind : std::uint32_t {
    Dataset = 1,
    MaskSet = 2,
    AttributionMap = 3,
    MetricSummary = 4,
    Classifier = 5,
};

/// Free-form provenance recorded in the artifact header (seeds, parameters,
/// tool version). Stored as JSON text.
using Provenance = std::string;

void save_dataset(const std::filesystem::path& path, const Dataset& d,
                  const Provenance& provenance = "{}");
Dataset load_dataset(const std::filesystem::path& path);

void save_maskset(const std::filesystem::path& path, const MaskSet& m,
                  const Provenance& provenance = "{}");
MaskSet load_maskset(const std::filesystem::path& path);

void save_attribution_map(const std::filesystem::path& path, const AttributionMap& m,
                          const Provenance& provenance = "{}");
AttributionMap load_attribution_map(const std::filesystem::path& path);

void save_metric_summary(const std::filesystem::path& path, const MetricSummary& s,
                         const Provenance& provenance = "{}");
MetricSummary load_metric_summary(const std::filesystem::path& path);

void save_linear_classifier(const std::filesystem::path& path,
                            const LinearSoftmaxClassifier& clf,
                            const Provenance& provenance = "{}");
LinearSoftmaxClassifier load_linear_classifier(const std::filesystem::path& path);

/// Provenance block of any artifact without decoding the payload.
Provenance read_artifact_provenance(const std::filesystem::path& path);
ArtifactKind read_artifact_kind(const std::filesystem::path& path);

}  // namespace treise
