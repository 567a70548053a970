#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "treise/classifiers.hpp"
#include "treise/dataio.hpp"

namespace treise {

/// Complete description of a run. Serializable as a flat key=value file; an
/// archived config plus its seed reproduces a run bit for bit. All randomness
/// flows from the single root seed, split per stage.
struct RunConfig {
    std::uint64_t seed = 7;
    std::filesystem::path out_dir = "run";

    std::string dataset_source = "generate";  // generate | jsonl | tsv
    std::filesystem::path dataset_path;
    bool export_jsonl = false;
    AnomalyGenSpec gen;  // gen.seed is derived from the root seed

    std::string classifier = "oracle";  // oracle | linear | linear_random
    double oracle_threshold = 4.0;
    double oracle_softness = 1.0;
    double linear_init_std = 0.2;
    TrainConfig train;

    std::vector<std::string> methods = {"timereise"};
    std::string perturbation = "multiply";  // multiply | mean_replace | zero_replace

    std::vector<double> mask_densities;    // empty = defaults
    std::vector<int> mask_granularities;   // empty = defaults
    int mask_count = 32;
    bool mask_channel_joint = false;

    int occlusion_window = 1;
    int occlusion_stride = 1;
    std::string occlusion_baseline = "channel_mean";  // channel_mean | zero

    int ablation_group_size = 1;
    std::string ablation_baseline = "channel_mean";

    int lime_samples = 1000;
    double lime_density = 0.5;
    double lime_lambda = 0.01;

    int ig_steps = 50;

    int curve_steps = 50;
    int infid_perturbations = 1000;
    double infid_sigma = 0.0;  // 0 = auto: 0.3 x mean per-channel std
    int sens_perturbations = 10;
    double sens_radius = 0.0;  // 0 = auto: 0.02 x mean per-channel std
    int subset_size = 100;

    /// Stage tags for seed splitting.
    enum Stage : std::uint64_t {
        kStageGenerate = 1,
        kStageTrain = 2,
        kStageSubset = 3,
        kStageMasks = 4,
        kStageAttribution = 5,
        kStageMetrics = 6,
    };

    void set(const std::string& key, const std::string& value);
    std::string serialize() const;
    void validate() const;
};

RunConfig load_config_file(const std::filesystem::path& path);

/// Apply "key=value" strings on top of cfg; flags win over the file.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

}  // namespace treise
