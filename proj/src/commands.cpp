#include "treise/commands.hpp"

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <numeric>
#include <sstream>

#include "treise/attribution.hpp"
#include "treise/bench.hpp"
#include "treise/masks.hpp"
#include "treise/metrics.hpp"
#include "treise/rng.hpp"
#include "treise/version.hpp"

namespace treise {

namespace {

using nlohmann::json;

std::uint64_t stage_seed(const RunConfig& cfg, RunConfig::Stage stage) {
    return Rng(cfg.seed).child(stage).seed();
}

void ensure_run_dir(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream snap(cfg.out_dir / "config.snapshot", std::ios::trunc);
    if (!snap) throw IoError("cannot write config snapshot");
    snap << cfg.serialize();
}

void log_line(const RunConfig& cfg, const std::string& msg) {
    std::cout << msg << '\n';
    std::ofstream log(cfg.out_dir / "run.log", std::ios::app);
    if (log) log << msg << '\n';
}

AnomalyGenSpec gen_spec(const RunConfig& cfg) {
    AnomalyGenSpec spec = cfg.gen;
    spec.seed = stage_seed(cfg, RunConfig::kStageGenerate);
    return spec;
}

Dataset load_test_dataset(const RunConfig& cfg) {
    const auto path = cfg.out_dir / "test.ds";
    if (std::filesystem::exists(path)) return load_dataset(path);
    if (cfg.dataset_source == "generate") return generate_anomaly_dataset(gen_spec(cfg)).test;
    if (cfg.dataset_source == "jsonl") return parse_multivariate_jsonl(cfg.dataset_path);
    return parse_univariate_tsv(cfg.dataset_path);
}

Dataset load_train_dataset(const RunConfig& cfg) {
    const auto path = cfg.out_dir / "train.ds";
    if (std::filesystem::exists(path)) return load_dataset(path);
    if (cfg.dataset_source == "generate") return generate_anomaly_dataset(gen_spec(cfg)).train;
    if (cfg.dataset_source == "jsonl") return parse_multivariate_jsonl(cfg.dataset_path);
    return parse_univariate_tsv(cfg.dataset_path);
}

std::unique_ptr<Classifier> build_classifier(const RunConfig& cfg, const Dataset& data) {
    const Shape shape{data.channels(), data.timesteps()};
    if (cfg.classifier == "oracle")
        return std::make_unique<OracleAnomalyClassifier>(shape, cfg.oracle_threshold,
                                                         cfg.oracle_softness,
                                                         cfg.gen.noise_sigma);
    if (cfg.classifier == "linear_random")
        return std::make_unique<LinearSoftmaxClassifier>(LinearSoftmaxClassifier::random_init(
            data.num_classes(), shape, cfg.linear_init_std,
            stage_seed(cfg, RunConfig::kStageTrain)));
    const auto path = cfg.out_dir / "classifier.clf";
    if (!std::filesystem::exists(path))
        throw InvalidInputError("missing trained classifier " + path.string() +
                                "; run the train command first");
    return std::make_unique<LinearSoftmaxClassifier>(load_linear_classifier(path));
}

MaskGenSpec mask_spec_for(const RunConfig& cfg, std::size_t timesteps) {
    MaskGenSpec spec = default_mask_spec(timesteps, stage_seed(cfg, RunConfig::kStageMasks));
    if (!cfg.mask_densities.empty()) spec.densities = cfg.mask_densities;
    if (!cfg.mask_granularities.empty()) spec.granularities = cfg.mask_granularities;
    spec.per_combo_count = cfg.mask_count;
    spec.channel_joint = cfg.mask_channel_joint;
    return spec;
}

MaskSet obtain_maskset(const RunConfig& cfg, const Dataset& data) {
    MaskGenSpec spec = mask_spec_for(cfg, data.timesteps());
    std::sort(spec.densities.begin(), spec.densities.end());
    std::sort(spec.granularities.begin(), spec.granularities.end());
    const auto path = cfg.out_dir / "masks.msk";
    if (std::filesystem::exists(path)) {
        // Cache key: shape, P, G, N, channel_joint, seed.
        MaskSet cached = load_maskset(path);
        if (cached.seed() == spec.seed && cached.channels() == data.channels() &&
            cached.timesteps() == data.timesteps() &&
            cached.channel_joint() == spec.channel_joint &&
            cached.per_combo_count() == spec.per_combo_count &&
            cached.densities() == spec.densities &&
            cached.granularities() == spec.granularities)
            return cached;
    }
    MaskSet masks = generate_maskset(data.channels(), data.timesteps(), spec);
    json prov = {{"seed", spec.seed},
                 {"densities", masks.densities()},
                 {"granularities", masks.granularities()},
                 {"per_combo_count", spec.per_combo_count},
                 {"channel_joint", spec.channel_joint},
                 {"channels", data.channels()},
                 {"timesteps", data.timesteps()}};
    save_maskset(path, masks, prov.dump());
    return masks;
}

std::vector<int> draw_subset(const RunConfig& cfg, std::size_t test_size) {
    std::vector<int> ids(test_size);
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(stage_seed(cfg, RunConfig::kStageSubset));
    const std::size_t take = std::min<std::size_t>(cfg.subset_size, test_size);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_below(test_size - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(take);
    return ids;
}

Perturbation perturbation_from(const std::string& name) {
    if (name == "multiply") return Perturbation::Multiply;
    if (name == "mean_replace") return Perturbation::MeanReplace;
    return Perturbation::ZeroReplace;
}

BaselineKind baseline_from(const std::string& name) {
    return name == "zero" ? BaselineKind::Zero : BaselineKind::ChannelMean;
}

std::uint64_t attribution_seed(const RunConfig& cfg, std::size_t method_index, int sample_id) {
    return Rng(cfg.seed)
        .child(RunConfig::kStageAttribution)
        .child(method_index)
        .child(static_cast<std::uint64_t>(sample_id))
        .seed();
}

AttributionMap run_method(const std::string& method, const RunConfig& cfg, const Matrix& x,
                          const Classifier& clf, int target, const MaskSet* masks,
                          std::span<const double> means, std::uint64_t seed) {
    if (method == "timereise") {
        if (!masks) throw InvalidInputError("timereise requires a mask set");
        return timereise_attribution(x, clf, target, *masks,
                                     perturbation_from(cfg.perturbation), means);
    }
    if (method == "occlusion") {
        const double base = clf.score(x)[static_cast<std::size_t>(target)];
        return occlusion_attribution(x, clf, target, base, cfg.occlusion_window,
                                     cfg.occlusion_stride,
                                     baseline_from(cfg.occlusion_baseline), means);
    }
    if (method == "feature_ablation") {
        const double base = clf.score(x)[static_cast<std::size_t>(target)];
        return feature_ablation_attribution(x, clf, target, base, cfg.ablation_group_size,
                                            baseline_from(cfg.ablation_baseline), means);
    }
    if (method == "lime")
        return lime_attribution(x, clf, target, cfg.lime_samples, cfg.lime_density,
                                cfg.lime_lambda, seed, means);
    if (method == "integrated_gradients") {
        Matrix baseline(x.rows(), x.cols());
        for (std::size_t c = 0; c < x.rows(); ++c)
            for (std::size_t t = 0; t < x.cols(); ++t) baseline(c, t) = means[c];
        return integrated_gradients_attribution(x, clf, target, baseline, cfg.ig_steps);
    }
    if (method == "uniform") return uniform_attribution(x.rows(), x.cols(), target);
    throw ConfigError("unknown method '" + method + "'");
}

std::filesystem::path map_path(const RunConfig& cfg, const std::string& method, int sample_id) {
    std::ostringstream name;
    name << "map_" << sample_id << ".attr";
    return cfg.out_dir / "maps" / method / name.str();
}

void write_curve(const std::filesystem::path& path, const CausalCurve& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    for (std::size_t i = 0; i < curve.fractions.size(); ++i)
        out << curve.fractions[i] << '\t' << curve.values[i] << '\n';
}

}  // namespace

int cmd_generate(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    const AnomalyGenSpec spec = gen_spec(cfg);
    const AnomalyData data = generate_anomaly_dataset(spec);

    json prov = {{"generator", "anomaly"},
                 {"seed", spec.seed},
                 {"n_train", spec.n_train},
                 {"n_test", spec.n_test},
                 {"timesteps", spec.timesteps},
                 {"channels", spec.channels},
                 {"noise_sigma", spec.noise_sigma},
                 {"spike_min", spec.spike_min},
                 {"spike_max", spec.spike_max},
                 {"anomaly_rate", spec.anomaly_rate}};
    save_dataset(cfg.out_dir / "train.ds", data.train, prov.dump());
    save_dataset(cfg.out_dir / "test.ds", data.test, prov.dump());
    write_ground_truth_jsonl(cfg.out_dir / "ground_truth.jsonl", data.ground_truth);
    if (cfg.export_jsonl) {
        write_multivariate_jsonl(cfg.out_dir / "train.jsonl", data.train);
        write_multivariate_jsonl(cfg.out_dir / "test.jsonl", data.test);
    }

    std::size_t anomalous = 0;
    for (const auto& s : data.train.samples())
        if (s.label() && *s.label() == 1) ++anomalous;
    std::ostringstream msg;
    msg << "generate: train " << data.train.size() << " / test " << data.test.size()
        << " samples, shape (" << data.train.channels() << "," << data.train.timesteps()
        << "), train anomaly fraction "
        << static_cast<double>(anomalous) / static_cast<double>(data.train.size());
    log_line(cfg, msg.str());
    return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    const Dataset train = load_train_dataset(cfg);
    const Dataset valid = load_test_dataset(cfg);
    LinearSoftmaxClassifier clf(train.num_classes(),
                                Shape{train.channels(), train.timesteps()});
    const TrainReport report =
        train_linear_softmax(clf, train, valid, stage_seed(cfg, RunConfig::kStageTrain),
                             cfg.train);
    json prov = {{"trained_on", train.name()},
                 {"seed", stage_seed(cfg, RunConfig::kStageTrain)},
                 {"epochs_run", report.epochs_run},
                 {"halvings", report.halvings},
                 {"final_lr", report.final_lr},
                 {"best_valid_loss", report.best_valid_loss},
                 {"valid_accuracy", report.valid_accuracy}};
    save_linear_classifier(cfg.out_dir / "classifier.clf", clf, prov.dump());
    std::ostringstream msg;
    msg << "train: " << report.epochs_run << " epochs, " << report.halvings
        << " lr halvings, final lr " << report.final_lr << ", valid loss "
        << report.best_valid_loss << ", valid accuracy " << report.valid_accuracy;
    log_line(cfg, msg.str());
    return kExitOk;
}

int cmd_attribute(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    if (cfg.methods.empty()) {
        log_line(cfg, "attribute: warning: no methods requested, nothing to do");
        return kExitNoopWarning;
    }
    const Dataset test = load_test_dataset(cfg);
    const auto clf = build_classifier(cfg, test);
    const auto& means = test.channel_means();

    const bool wants_lime =
        std::find(cfg.methods.begin(), cfg.methods.end(), "lime") != cfg.methods.end();
    if (wants_lime &&
        static_cast<std::size_t>(cfg.lime_samples) < test.channels() * test.timesteps())
        log_line(cfg, "attribute: warning: lime.samples below the feature count " +
                          std::to_string(test.channels() * test.timesteps()) +
                          "; the surrogate fit will be underdetermined");

    const bool needs_masks =
        std::find(cfg.methods.begin(), cfg.methods.end(), "timereise") != cfg.methods.end();
    std::unique_ptr<MaskSet> masks;
    if (needs_masks) masks = std::make_unique<MaskSet>(obtain_maskset(cfg, test));

    const std::vector<int> subset = draw_subset(cfg, test.size());
    {
        json subset_json = {{"seed", stage_seed(cfg, RunConfig::kStageSubset)},
                            {"ids", subset}};
        std::ofstream out(cfg.out_dir / "subset.json", std::ios::trunc);
        if (!out) throw IoError("cannot write subset.json");
        out << subset_json.dump() << '\n';
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const std::string& method = cfg.methods[mi];
        std::filesystem::create_directories(cfg.out_dir / "maps" / method);
        for (int id : subset) {
            const Matrix& x = test.samples()[static_cast<std::size_t>(id)].values();
            const int target = resolve_target(x, *clf, std::nullopt);
            const std::uint64_t seed = attribution_seed(cfg, mi, id);
            const AttributionMap map = run_method(method, cfg, x, *clf, target,
                                                  masks.get(), means, seed);
            json prov = {{"method", method},
                         {"sample_id", id},
                         {"target", target},
                         {"seed", seed},
                         {"classifier", cfg.classifier},
                         {"perturbation", cfg.perturbation}};
            save_attribution_map(map_path(cfg, method, id), map, prov.dump());
        }
        log_line(cfg, "attribute: " + method + ": " + std::to_string(subset.size()) +
                          " maps written");
    }
    return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    const Dataset test = load_test_dataset(cfg);
    const auto clf = build_classifier(cfg, test);
    const auto& means = test.channel_means();
    const auto stds = per_channel_stds(test);
    const double mean_std =
        std::accumulate(stds.begin(), stds.end(), 0.0) / static_cast<double>(stds.size());
    const double infid_sigma = cfg.infid_sigma > 0.0 ? cfg.infid_sigma : 0.3 * mean_std;
    const double sens_radius = cfg.sens_radius > 0.0 ? cfg.sens_radius : 0.02 * mean_std;

    const auto subset_path = cfg.out_dir / "subset.json";
    if (!std::filesystem::exists(subset_path))
        throw InvalidInputError("missing subset.json; run the attribute command first");
    std::vector<int> subset;
    {
        std::ifstream in(subset_path);
        json j;
        in >> j;
        subset = j.at("ids").get<std::vector<int>>();
    }

    const bool needs_masks =
        std::find(cfg.methods.begin(), cfg.methods.end(), "timereise") != cfg.methods.end();
    std::unique_ptr<MaskSet> masks;
    if (needs_masks) masks = std::make_unique<MaskSet>(obtain_maskset(cfg, test));

    // Every requested map must exist before any metric runs.
    std::vector<std::string> missing;
    for (const auto& method : cfg.methods)
        for (int id : subset)
            if (!std::filesystem::exists(map_path(cfg, method, id)))
                missing.push_back(map_path(cfg, method, id).string());
    if (!missing.empty()) {
        std::string msg = "evaluate: missing attribution files:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw InvalidInputError(msg);
    }

    MetricSummary summary;
    summary.dataset_names = {test.name()};
    summary.method_names = cfg.methods;
    summary.subset_size = static_cast<int>(subset.size());
    summary.auc_basis = "probability";
    for (const auto& name : MetricSummary::metric_names())
        summary.metrics[name] = {std::vector<MetricCell>(cfg.methods.size())};

    std::filesystem::create_directories(cfg.out_dir / "curves");
    const Rng metric_root = Rng(cfg.seed).child(RunConfig::kStageMetrics);

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const std::string& method = cfg.methods[mi];
        double del_sum = 0.0, ins_sum = 0.0, infid_sum = 0.0, sens_sum = 0.0, cont_sum = 0.0;
        std::vector<double> del_mean, ins_mean;
        for (std::size_t si = 0; si < subset.size(); ++si) {
            const int id = subset[si];
            const Matrix& x = test.samples()[static_cast<std::size_t>(id)].values();
            const AttributionMap map = load_attribution_map(map_path(cfg, method, id));
            const int target = map.target_class();

            const CausalCurve del =
                deletion_curve(x, map, *clf, target, means, cfg.curve_steps);
            const CausalCurve ins =
                insertion_curve(x, map, *clf, target, means, cfg.curve_steps);
            del_sum += del.auc;
            ins_sum += ins.auc;
            if (del_mean.empty()) {
                del_mean.assign(del.values.size(), 0.0);
                ins_mean.assign(ins.values.size(), 0.0);
            }
            for (std::size_t j = 0; j < del.values.size(); ++j) {
                del_mean[j] += del.values[j];
                ins_mean[j] += ins.values[j];
            }

            infid_sum += infidelity(x, map.scores(), *clf, target, cfg.infid_perturbations,
                                    infid_sigma,
                                    metric_root.child(0).child(mi).child(si).seed());

            const std::uint64_t attr_seed = attribution_seed(cfg, mi, id);
            auto attribution_fn = [&](const Matrix& xp) {
                return run_method(method, cfg, xp, *clf, target, masks.get(), means,
                                  attr_seed);
            };
            sens_sum += sensitivity_max(x, attribution_fn, sens_radius,
                                        cfg.sens_perturbations,
                                        metric_root.child(1).child(mi).child(si).seed());

            cont_sum += continuity(map.scores()).normalized;
        }
        const auto n = static_cast<double>(subset.size());
        MetricCell base;
        base.seed = metric_root.seed();
        base.sample_ids = subset;
        auto put = [&](const std::string& name, double v) {
            MetricCell cell = base;
            cell.value = v;
            summary.metrics[name][0][mi] = std::move(cell);
        };
        put("del_auc", del_sum / n);
        put("ins_auc", ins_sum / n);
        put("infidelity", infid_sum / n);
        put("sensitivity", sens_sum / n);
        put("continuity", cont_sum / n);

        CausalCurve mean_del, mean_ins;
        for (int j = 0; j <= cfg.curve_steps; ++j) {
            const double f = static_cast<double>(j) / cfg.curve_steps;
            mean_del.fractions.push_back(f);
            mean_ins.fractions.push_back(f);
            mean_del.values.push_back(del_mean[static_cast<std::size_t>(j)] / n);
            mean_ins.values.push_back(ins_mean[static_cast<std::size_t>(j)] / n);
        }
        write_curve(cfg.out_dir / "curves" / (method + "_deletion.tsv"), mean_del);
        write_curve(cfg.out_dir / "curves" / (method + "_insertion.tsv"), mean_ins);
        log_line(cfg, "evaluate: " + method + ": del_auc=" +
                          std::to_string(del_sum / n) + " ins_auc=" +
                          std::to_string(ins_sum / n));
    }

    json prov = {{"subset_size", summary.subset_size},
                 {"infidelity_sigma", infid_sigma},
                 {"sensitivity_radius", sens_radius},
                 {"infidelity_perturbations", cfg.infid_perturbations},
                 {"sensitivity_perturbations", cfg.sens_perturbations},
                 {"curve_steps", cfg.curve_steps},
                 {"classifier", cfg.classifier},
                 {"auc_basis", summary.auc_basis}};
    save_metric_summary(cfg.out_dir / "summary.sum", summary, prov.dump());

    {
        std::ofstream out(cfg.out_dir / "summary.tsv", std::ios::trunc);
        write_summary_table(out, summary);
    }
    {
        std::ofstream out(cfg.out_dir / "del_ins.tsv", std::ios::trunc);
        write_del_ins_table(out, summary);
    }
    {
        std::ofstream out(cfg.out_dir / "ranks.tsv", std::ios::trunc);
        write_rank_table(out, summary);
    }
    return kExitOk;
}

int cmd_bench(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    const std::vector<std::size_t> timesteps = {50, 200, 800};
    const std::vector<int> counts = {100, 200, 400, 800};
    const auto rows = run_bench(timesteps, counts,
                                static_cast<std::size_t>(cfg.gen.channels), cfg.seed);

    std::ofstream out(cfg.out_dir / "bench.tsv", std::ios::trunc);
    if (!out) throw IoError("cannot write bench.tsv");
    out << "timesteps\tmask_count\tmaskgen_seconds\tattribution_seconds\ttimereise_passes\t"
           "occlusion_passes\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.timesteps << '\t' << r.mask_count << '\t' << r.maskgen_seconds << '\t'
            << r.attribution_seconds << '\t' << r.timereise_passes << '\t'
            << r.occlusion_passes << '\n';

    // Linearity in N at the smallest shape.
    std::vector<double> xs, gen_ys, attr_ys;
    for (const auto& r : rows)
        if (r.timesteps == timesteps.front()) {
            xs.push_back(static_cast<double>(r.mask_count));
            gen_ys.push_back(r.maskgen_seconds);
            attr_ys.push_back(r.attribution_seconds);
        }
    const LinearFit gen_fit = fit_linear(xs, gen_ys);
    const LinearFit attr_fit = fit_linear(xs, attr_ys);
    std::ostringstream msg;
    msg << "bench: maskgen r2=" << gen_fit.r_squared << " attribution r2="
        << attr_fit.r_squared;
    log_line(cfg, msg.str());
    return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
    const auto path = cfg.out_dir / "summary.sum";
    if (!std::filesystem::exists(path))
        throw InvalidInputError("missing summary.sum; run the evaluate command first");
    const MetricSummary summary = load_metric_summary(path);
    write_summary_table(std::cout, summary);
    std::cout << '\n';
    write_del_ins_table(std::cout, summary);
    std::cout << '\n';
    write_rank_table(std::cout, summary);
    return kExitOk;
}

int dispatch_command(const std::string& name, const RunConfig& cfg) {
    try {
        cfg.validate();
        if (name == "generate") return cmd_generate(cfg);
        if (name == "train") return cmd_train(cfg);
        if (name == "attribute") return cmd_attribute(cfg);
        if (name == "evaluate") return cmd_evaluate(cfg);
        if (name == "bench") return cmd_bench(cfg);
        if (name == "report") return cmd_report(cfg);
        throw ConfigError("unknown command '" + name + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

}  // namespace treise
