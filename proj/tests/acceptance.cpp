// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any executed criterion fails.
//
// Usage: acceptance [cli_path] [--only N]... [--skip N]...
// cli_path points at the command-line binary (used by the repeatability
// criterion; falls back to the in-process command layer when absent).
// --only/--skip select criteria, so a known-failing criterion can be tracked
// as its own expected-failure test without hiding regressions in the rest.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "treise/attribution.hpp"
#include "treise/bench.hpp"
#include "treise/commands.hpp"
#include "treise/dataio.hpp"
#include "treise/masks.hpp"
#include "treise/metrics.hpp"
#include "treise/rng.hpp"

using namespace treise;

namespace {

namespace fs = std::filesystem;

int failures = 0;
int executed = 0;
std::vector<int> only_list, skip_list;

bool enabled(int criterion) {
    if (std::find(skip_list.begin(), skip_list.end(), criterion) != skip_list.end())
        return false;
    return only_list.empty() ||
           std::find(only_list.begin(), only_list.end(), criterion) != only_list.end();
}

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    ++executed;
    if (!pass) ++failures;
}

void run_criterion(int criterion, const std::function<void(int)>& body) {
    if (!enabled(criterion)) return;
    try {
        body(criterion);
    } catch (const std::exception& e) {
        report(criterion, false, std::string("exception: ") + e.what());
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::uint64_t fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::uint64_t h = 14695981039346656037ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

struct Fixture {
    AnomalyData data;
    std::vector<int> anomalous_ids;           // first 100 anomalous test samples
    std::vector<GroundTruthMap> truth;        // aligned with anomalous_ids
    std::vector<int> subset;                  // seeded 100-sample evaluation draw
    std::vector<double> channel_means;
    double mean_std = 0.0;
    MaskSet masks;
    double maskgen_and_attr_seconds = 0.0;
    std::vector<AttributionMap> oracle_maps;  // timereise maps on anomalous_ids

    Fixture()
        : data(generate_anomaly_dataset([] {
              AnomalyGenSpec spec;
              spec.seed = 7;
              return spec;
          }())),
          masks(generate_maskset(3, 50, default_mask_spec(50, Rng(7).child(4).seed()))) {
        const Dataset& test = data.test;
        channel_means = test.channel_means();
        const auto stds = per_channel_stds(test);
        mean_std = mean(stds);

        for (const auto& g : data.ground_truth) {
            if (g.split != 1 || anomalous_ids.size() >= 100) continue;
            anomalous_ids.push_back(g.sample_index);
            truth.push_back(g);
        }

        std::vector<int> ids(test.size());
        std::iota(ids.begin(), ids.end(), 0);
        Rng pick(Rng(7).child(3).seed());
        for (std::size_t i = 0; i < 100; ++i) {
            const std::size_t j = i + pick.uniform_below(ids.size() - i);
            std::swap(ids[i], ids[j]);
        }
        subset.assign(ids.begin(), ids.begin() + 100);
    }
};

std::string format(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc)
            only_list.push_back(std::atoi(argv[++i]));
        else if (arg == "--skip" && i + 1 < argc)
            skip_list.push_back(std::atoi(argv[++i]));
        else
            cli = arg;
    }

    Fixture fx;
    const Dataset& test = fx.data.test;
    const OracleAnomalyClassifier oracle(Shape{3, 50});

    // TimeREISE maps for the anomalous subset, shared by criteria 1 and 2.
    int recovered = 0;
    auto ensure_oracle_maps = [&] {
        if (!fx.oracle_maps.empty()) return;
        const auto start = std::chrono::steady_clock::now();
        const MaskSet fresh =
            generate_maskset(3, 50, default_mask_spec(50, Rng(7).child(4).seed()));
        for (std::size_t i = 0; i < fx.anomalous_ids.size(); ++i) {
            const Matrix& x = test.samples()[fx.anomalous_ids[i]].values();
            const int target = resolve_target(x, oracle, std::nullopt);
            fx.oracle_maps.push_back(timereise_attribution(x, oracle, target, fresh));
            const auto& s = fx.oracle_maps.back().scores();
            std::size_t best = 0;
            for (std::size_t j = 1; j < s.size(); ++j)
                if (s.data()[j] > s.data()[best]) best = j;
            if (static_cast<int>(best / 50) == fx.truth[i].channel &&
                static_cast<int>(best % 50) == fx.truth[i].timestep)
                ++recovered;
        }
        fx.maskgen_and_attr_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    // Criterion 1: ground-truth recovery with the oracle and default masks.
    run_criterion(1, [&](int id) {
        ensure_oracle_maps();
        const bool pass = recovered >= 90 && fx.anomalous_ids.size() == 100 &&
                          fx.maskgen_and_attr_seconds <= 300.0;
        report(id, pass,
               "attribution argmax hits the true spike on " + std::to_string(recovered) +
                   "/100 anomalous samples in " + format(fx.maskgen_and_attr_seconds) +
                   " s (need >= 90 within 300 s)");
    });

    // Criterion 2: causal-metric ordering on the same subset.
    run_criterion(2, [&](int id) {
        ensure_oracle_maps();
        double del_sum = 0.0, ins_sum = 0.0, del_uniform = 0.0;
        for (std::size_t i = 0; i < fx.anomalous_ids.size(); ++i) {
            const Matrix& x = test.samples()[fx.anomalous_ids[i]].values();
            const int target = fx.oracle_maps[i].target_class();
            del_sum +=
                deletion_curve(x, fx.oracle_maps[i], oracle, target, fx.channel_means, 50)
                    .auc;
            ins_sum +=
                insertion_curve(x, fx.oracle_maps[i], oracle, target, fx.channel_means, 50)
                    .auc;
            const AttributionMap uniform = uniform_attribution(3, 50, target);
            del_uniform +=
                deletion_curve(x, uniform, oracle, target, fx.channel_means, 50).auc;
        }
        const double n = static_cast<double>(fx.anomalous_ids.size());
        const double del = del_sum / n, ins = ins_sum / n, uni = del_uniform / n;
        const bool pass = del < ins && (uni - del) >= 0.1;
        report(id, pass,
               "deletion auc " + format(del) + " < insertion auc " + format(ins) +
                   "; uniform-control deletion " + format(uni) + " exceeds it by " +
                   format(uni - del) + " (need >= 0.1)");
    });

    // Criteria 3-5 share the gradient-capable evaluation classifier. Trained
    // weights on this task collapse towards zero (the spike task is not
    // linearly separable), hiding the differences between the engines, so the
    // evaluation uses a seeded random-weight classifier with genuine softmax
    // curvature. LIME runs with 200 samples (>= C*T) and lambda 0.01.
    const auto linear = LinearSoftmaxClassifier::random_init(
        2, Shape{3, 50}, 0.5, Rng(7).child(2).seed());
    const int kLimeSamples = 200;
    const double kLimeDensity = 0.5, kLimeLambda = 0.01;
    const double radius = 0.02 * fx.mean_std;
    const double sigma = 0.3 * fx.mean_std;

    enum Method { kTimereise = 0, kOcclusion, kAblation, kIg, kLime, kMethodCount };
    auto run_method = [&](int method, const Matrix& x, int target,
                          std::uint64_t seed) -> AttributionMap {
        switch (method) {
            case kTimereise:
                return timereise_attribution(x, linear, target, fx.masks);
            case kOcclusion: {
                const double base = linear.score(x)[static_cast<std::size_t>(target)];
                return occlusion_attribution(x, linear, target, base, 1, 1,
                                             BaselineKind::ChannelMean, fx.channel_means);
            }
            case kAblation: {
                const double base = linear.score(x)[static_cast<std::size_t>(target)];
                return feature_ablation_attribution(x, linear, target, base, 4,
                                                    BaselineKind::ChannelMean,
                                                    fx.channel_means);
            }
            case kIg: {
                Matrix baseline(3, 50);
                for (std::size_t c = 0; c < 3; ++c)
                    for (std::size_t t = 0; t < 50; ++t)
                        baseline(c, t) = fx.channel_means[c];
                return integrated_gradients_attribution(x, linear, target, baseline, 50);
            }
            default:
                return lime_attribution(x, linear, target, kLimeSamples, kLimeDensity,
                                        kLimeLambda, seed, fx.channel_means);
        }
    };

    std::vector<std::vector<double>> cont(kMethodCount), sens(kMethodCount),
        infid(kMethodCount);
    bool subset_metrics_ok = true;
    const bool want_cont = enabled(3);
    const bool want_sens = enabled(4);
    const bool want_infid = enabled(5);
    try {
        for (std::size_t si = 0;
             (want_cont || want_sens || want_infid) && si < fx.subset.size(); ++si) {
            const Matrix& x = test.samples()[fx.subset[si]].values();
            const int target = resolve_target(x, linear, std::nullopt);
            for (int m = 0; m < kMethodCount; ++m) {
                const std::uint64_t aseed =
                    Rng(7).child(5).child(m).child(fx.subset[si]).seed();
                const AttributionMap map = run_method(m, x, target, aseed);
                if (want_cont) cont[m].push_back(continuity(map.scores()).normalized);
                if (want_infid && m != kLime)
                    infid[m].push_back(
                        infidelity(x, map.scores(), linear, target, 1000, sigma,
                                   Rng(7).child(6).child(m).child(si).seed()));
                if (want_sens && (m == kTimereise || m == kLime)) {
                    auto fn = [&](const Matrix& xp) {
                        return run_method(m, xp, target, aseed);
                    };
                    sens[m].push_back(
                        sensitivity_max(x, fn, radius, 10,
                                        Rng(7).child(8).child(m).child(si).seed()));
                }
            }
        }
    } catch (const std::exception& e) {
        subset_metrics_ok = false;
        if (want_cont) report(3, false, std::string("subset pipeline failed: ") + e.what());
        if (want_sens) report(4, false, "subset pipeline failed");
        if (want_infid) report(5, false, "subset pipeline failed");
    }

    if (subset_metrics_ok) {
        // Criterion 3: continuity ordering with >= 10% relative gaps.
        run_criterion(3, [&](int id) {
            const double tr = mean(cont[kTimereise]);
            const double oc = mean(cont[kOcclusion]);
            const double li = mean(cont[kLime]);
            const double gap1 = (oc - tr) / oc;
            const double gap2 = (li - oc) / li;
            const bool pass = tr < oc && oc < li && gap1 >= 0.10 && gap2 >= 0.10;
            report(id, pass,
                   "mean continuity: timereise " + format(tr) + " < occlusion " + format(oc) +
                       " < lime " + format(li) + " (relative gaps " + format(gap1) + ", " +
                       format(gap2) + "; need >= 0.10)");
        });

        // Criterion 4: sensitivity direction against the surrogate.
        run_criterion(4, [&](int id) {
            int not_worse = 0;
            for (std::size_t i = 0; i < fx.subset.size(); ++i)
                if (sens[kTimereise][i] <= sens[kLime][i]) ++not_worse;
            report(id, not_worse >= 70,
                   "timereise sensitivity <= lime on " + std::to_string(not_worse) +
                       "/100 samples (need >= 70); means " + format(mean(sens[kTimereise])) +
                       " vs " + format(mean(sens[kLime])));
        });

        // Criterion 5: infidelity parity across the four methods.
        run_criterion(5, [&](int id) {
            const std::vector<double> means_by_method = {
                mean(infid[kTimereise]), mean(infid[kOcclusion]), mean(infid[kAblation]),
                mean(infid[kIg])};
            const double lo = *std::min_element(means_by_method.begin(),
                                                means_by_method.end());
            const double hi = *std::max_element(means_by_method.begin(),
                                                means_by_method.end());
            const double spread = (hi - lo) / lo;
            report(id, spread < 0.25,
                   "mean infidelity spread (timereise " + format(means_by_method[0]) +
                       ", occlusion " + format(means_by_method[1]) + ", ablation " +
                       format(means_by_method[2]) + ", ig " + format(means_by_method[3]) +
                       ") is " + format(spread) + " of the smallest (need < 0.25)");
        });
    }

    // Criterion 6: occurrence normalization against a brute-force oracle.
    run_criterion(6, [&](int id) {
        MaskGenSpec spec;
        spec.densities = {0.25, 0.75};
        spec.granularities = {3};
        spec.per_combo_count = 6;
        spec.seed = 77;
        const MaskSet toy = generate_maskset(5, 8, spec);
        const OracleAnomalyClassifier stub(Shape{5, 8});
        Rng rng(8);
        Matrix x(5, 8);
        for (double& v : x.data()) v = rng.gaussian();
        const AttributionMap fast = timereise_attribution(x, stub, 1, toy);

        std::vector<double> scores;
        for (const auto& m : toy.masks()) {
            Matrix xp(5, 8);
            for (std::size_t c = 0; c < 5; ++c)
                for (std::size_t t = 0; t < 8; ++t) xp(c, t) = x(c, t) * m.values(c, t);
            scores.push_back(stub.score(xp)[1]);
        }
        Matrix raw(5, 8, 0.0);
        for (std::size_t c = 0; c < 5; ++c)
            for (std::size_t t = 0; t < 8; ++t) {
                double acc = 0.0, occ = 0.0;
                for (std::size_t i = 0; i < toy.count(); ++i) {
                    acc += scores[i] * toy.masks()[i].values(c, t);
                    occ += toy.masks()[i].values(c, t);
                }
                raw(c, t) = acc / std::max(occ, kOccurrenceFloor);
            }
        double lo = raw.data()[0], hi = raw.data()[0];
        for (double v : raw.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < raw.size(); ++i)
            worst = std::max(worst, std::abs(fast.scores().data()[i] -
                                             (raw.data()[i] - lo) / (hi - lo)));
        report(id, toy.count() == 12 && worst <= 1e-10,
               "5x8 toy map matches the explicit-loop recomputation within " + format(worst) +
                   " (need <= 1e-10, 12 masks)");
    });

    // Criterion 7: integrated-gradients completeness.
    run_criterion(7, [&](int id) {
        double worst = 0.0;
        for (int probe = 0; probe < 20; ++probe) {
            Rng rng(100 + probe);
            const auto clf = LinearSoftmaxClassifier::random_init(2, Shape{3, 50}, 0.05,
                                                                  rng.next_u64());
            Matrix x(3, 50);
            for (double& v : x.data()) v = rng.gaussian();
            const Matrix baseline(3, 50, 0.0);
            const int target = static_cast<int>(rng.uniform_below(2));
            const Matrix ig = integrated_gradients_raw(x, clf, target, baseline, 50);
            double total = 0.0;
            for (double v : ig.data()) total += v;
            const double expected = clf.score(x)[static_cast<std::size_t>(target)] -
                                    clf.score(baseline)[static_cast<std::size_t>(target)];
            worst = std::max(worst, std::abs(total - expected));
        }
        report(id, worst <= 0.01,
               "completeness gap over 20 random probes at 50 steps: worst " + format(worst) +
                   " (need <= 0.01)");
    });

    // Criterion 8: infidelity of the exact linear sensitivity map.
    run_criterion(8, [&](int id) {
        Matrix w(3, 50);
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] = static_cast<double>(i) / static_cast<double>(w.size() - 1);
        struct LinearStub final : Classifier {
            Matrix w;
            explicit LinearStub(Matrix m) : w(std::move(m)) {}
            int num_classes() const override { return 2; }
            Shape input_shape() const override { return {w.rows(), w.cols()}; }
            std::vector<double> score(const Matrix& x) const override {
                double p = 0.5;
                for (std::size_t i = 0; i < x.size(); ++i) p += w.data()[i] * x.data()[i];
                return {p, 1.0 - p};
            }
        } stub(w);
        Rng rng(5);
        Matrix x(3, 50);
        for (double& v : x.data()) v = rng.gaussian();
        const double value = infidelity(x, w, stub, 0, 1000, 0.3, 7);
        report(id, value <= 1e-10,
               "linear-response stub with its own sensitivity as the map: infidelity " +
                   format(value) + " (need <= 1e-10)");
    });

    // Criterion 9: runtime model.
    run_criterion(9, [&](int id) {
        bool counts_ok = true;
        std::string counts;
        for (std::size_t timesteps : {50u, 200u, 800u}) {
            const OracleAnomalyClassifier clf(Shape{3, timesteps});
            CallCountingClassifier counted(clf);
            const MaskSet masks =
                generate_maskset(3, timesteps, default_mask_spec(timesteps, 11));
            Rng rng(4);
            Matrix x(3, timesteps);
            for (double& v : x.data()) v = rng.gaussian();
            (void)timereise_attribution(x, counted, 1, masks);
            counts_ok &= counted.forward_passes() == 9 * 3 * 32;
            counts += std::to_string(counted.forward_passes()) + " ";

            counted.reset();
            (void)occlusion_attribution(x, counted, 1, 0.5, 1, 1, BaselineKind::Zero, {});
            counts_ok &= counted.forward_passes() == 3 * timesteps;
        }
        const std::vector<std::size_t> ts = {50};
        const std::vector<int> ns = {100, 200, 400, 800};
        const auto rows = run_bench(ts, ns, 3, 7);
        std::vector<double> xs, gen_ys, attr_ys;
        for (const auto& r : rows) {
            xs.push_back(r.mask_count);
            gen_ys.push_back(r.maskgen_seconds);
            attr_ys.push_back(r.attribution_seconds);
        }
        const double gen_r2 = fit_linear(xs, gen_ys).r_squared;
        const double attr_r2 = fit_linear(xs, attr_ys).r_squared;
        const bool pass = counts_ok && gen_r2 >= 0.95 && attr_r2 >= 0.95;
        report(id, pass,
               "pass counts " + counts + "(|P||G|N = 864, shape invariant); occlusion = C*T; "
               "wall-clock vs N fits: maskgen r2 " + format(gen_r2) + ", attribution r2 " +
                   format(attr_r2) + " (need >= 0.95)");
    });

    // Criterion 10: repeated runs produce bitwise-identical artifacts.
    run_criterion(10, [&](int id) {
        const fs::path base = fs::temp_directory_path() / "treise_acceptance_repro";
        fs::remove_all(base);
        fs::create_directories(base);
        const std::string overrides =
            " -s gen.n_train=2000 -s gen.n_test=1000 -s metrics.subset_size=20"
            " -s methods=timereise,occlusion,lime -s lime.samples=200 -s masks.count=8"
            " -s metrics.infidelity_perturbations=100 -s metrics.curve_steps=20";
        auto run_all = [&](const fs::path& dir) {
            if (!cli.empty()) {
                for (const std::string verb : {"generate", "attribute", "evaluate"}) {
                    const std::string cmd = cli + " " + verb + " -o " + dir.string() +
                                            overrides + " >/dev/null 2>&1";
                    if (std::system(cmd.c_str()) != 0)
                        throw Error("cli " + verb + " failed");
                }
            } else {
                RunConfig cfg;
                cfg.out_dir = dir;
                cfg.gen.n_train = 2000;
                cfg.gen.n_test = 1000;
                cfg.subset_size = 20;
                cfg.methods = {"timereise", "occlusion", "lime"};
                cfg.lime_samples = 200;
                cfg.mask_count = 8;
                cfg.infid_perturbations = 100;
                cfg.curve_steps = 20;
                if (cmd_generate(cfg) != 0 || cmd_attribute(cfg) != 0 ||
                    cmd_evaluate(cfg) != 0)
                    throw Error("in-process command failed");
            }
        };
        run_all(base / "a");
        run_all(base / "b");

        std::size_t compared = 0, mismatched = 0;
        for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().filename() == "run.log") continue;
            const fs::path rel = fs::relative(entry.path(), base / "a");
            ++compared;
            if (fnv1a_file(entry.path()) != fnv1a_file(base / "b" / rel)) ++mismatched;
        }
        report(id, compared > 40 && mismatched == 0,
               "two identical runs via " + std::string(cli.empty() ? "commands" : "the CLI") +
                   ": " + std::to_string(compared) + " artifact files checksummed, " +
                   std::to_string(mismatched) + " mismatched");
        fs::remove_all(base);
    });

    // Criterion 11: mask statistics under the default spec.
    run_criterion(11, [&](int id) {
        MaskGenSpec spec = default_mask_spec(50, 13);
        spec.per_combo_count = 500;
        const MaskSet set = generate_maskset(3, 50, spec);
        const bool cardinality_ok = set.count() == 9 * 3 * 500;
        double worst_bias = 0.0;
        for (std::size_t pi = 0; pi < set.densities().size(); ++pi)
            for (std::size_t gi = 0; gi < set.granularities().size(); ++gi) {
                double sum = 0.0;
                std::size_t entries = 0;
                const std::size_t start = (pi * set.granularities().size() + gi) * 500;
                for (std::size_t i = start; i < start + 500; ++i) {
                    for (double v : set.masks()[i].values.data()) sum += v;
                    entries += set.masks()[i].values.size();
                }
                worst_bias = std::max(
                    worst_bias,
                    std::abs(sum / static_cast<double>(entries) - set.densities()[pi]));
            }
        report(id, cardinality_ok && worst_bias <= 0.05,
               "cardinality " + std::to_string(set.count()) +
                   " (= 9*3*500); worst |mean entry - p| over (p,g) pairs: " +
                   format(worst_bias) + " (need <= 0.05)");
    });

    // Criterion 12: statistical plumbing.
    run_criterion(12, [&](int id) {
        const auto ranks = friedman_ranks(
            {{0.1, 0.5}, {0.2, 0.3}, {0.4, 0.4}, {0.8, 0.6}}, RankDirection::LowerBetter);
        const bool friedman_ok = std::abs(ranks[0] - 1.375) < 1e-12;
        const double cd = critical_difference(6, 17);
        const bool table_ok = std::abs(cd - 1.8286) < 2e-3;  // published-table value
        const bool quad_ok = std::abs(critical_difference(4, 40) -
                                      critical_difference(4, 10) / 2.0) < 1e-12;
        report(id, friedman_ok && table_ok && quad_ok,
               "tie-average rank " + format(ranks[0]) + " (expect 1.375); CD(6,17) " +
                   format(cd) + " (published 1.8286); quadrupling n halves CD");
    });

    std::printf("%d of %d executed criteria passed\n", executed - failures, executed);
    return failures == 0 ? 0 : 1;
}
