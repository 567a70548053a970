#include "treise/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

#include "treise/rng.hpp"

namespace treise {

namespace {

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        area += (xs[i] - xs[i - 1]) * 0.5 * (ys[i] + ys[i - 1]);
    return area;
}

void check_curve_inputs(const Matrix& x, const AttributionMap& map, const Classifier& clf,
                        int target, std::span<const double> channel_means, int num_steps,
                        BaselineKind baseline) {
    if (!x.same_shape(map.scores()))
        throw InvalidInputError("causal curve: map shape does not match sample");
    const Shape s = clf.input_shape();
    if (x.rows() != s.channels || x.cols() != s.timesteps)
        throw InvalidInputError("causal curve: sample shape does not match classifier");
    if (target < 0 || target >= clf.num_classes())
        throw InvalidInputError("causal curve: target class out of range");
    if (num_steps < 1) throw InvalidInputError("causal curve: num_steps must be >= 1");
    if (baseline == BaselineKind::ChannelMean && channel_means.size() != x.rows())
        throw InvalidInputError("causal curve: channel means vector has wrong length");
}

double baseline_at(BaselineKind baseline, std::span<const double> means, std::size_t channel) {
    return baseline == BaselineKind::ChannelMean ? means[channel] : 0.0;
}

// Shared walk for deletion/insertion: start from `start`, move towards
// `finish` in ranked order, evaluating a callback at each fraction.
template <typename Eval>
CausalCurve walk_curve(const Matrix& start, const Matrix& finish,
                       const std::vector<std::size_t>& order, int num_steps, Eval&& eval) {
    const std::size_t total = order.size();
    CausalCurve curve;
    curve.fractions.reserve(num_steps + 1);
    curve.values.reserve(num_steps + 1);
    Matrix work = start;
    std::size_t replaced = 0;
    for (int j = 0; j <= num_steps; ++j) {
        const double f = static_cast<double>(j) / static_cast<double>(num_steps);
        const auto k = static_cast<std::size_t>(
            std::llround(f * static_cast<double>(total)));
        for (; replaced < k; ++replaced)
            work.data()[order[replaced]] = finish.data()[order[replaced]];
        curve.fractions.push_back(f);
        curve.values.push_back(eval(work));
    }
    curve.auc = trapezoid(curve.fractions, curve.values);
    return curve;
}

Matrix baseline_matrix(const Matrix& like, BaselineKind baseline,
                       std::span<const double> means) {
    Matrix out(like.rows(), like.cols());
    for (std::size_t c = 0; c < out.rows(); ++c) {
        const double v = baseline_at(baseline, means, c);
        for (std::size_t t = 0; t < out.cols(); ++t) out(c, t) = v;
    }
    return out;
}

// Two-tailed Nemenyi critical values (studentized range / sqrt(2)) for
// k = 2..10, verified against the published table.
struct QRow {
    double alpha;
    std::array<double, 9> q;
};
constexpr std::array<QRow, 3> kNemenyiTable = {{
    {0.01, {2.575829, 2.913494, 3.113250, 3.254686, 3.363740, 3.452213, 3.526471, 3.590339,
            3.646292}},
    {0.05, {1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730,
            3.163684}},
    {0.10, {1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606,
            2.919889}},
}};

}  // namespace

std::vector<std::size_t> attribution_ranking(const Matrix& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    auto data = scores.data();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (data[a] != data[b]) return data[a] > data[b];
        return a < b;
    });
    return order;
}

CausalCurve deletion_curve(const Matrix& x, const AttributionMap& map, const Classifier& clf,
                           int target, std::span<const double> channel_means, int num_steps,
                           BaselineKind baseline) {
    check_curve_inputs(x, map, clf, target, channel_means, num_steps, baseline);
    const Matrix flat = baseline_matrix(x, baseline, channel_means);
    return walk_curve(x, flat, attribution_ranking(map.scores()), num_steps,
                      [&](const Matrix& w) {
                          return clf.score(w)[static_cast<std::size_t>(target)];
                      });
}

CausalCurve insertion_curve(const Matrix& x, const AttributionMap& map, const Classifier& clf,
                            int target, std::span<const double> channel_means, int num_steps,
                            BaselineKind baseline) {
    check_curve_inputs(x, map, clf, target, channel_means, num_steps, baseline);
    const Matrix flat = baseline_matrix(x, baseline, channel_means);
    return walk_curve(flat, x, attribution_ranking(map.scores()), num_steps,
                      [&](const Matrix& w) {
                          return clf.score(w)[static_cast<std::size_t>(target)];
                      });
}

CausalCurve subset_accuracy_curve(std::span<const TimeSeriesSample> subset,
                                  std::span<const AttributionMap> maps, const Classifier& clf,
                                  CurveMode mode, std::span<const double> channel_means,
                                  int num_steps, BaselineKind baseline) {
    if (subset.empty()) throw InvalidInputError("accuracy curve: empty subset");
    if (subset.size() != maps.size())
        throw InvalidInputError("accuracy curve: one map per sample required");
    for (const auto& s : subset)
        if (!s.label()) throw InvalidInputError("accuracy curve: sample without label");

    CausalCurve curve;
    curve.fractions.resize(num_steps + 1);
    curve.values.assign(num_steps + 1, 0.0);
    for (int j = 0; j <= num_steps; ++j)
        curve.fractions[j] = static_cast<double>(j) / static_cast<double>(num_steps);

    for (std::size_t i = 0; i < subset.size(); ++i) {
        const Matrix& x = subset[i].values();
        const int label = *subset[i].label();
        const Matrix flat = baseline_matrix(x, baseline, channel_means);
        const Matrix& start = mode == CurveMode::Deletion ? x : flat;
        const Matrix& finish = mode == CurveMode::Deletion ? flat : x;
        const CausalCurve one =
            walk_curve(start, finish, attribution_ranking(maps[i].scores()), num_steps,
                       [&](const Matrix& w) {
                           return predict_class(clf, w) == label ? 1.0 : 0.0;
                       });
        for (int j = 0; j <= num_steps; ++j) curve.values[j] += one.values[j];
    }
    for (double& v : curve.values) v /= static_cast<double>(subset.size());
    curve.auc = trapezoid(curve.fractions, curve.values);
    return curve;
}

double infidelity(const Matrix& x, const Matrix& phi, const Classifier& clf, int target,
                  int n_pert, double noise_sigma, std::uint64_t seed) {
    if (!x.same_shape(phi)) throw InvalidInputError("infidelity: map shape mismatch");
    if (n_pert < 1) throw InvalidInputError("infidelity: n_pert must be >= 1");
    if (!(noise_sigma > 0.0)) throw InvalidInputError("infidelity: noise sigma must be positive");
    if (target < 0 || target >= clf.num_classes())
        throw InvalidInputError("infidelity: target class out of range");

    const double base = clf.score(x)[static_cast<std::size_t>(target)];
    Rng rng(seed);
    Matrix perturbed(x.rows(), x.cols());
    double acc = 0.0;
    for (int i = 0; i < n_pert; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double noise = rng.gaussian() * noise_sigma;
            perturbed.data()[j] = x.data()[j] - noise;
            dot += noise * phi.data()[j];
        }
        const double delta = base - clf.score(perturbed)[static_cast<std::size_t>(target)];
        const double err = dot - delta;
        acc += err * err;
    }
    return acc / static_cast<double>(n_pert);
}

double sensitivity_max(const Matrix& x,
                       const std::function<AttributionMap(const Matrix&)>& attribution_fn,
                       double radius, int n_pert, std::uint64_t seed) {
    if (!(radius > 0.0)) throw InvalidInputError("sensitivity: radius must be positive");
    if (n_pert < 1) throw InvalidInputError("sensitivity: n_pert must be >= 1");

    const AttributionMap base = attribution_fn(x);
    double base_norm = 0.0;
    for (double v : base.scores().data()) base_norm += v * v;
    base_norm = std::sqrt(base_norm);
    const double denom = std::max(base_norm, 1e-12);

    Rng rng(seed);
    Matrix perturbed(x.rows(), x.cols());
    double worst = 0.0;
    for (int i = 0; i < n_pert; ++i) {
        for (std::size_t j = 0; j < x.size(); ++j)
            perturbed.data()[j] = x.data()[j] + rng.uniform(-radius, radius);
        const AttributionMap moved = attribution_fn(perturbed);
        double diff = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = moved.scores().data()[j] - base.scores().data()[j];
            diff += d * d;
        }
        worst = std::max(worst, std::sqrt(diff) / denom);
    }
    return worst;
}

ContinuityResult continuity(const Matrix& map_scores) {
    if (map_scores.empty()) throw InvalidInputError("continuity: empty map");
    ContinuityResult r;
    if (map_scores.cols() < 2) return r;
    for (std::size_t c = 0; c < map_scores.rows(); ++c)
        for (std::size_t t = 0; t + 1 < map_scores.cols(); ++t)
            r.total += std::abs(map_scores(c, t) - map_scores(c, t + 1));
    r.normalized =
        r.total / (static_cast<double>(map_scores.rows()) *
                   static_cast<double>(map_scores.cols() - 1));
    return r;
}

std::vector<double> friedman_ranks(const std::vector<std::vector<double>>& values,
                                   RankDirection direction) {
    if (values.empty()) throw InvalidInputError("friedman: no datasets");
    const std::size_t methods = values.front().size();
    if (methods == 0) throw InvalidInputError("friedman: no methods");
    for (const auto& row : values) {
        if (row.size() != methods) throw InvalidInputError("friedman: ragged value table");
        for (double v : row)
            if (!std::isfinite(v)) throw InvalidInputError("friedman: missing cell");
    }

    std::vector<double> avg(methods, 0.0);
    std::vector<std::size_t> order(methods);
    for (const auto& row : values) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return direction == RankDirection::LowerBetter ? row[a] < row[b] : row[a] > row[b];
        });
        std::size_t i = 0;
        while (i < methods) {
            std::size_t j = i;
            while (j + 1 < methods && row[order[j + 1]] == row[order[i]]) ++j;
            const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t m = i; m <= j; ++m) avg[order[m]] += shared;
            i = j + 1;
        }
    }
    for (double& v : avg) v /= static_cast<double>(values.size());
    return avg;
}

double critical_difference(int k, int n, double alpha) {
    if (k < 2 || k > 10)
        throw InvalidInputError("critical difference: k outside the embedded table (2..10)");
    if (n < 2) throw InvalidInputError("critical difference: n must be >= 2");
    for (const auto& row : kNemenyiTable)
        if (std::abs(row.alpha - alpha) < 1e-12)
            return row.q[static_cast<std::size_t>(k - 2)] *
                   std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * n));
    throw InvalidInputError("critical difference: alpha must be one of 0.01, 0.05, 0.10");
}

const std::vector<std::string>& MetricSummary::metric_names() {
    static const std::vector<std::string> names = {"del_auc", "ins_auc", "infidelity",
                                                   "sensitivity", "continuity"};
    return names;
}

const MetricCell& MetricSummary::cell(const std::string& metric, std::size_t dataset,
                                      std::size_t method) const {
    auto it = metrics.find(metric);
    if (it == metrics.end()) throw InvalidInputError("summary: unknown metric " + metric);
    if (dataset >= it->second.size() || method >= it->second[dataset].size())
        throw InvalidInputError("summary: cell out of range");
    return it->second[dataset][method];
}

void write_summary_table(std::ostream& out, const MetricSummary& summary) {
    out << "dataset\tmetric";
    for (const auto& m : summary.method_names) out << '\t' << m;
    out << '\n';
    for (std::size_t d = 0; d < summary.dataset_names.size(); ++d)
        for (const auto& metric : MetricSummary::metric_names()) {
            if (!summary.metrics.count(metric)) continue;
            out << summary.dataset_names[d] << '\t' << metric;
            for (std::size_t m = 0; m < summary.method_names.size(); ++m)
                out << '\t' << summary.cell(metric, d, m).value;
            out << '\n';
        }
}

void write_del_ins_table(std::ostream& out, const MetricSummary& summary) {
    out << "dataset";
    for (const auto& m : summary.method_names) out << '\t' << m << "_del\t" << m << "_ins";
    out << '\n';
    for (std::size_t d = 0; d < summary.dataset_names.size(); ++d) {
        out << summary.dataset_names[d];
        for (std::size_t m = 0; m < summary.method_names.size(); ++m)
            out << '\t' << summary.cell("del_auc", d, m).value << '\t'
                << summary.cell("ins_auc", d, m).value;
        out << '\n';
    }
}

void write_rank_table(std::ostream& out, const MetricSummary& summary, double alpha) {
    const std::size_t n_datasets = summary.dataset_names.size();
    const std::size_t n_methods = summary.method_names.size();
    if (n_datasets < 2) {
        out << "# ranks omitted: need at least 2 datasets\n";
        return;
    }
    const std::map<std::string, RankDirection> directions = {
        {"del_auc", RankDirection::LowerBetter},   {"ins_auc", RankDirection::HigherBetter},
        {"infidelity", RankDirection::LowerBetter}, {"sensitivity", RankDirection::LowerBetter},
        {"continuity", RankDirection::LowerBetter}};
    out << "metric";
    for (const auto& m : summary.method_names) out << '\t' << m;
    out << "\tcritical_difference\n";
    for (const auto& [metric, direction] : directions) {
        if (!summary.metrics.count(metric)) continue;
        std::vector<std::vector<double>> values(n_datasets, std::vector<double>(n_methods));
        for (std::size_t d = 0; d < n_datasets; ++d)
            for (std::size_t m = 0; m < n_methods; ++m)
                values[d][m] = summary.cell(metric, d, m).value;
        const auto ranks = friedman_ranks(values, direction);
        out << metric;
        for (double r : ranks) out << '\t' << r;
        if (n_methods >= 2 && n_methods <= 10)
            out << '\t'
                << critical_difference(static_cast<int>(n_methods),
                                       static_cast<int>(n_datasets), alpha);
        else
            out << "\tn/a";
        out << '\n';
    }
}

}  // namespace treise
