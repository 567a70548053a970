#include "treise/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treise/rng.hpp"

namespace treise {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> softmax(const std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace

Matrix Classifier::gradient(const Matrix&, int) const {
    throw UnsupportedOperationError("classifier does not provide gradients");
}

void Classifier::check_input(const Matrix& x) const {
    const Shape s = input_shape();
    if (x.rows() != s.channels || x.cols() != s.timesteps)
        throw InvalidInputError("classifier: input shape mismatch");
    if (!all_finite(x)) throw InvalidInputError("classifier: non-finite input");
}

void Classifier::check_class(int k) const {
    if (k < 0 || k >= num_classes())
        throw InvalidInputError("classifier: class index out of range");
}

OracleAnomalyClassifier::OracleAnomalyClassifier(Shape shape, double spike_threshold,
                                                 double softness, double noise_sigma)
    : shape_(shape),
      spike_threshold_(spike_threshold),
      softness_(softness),
      noise_sigma_(noise_sigma) {
    if (softness_ <= 0.0 || noise_sigma_ <= 0.0)
        throw InvalidSpecError("oracle: softness and noise_sigma must be positive");
}

std::vector<double> OracleAnomalyClassifier::score(const Matrix& x) const {
    check_input(x);
    double max_abs = 0.0;
    for (double v : x.data()) max_abs = std::max(max_abs, std::abs(v));
    const double z = max_abs / noise_sigma_;
    const double p1 = sigmoid((z - spike_threshold_) / softness_);
    return {1.0 - p1, p1};
}

Matrix OracleAnomalyClassifier::gradient(const Matrix& x, int k) const {
    check_input(x);
    check_class(k);
    // The max-|z| statistic is differentiable wherever the maximum is unique;
    // ties resolve to the first position in row-major order.
    std::size_t best = 0;
    double max_abs = -1.0;
    auto data = x.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double a = std::abs(data[i]);
        if (a > max_abs) {
            max_abs = a;
            best = i;
        }
    }
    const double z = max_abs / noise_sigma_;
    const double p1 = sigmoid((z - spike_threshold_) / softness_);
    const double sgn = data[best] >= 0.0 ? 1.0 : -1.0;
    double d = p1 * (1.0 - p1) * sgn / (softness_ * noise_sigma_);
    if (k == 0) d = -d;
    Matrix g(x.rows(), x.cols(), 0.0);
    g.data()[best] = d;
    return g;
}

LinearSoftmaxClassifier::LinearSoftmaxClassifier(int num_classes, Shape shape) : shape_(shape) {
    if (num_classes < 2) throw InvalidSpecError("linear softmax: needs at least 2 classes");
    if (shape.channels < 1 || shape.timesteps < 1)
        throw InvalidSpecError("linear softmax: bad input shape");
    weights_.assign(num_classes, Matrix(shape.channels, shape.timesteps, 0.0));
    bias_.assign(num_classes, 0.0);
}

LinearSoftmaxClassifier LinearSoftmaxClassifier::random_init(int num_classes, Shape shape,
                                                             double weight_std,
                                                             std::uint64_t seed) {
    LinearSoftmaxClassifier clf(num_classes, shape);
    Rng rng(seed);
    for (auto& w : clf.weights_)
        for (double& v : w.data()) v = rng.gaussian() * weight_std;
    return clf;
}

void LinearSoftmaxClassifier::set_parameters(std::vector<Matrix> weights,
                                             std::vector<double> bias) {
    if (weights.size() < 2 || weights.size() != bias.size())
        throw InvalidInputError("linear softmax: inconsistent parameters");
    for (const auto& w : weights)
        if (w.rows() != shape_.channels || w.cols() != shape_.timesteps)
            throw InvalidInputError("linear softmax: weight shape mismatch");
    weights_ = std::move(weights);
    bias_ = std::move(bias);
}

std::vector<double> LinearSoftmaxClassifier::logits(const Matrix& x) const {
    std::vector<double> z(weights_.size());
    auto xv = x.data();
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        auto wv = weights_[k].data();
        double acc = bias_[k];
        for (std::size_t i = 0; i < xv.size(); ++i) acc += wv[i] * xv[i];
        z[k] = acc;
    }
    return z;
}

std::vector<double> LinearSoftmaxClassifier::score(const Matrix& x) const {
    check_input(x);
    return softmax(logits(x));
}

Matrix LinearSoftmaxClassifier::gradient(const Matrix& x, int k) const {
    check_input(x);
    check_class(k);
    const auto p = softmax(logits(x));
    // d softmax_k / d x = p_k * (W_k - sum_j p_j W_j)
    Matrix g(x.rows(), x.cols(), 0.0);
    auto gv = g.data();
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        auto wv = weights_[j].data();
        const double coeff = (static_cast<int>(j) == k) ? p[k] * (1.0 - p[k]) : -p[k] * p[j];
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += coeff * wv[i];
    }
    return g;
}

double LinearSoftmaxClassifier::mean_cross_entropy(const Dataset& d) const {
    double loss = 0.0;
    for (const auto& s : d.samples()) {
        if (!s.label()) throw InvalidInputError("cross entropy: unlabeled sample");
        const auto p = score(s.values());
        loss += -std::log(std::max(p[*s.label()], 1e-300));
    }
    return loss / static_cast<double>(d.size());
}

double LinearSoftmaxClassifier::accuracy(const Dataset& d) const {
    std::size_t hits = 0;
    for (const auto& s : d.samples()) {
        if (!s.label()) throw InvalidInputError("accuracy: unlabeled sample");
        if (predict_class(*this, s.values()) == *s.label()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.size());
}

TrainReport train_linear_softmax(LinearSoftmaxClassifier& clf, const Dataset& train,
                                 const Dataset& valid, std::uint64_t seed,
                                 const TrainConfig& cfg) {
    if (train.channels() != clf.shape_.channels || train.timesteps() != clf.shape_.timesteps ||
        valid.channels() != clf.shape_.channels || valid.timesteps() != clf.shape_.timesteps)
        throw InvalidInputError("train: dataset shape mismatch");
    if (train.num_classes() > clf.num_classes())
        throw InvalidInputError("train: more classes than the classifier supports");

    const std::size_t n = train.size();
    const auto num_classes = static_cast<std::size_t>(clf.num_classes());
    const std::size_t dim = clf.shape_.channels * clf.shape_.timesteps;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Matrix> grad_w(num_classes, Matrix(clf.shape_.channels, clf.shape_.timesteps));
    std::vector<double> grad_b(num_classes);

    const Rng root(seed);
    double lr = cfg.initial_lr;
    double best = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;
    int halvings_since_improve = 0;

    TrainReport report;
    report.final_lr = lr;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffle_rng = root.child(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_below(i)]);

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            for (auto& g : grad_w) std::fill(g.data().begin(), g.data().end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const auto& s = train.samples()[order[i]];
                if (!s.label()) throw InvalidInputError("train: unlabeled sample");
                const auto p = softmax(clf.logits(s.values()));
                auto xv = s.values().data();
                for (std::size_t k = 0; k < num_classes; ++k) {
                    const double err = p[k] - (static_cast<int>(k) == *s.label() ? 1.0 : 0.0);
                    auto gv = grad_w[k].data();
                    for (std::size_t j = 0; j < dim; ++j) gv[j] += err * xv[j];
                    grad_b[k] += err;
                }
            }
            const double scale = lr / static_cast<double>(end - start);
            for (std::size_t k = 0; k < num_classes; ++k) {
                auto wv = clf.weights_[k].data();
                auto gv = grad_w[k].data();
                for (std::size_t j = 0; j < dim; ++j) wv[j] -= scale * gv[j];
                clf.bias_[k] -= scale * grad_b[k];
            }
        }

        report.epochs_run = epoch + 1;
        const double valid_loss = clf.mean_cross_entropy(valid);
        if (valid_loss < best - cfg.plateau_min_delta) {
            best = valid_loss;
            stale_epochs = 0;
            halvings_since_improve = 0;
        } else {
            if (++stale_epochs >= cfg.plateau_patience) {
                lr *= 0.5;
                stale_epochs = 0;
                ++report.halvings;
                if (++halvings_since_improve >= cfg.max_halvings) break;
            }
        }
    }

    report.final_lr = lr;
    report.best_valid_loss = best;
    report.valid_accuracy = clf.accuracy(valid);
    return report;
}

int predict_class(const Classifier& clf, const Matrix& x) {
    const auto p = clf.score(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best]) best = k;
    return static_cast<int>(best);
}

}  // namespace treise
