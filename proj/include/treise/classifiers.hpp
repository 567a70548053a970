#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treise/core.hpp"

namespace treise {

struct Shape {
    std::size_t channels = 0;
    std::size_t timesteps = 0;
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Black-box scoring contract. score() returns a probability vector (K
/// nonnegative entries summing to 1) and must be deterministic. score and
/// gradient are read-only and safe to call concurrently.
///
/// This single batched entry point is also the plugin seam: wrapping an
/// external process only requires implementing score_batch.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual int num_classes() const = 0;
    virtual Shape input_shape() const = 0;
    virtual bool has_gradients() const { return false; }

    virtual std::vector<double> score(const Matrix& x) const = 0;

    /// Elementwise equal to score(); exists so engines can amortize dispatch.
    virtual std::vector<std::vector<double>> score_batch(std::span<const Matrix> xs) const {
        std::vector<std::vector<double>> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(score(x));
        return out;
    }

    /// d P_k(x) / d x. Throws UnsupportedOperationError unless has_gradients().
    virtual Matrix gradient(const Matrix& x, int k) const;

protected:
    void check_input(const Matrix& x) const;
    void check_class(int k) const;
};

/// Analytic classifier for the synthetic anomaly data. P(anomalous) is a
/// sigmoid in the sample's maximum absolute z-score:
///   P1 = sigmoid((max|x|/noise_sigma - spike_threshold) / softness)
/// Smooth by construction, so deletion/insertion curves are informative
/// instead of step functions. Class 1 is "anomalous".
class OracleAnomalyClassifier final : public Classifier {
public:
    OracleAnomalyClassifier(Shape shape, double spike_threshold = 4.0, double softness = 1.0,
                            double noise_sigma = 1.0);

    int num_classes() const override { return 2; }
    Shape input_shape() const override { return shape_; }
    bool has_gradients() const override { return true; }
    std::vector<double> score(const Matrix& x) const override;
    Matrix gradient(const Matrix& x, int k) const override;

    double spike_threshold() const noexcept { return spike_threshold_; }
    double softness() const noexcept { return softness_; }

private:
    Shape shape_;
    double spike_threshold_;
    double softness_;
    double noise_sigma_;
};

struct TrainConfig {
    double initial_lr = 0.01;
    int max_epochs = 100;
    int batch_size = 32;
    // No validation-loss improvement beyond this for patience epochs halves
    // the learning rate; after max_halvings halvings without any improvement
    // training stops early.
    double plateau_min_delta = 1e-4;
    int plateau_patience = 5;
    int max_halvings = 3;
};

struct TrainReport {
    int epochs_run = 0;
    int halvings = 0;
    double final_lr = 0.0;
    double best_valid_loss = 0.0;
    double valid_accuracy = 0.0;
};

/// softmax(W x + b) over flattened inputs, with analytic gradients.
class LinearSoftmaxClassifier final : public Classifier {
public:
    LinearSoftmaxClassifier(int num_classes, Shape shape);  // zero-initialized

    static LinearSoftmaxClassifier random_init(int num_classes, Shape shape, double weight_std,
                                               std::uint64_t seed);

    int num_classes() const override { return static_cast<int>(weights_.size()); }
    Shape input_shape() const override { return shape_; }
    bool has_gradients() const override { return true; }
    std::vector<double> score(const Matrix& x) const override;
    Matrix gradient(const Matrix& x, int k) const override;

    const std::vector<Matrix>& weights() const noexcept { return weights_; }
    const std::vector<double>& bias() const noexcept { return bias_; }
    void set_parameters(std::vector<Matrix> weights, std::vector<double> bias);

    double mean_cross_entropy(const Dataset& d) const;
    double accuracy(const Dataset& d) const;

private:
    friend TrainReport train_linear_softmax(LinearSoftmaxClassifier&, const Dataset&,
                                            const Dataset&, std::uint64_t, const TrainConfig&);
    std::vector<double> logits(const Matrix& x) const;

    Shape shape_;
    std::vector<Matrix> weights_;  // one (C,T) block per class
    std::vector<double> bias_;
};

/// Minibatch SGD with cross-entropy loss, plateau halving and early stopping.
/// Deterministic given the seed (shuffling uses split streams). Training is
/// exclusive: single writer, no concurrent score calls while running.
TrainReport train_linear_softmax(LinearSoftmaxClassifier& clf, const Dataset& train,
                                 const Dataset& valid, std::uint64_t seed,
                                 const TrainConfig& cfg = {});

/// Predicted class of x: argmax of score, ties resolved to the lowest index.
int predict_class(const Classifier& clf, const Matrix& x);

}  // namespace treise
