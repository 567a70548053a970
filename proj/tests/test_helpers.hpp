#pragma once

#include <initializer_list>
#include <vector>

#include "treise/classifiers.hpp"
#include "treise/core.hpp"
#include "treise/rng.hpp"

namespace treise::testing {

inline Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double sigma = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.gaussian() * sigma;
    return m;
}

/// Fixed output regardless of input; gradients are identically zero.
class ConstantClassifier final : public Classifier {
public:
    ConstantClassifier(Shape shape, std::vector<double> probs)
        : shape_(shape), probs_(std::move(probs)) {}

    int num_classes() const override { return static_cast<int>(probs_.size()); }
    Shape input_shape() const override { return shape_; }
    bool has_gradients() const override { return true; }
    std::vector<double> score(const Matrix& x) const override {
        check_input(x);
        return probs_;
    }
    Matrix gradient(const Matrix& x, int k) const override {
        check_input(x);
        check_class(k);
        return Matrix(x.rows(), x.cols(), 0.0);
    }

private:
    Shape shape_;
    std::vector<double> probs_;
};

/// Exactly linear class-0 response P0 = a + <w, x>, P1 = 1 - P0. Unclamped on
/// purpose: a test stub for identities that need perfect linearity.
class LinearProbStub final : public Classifier {
public:
    LinearProbStub(Matrix w, double a) : w_(std::move(w)), a_(a) {}

    int num_classes() const override { return 2; }
    Shape input_shape() const override { return {w_.rows(), w_.cols()}; }
    bool has_gradients() const override { return true; }
    std::vector<double> score(const Matrix& x) const override {
        double p = a_;
        for (std::size_t i = 0; i < x.size(); ++i) p += w_.data()[i] * x.data()[i];
        return {p, 1.0 - p};
    }
    Matrix gradient(const Matrix& x, int k) const override {
        check_class(k);
        Matrix g = w_;
        if (k == 1)
            for (double& v : g.data()) v = -v;
        (void)x;
        return g;
    }

private:
    Matrix w_;
    double a_;
};

/// Class-0 response linear in the *keep mask*: reconstructs the mask by
/// comparing the input against a reference sample (whose entries must differ
/// from the replacement baseline) and returns a + sum(b .* mask).
class MaskResponseStub final : public Classifier {
public:
    MaskResponseStub(Matrix reference, Matrix coefficients, double intercept)
        : reference_(std::move(reference)),
          coefficients_(std::move(coefficients)),
          intercept_(intercept) {}

    int num_classes() const override { return 2; }
    Shape input_shape() const override { return {reference_.rows(), reference_.cols()}; }
    std::vector<double> score(const Matrix& x) const override {
        double p = intercept_;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x.data()[i] == reference_.data()[i]) p += coefficients_.data()[i];
        return {p, 1.0 - p};
    }

private:
    Matrix reference_;
    Matrix coefficients_;
    double intercept_;
};

/// Class-0 response = fraction of entries still equal to the reference.
class FractionKeptStub final : public Classifier {
public:
    explicit FractionKeptStub(Matrix reference) : reference_(std::move(reference)) {}

    int num_classes() const override { return 2; }
    Shape input_shape() const override { return {reference_.rows(), reference_.cols()}; }
    std::vector<double> score(const Matrix& x) const override {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x.data()[i] == reference_.data()[i]) ++kept;
        const double p = static_cast<double>(kept) / static_cast<double>(x.size());
        return {p, 1.0 - p};
    }

private:
    Matrix reference_;
};

/// No gradient capability at all.
class ScoresOnlyStub final : public Classifier {
public:
    explicit ScoresOnlyStub(Shape shape) : shape_(shape) {}
    int num_classes() const override { return 2; }
    Shape input_shape() const override { return shape_; }
    std::vector<double> score(const Matrix&) const override { return {0.5, 0.5}; }

private:
    Shape shape_;
};

}  // namespace treise::testing
