#pragma once

#include "laftr/data.hpp"
#include "laftr/nn.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace test_support {

using laftr::nn::Matrix;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

inline std::vector<int> random_bits(std::size_t n, std::mt19937_64& rng, double p = 0.5) {
    std::bernoulli_distribution coin(p);
    std::vector<int> out(n);
    for (auto& v : out) {
        v = coin(rng) ? 1 : 0;
    }
    return out;
}

/// Relative error with an absolute floor, as used by every gradient check.
inline bool gradient_close(double analytic, double numeric, double rel = 1e-4, double floor = 1e-7) {
    const double diff = std::abs(analytic - numeric);
    return diff <= floor || diff <= rel * std::max(std::abs(analytic), std::abs(numeric));
}

/// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t i, double step = 1e-5) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    return (up - down) / (2.0 * step);
}

/// Small dataset with every (a, y) cell populated.
inline laftr::data::GroupedDataset tiny_dataset(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    laftr::data::GroupedDataset ds;
    ds.features = random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), rng);
    ds.labels.resize(n);
    ds.sensitive.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = static_cast<int>(i % 2);
        ds.sensitive[i] = static_cast<int>((i / 2) % 2);
    }
    for (std::size_t j = 0; j < d; ++j) {
        ds.continuous_columns.push_back(j);
    }
    return ds;
}

/// Full-batch logistic regression, used as an independent linear probe.
/// Returns training-set accuracy on `x` (rows) against binary `t`.
inline double logistic_probe_accuracy(const Matrix& x, const std::vector<int>& t, int iterations = 300,
                                      double rate = 0.5) {
    const auto n = x.rows();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0.0;
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        target(i) = t[static_cast<std::size_t>(i)];
    }
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd z = (x * w).array() + b;
        const Eigen::VectorXd p = (1.0 / (1.0 + (-z.array()).exp())).matrix();
        const Eigen::VectorXd r = p - target;
        w -= rate * (x.transpose() * r) / static_cast<double>(n);
        b -= rate * r.mean();
    }
    const Eigen::VectorXd z = (x * w).array() + b;
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        correct += (z(i) > 0.0 ? 1 : 0) == t[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace test_support
