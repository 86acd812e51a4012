#include "laftr/classifier.hpp"

#include "laftr/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace laftr {

void ProbeConfig::validate() const {
    if (patience < 1) {
        throw InputError("probe patience must be at least 1");
    }
    if (batch_size < 1) {
        throw InputError("probe batch size must be at least 1");
    }
}

std::size_t ProbeConfig::hidden_for(std::size_t input_width) const {
    if (hidden_width > 0) {
        return hidden_width;
    }
    return std::max<std::size_t>(1, input_width / 2);
}

nn::Vector TrainedClassifier::predict_proba(const nn::Matrix& inputs) const {
    return network.forward(inputs).col(0);
}

std::vector<int> TrainedClassifier::predict(const nn::Matrix& inputs, double threshold) const {
    const nn::Vector p = predict_proba(inputs);
    std::vector<int> out(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        out[static_cast<std::size_t>(i)] = p(i) >= threshold ? 1 : 0;
    }
    return out;
}

TrainedClassifier train_classifier(const nn::Matrix& inputs, std::span<const int> targets,
                                   const ProbeConfig& config, std::uint64_t seed) {
    config.validate();
    const auto n = static_cast<std::size_t>(inputs.rows());
    if (n == 0 || targets.size() != n) {
        throw InputError("classifier needs a nonempty input matching the target length");
    }
    std::mt19937_64 rng(seed);
    const auto width = static_cast<std::size_t>(inputs.cols());
    TrainedClassifier out{nn::MlpNetwork({width, config.hidden_for(width), 1}, nn::OutputActivation::Sigmoid, rng),
                          0, 0.0};
    nn::AdamState adam(out.network, config.adam, "probe");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const auto stop = std::min(n, start + config.batch_size);
            const auto rows = static_cast<Eigen::Index>(stop - start);
            nn::Matrix x(rows, inputs.cols());
            nn::Matrix t(rows, 1);
            for (std::size_t i = start; i < stop; ++i) {
                const auto r = static_cast<Eigen::Index>(i - start);
                x.row(r) = inputs.row(static_cast<Eigen::Index>(order[i]));
                t(r, 0) = targets[order[i]];
            }
            const auto trace = out.network.forward_trace(x);
            total += nn::loss_value(nn::LossKind::CrossEntropy, trace.output, t) * static_cast<double>(rows);
            const auto grads = out.network.backward(
                trace, nn::loss_gradient(nn::LossKind::CrossEntropy, trace.output, t));
            nn::adam_step(out.network, grads.layers, adam);
        }
        out.epochs_run = epoch + 1;
        out.final_train_loss = total / static_cast<double>(n);
        if (out.final_train_loss < best) {
            best = out.final_train_loss;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }
    return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> targets) {
    if (predictions.size() != targets.size() || predictions.empty()) {
        throw InputError("accuracy needs equal-length, nonempty vectors");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        hits += predictions[i] == targets[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace laftr
