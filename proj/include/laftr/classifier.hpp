#pragma once

// Unconstrained single-hidden-layer classifier used for every downstream
// probe: naive classifiers on frozen representations, the sensitive-attribute
// probe, and direct-on-data baselines.

#include "laftr/nn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace laftr {

struct ProbeConfig {
    /// 0 selects half the input (representation) width, at least 1.
    std::size_t hidden_width = 0;
    std::size_t max_epochs = 1000;
    /// Stop once the epoch training loss has not reduced for this many epochs.
    std::size_t patience = 20;
    std::size_t batch_size = 64;
    nn::AdamSettings adam{};
    double threshold = 0.5;

    void validate() const;
    std::size_t hidden_for(std::size_t input_width) const;
};

struct TrainedClassifier {
    nn::MlpNetwork network;
    std::size_t epochs_run = 0;
    double final_train_loss = 0.0;

    nn::Vector predict_proba(const nn::Matrix& inputs) const;
    std::vector<int> predict(const nn::Matrix& inputs, double threshold) const;
};

/// Cross-entropy training with shuffled minibatches and early stopping on the
/// training loss.
TrainedClassifier train_classifier(const nn::Matrix& inputs, std::span<const int> targets,
                                   const ProbeConfig& config, std::uint64_t seed);

double accuracy(std::span<const int> predictions, std::span<const int> targets);

}  // namespace laftr
