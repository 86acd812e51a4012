#pragma once

// Min-max training of the encoder/classifier/decoder block against the
// adversary on the weighted objective
//
//   L = alpha * L_C(g(f(x)), y) + beta * L_Dec(k(f(x), a), x) + gamma * L_Adv(h(f(x)[, y]), a)
//
// Each minibatch takes one Adam descent step on (f, g, k) with h frozen, then
// one Adam ascent step on L_Adv for h using the updated encoder.

#include "laftr/data.hpp"
#include "laftr/nn.hpp"
#include "laftr/objectives.hpp"
#include "laftr/representation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace laftr::training {

/// What the adversary observes: the representation (plus y for EO/EOpp), or
/// only the soft classifier output and the label.
enum class AdversaryInput { Representation, PredictionAndLabel };

/// The gamma-weighted term: an adversary objective, or the soft equalized
/// odds gap of the classifier output (no adversary is trained then).
enum class FairnessTerm { Adversary, SoftEqualizedOdds };

struct TrainConfig {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;
    objectives::AdvObjectiveKind objective = objectives::AdvObjectiveKind::DP;
    AdversaryInput adversary_input = AdversaryInput::Representation;
    FairnessTerm fairness_term = FairnessTerm::Adversary;
    std::size_t epochs = 1000;
    std::size_t batch_size = 64;
    nn::AdamSettings adam{};
    std::size_t checkpoint_interval = 50;
    std::size_t hidden_width = 8;
    std::size_t representation_width = 8;
    bool append_sensitive = true;
    std::uint64_t seed = 0;

    void validate() const;
    /// Stable text form; its hash is the config fingerprint.
    std::string canonical() const;
    std::string fingerprint() const;
};

struct LaftrModel {
    nn::MlpNetwork encoder;     // f: input -> m
    nn::MlpNetwork classifier;  // g: m -> 1, sigmoid
    nn::MlpNetwork adversary;   // h: m[+1] or 2 -> 1, sigmoid
    std::optional<nn::MlpNetwork> decoder;  // k: m+1 -> d, present iff beta > 0
    InputEncoding input;
    AdversaryInput adversary_input = AdversaryInput::Representation;
    bool adversary_sees_label = false;

    static LaftrModel initialize(const TrainConfig& config, const data::GroupedDataset& train, std::mt19937_64& rng);

    std::size_t representation_width() const { return encoder.output_width(); }
    nn::Matrix encode(const data::GroupedDataset& ds) const { return encoder.forward(input.apply(ds)); }
    RepresentationPtr representation(std::string name = "encoder") const;
    /// Throws InputError if the four networks disagree on widths.
    void check_consistency(std::size_t feature_width) const;
};

/// One minibatch in the form every network consumes.
struct Batch {
    nn::Matrix encoder_input;  // X [| A]
    nn::Matrix features;       // reconstruction target X
    std::vector<int> labels;
    std::vector<int> sensitive;

    static Batch from(const data::GroupedDataset& ds, const InputEncoding& input);
    Batch rows(std::span<const std::size_t> indices) const;
    std::size_t size() const { return labels.size(); }
};

struct LossTerms {
    double classification = 0.0;
    double reconstruction = 0.0;
    double adversarial = 0.0;
    double total = 0.0;
};

LossTerms combined_loss(const LaftrModel& model, const Batch& batch, const TrainConfig& config);

/// Gradients of the combined loss with respect to every network.
struct ModelGradients {
    LossTerms loss;
    std::vector<nn::DenseLayer> encoder;
    std::vector<nn::DenseLayer> classifier;
    std::vector<nn::DenseLayer> adversary;
    std::vector<nn::DenseLayer> decoder;
};

ModelGradients combined_loss_gradients(const LaftrModel& model, const Batch& batch, const TrainConfig& config);

/// Value of the adversary's own objective (unweighted) on a batch.
double adversary_objective(const LaftrModel& model, const Batch& batch, const TrainConfig& config);

/// Gradient of the adversary's own objective with respect to h.
std::vector<nn::DenseLayer> adversary_objective_gradient(const LaftrModel& model, const Batch& batch,
                                                         const TrainConfig& config);

struct OptimizerStates {
    nn::AdamState encoder;
    nn::AdamState classifier;
    nn::AdamState decoder;
    nn::AdamState adversary;

    static OptimizerStates for_model(const LaftrModel& model, const nn::AdamSettings& settings);
};

/// Descent on (f, g, k) with h fixed, then ascent on h with (f, g, k) fixed.
/// Returns the loss terms evaluated before the descent step.
LossTerms train_step(LaftrModel& model, const Batch& batch, const TrainConfig& config, OptimizerStates& states);

/// Minibatch index lists for one epoch. Rows are shuffled within each cell
/// the objective needs (groups for DP, group x label cells for EO, EOpp and
/// the soft-EO regularizer) and dealt evenly across batches; a cell smaller
/// than the batch count is cycled so that every batch sees it.
std::vector<std::vector<std::size_t>> stratified_batches(const data::CellPartition& cells, std::size_t n,
                                                         std::size_t batch_size, const TrainConfig& config,
                                                         std::mt19937_64& rng);

struct Checkpoint {
    std::size_t epoch = 0;
    LaftrModel model;
    std::string config_fingerprint;
    std::string rng_state;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct EpochLoss {
    std::size_t epoch = 0;  // 1-based
    LossTerms mean;
};

/// `provenance` becomes the leading '#' line.
std::string loss_log_csv(const std::vector<EpochLoss>& log, const std::string& provenance);

struct FitResult {
    LaftrModel model;
    std::vector<Checkpoint> checkpoints;
    std::vector<EpochLoss> losses;
};

struct FitOutputs {
    std::optional<std::filesystem::path> checkpoint_dir;
    std::optional<std::filesystem::path> loss_log;
    /// Loss log preamble; defaults to the training config fingerprint.
    std::string provenance;
};

/// Full training run on `train`. Checkpoints are taken at epoch 0, every
/// checkpoint_interval epochs and at the final epoch.
FitResult fit(const data::GroupedDataset& train, const TrainConfig& config, const FitOutputs& outputs = {});

}  // namespace laftr::training
