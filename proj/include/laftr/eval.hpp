#pragma once

// Freeze-and-probe evaluation of learned representations, checkpoint
// selection by median validation (error + unfairness), and the fairness
// coefficient sweep with its accuracy/unfairness Pareto front.

#include "laftr/classifier.hpp"
#include "laftr/data.hpp"
#include "laftr/metrics.hpp"
#include "laftr/representation.hpp"
#include "laftr/trainer.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace laftr::eval {

enum class FairnessMetric { DP, EO, EOpp };

/// The gap matching a training objective (the cross-entropy adversary targets DP).
FairnessMetric metric_for(objectives::AdvObjectiveKind kind);
const char* to_string(FairnessMetric metric);
double delta_of(const metrics::FairnessReport& report, FairnessMetric metric);

double median(std::vector<double> values);

struct ProbeResult {
    TrainedClassifier classifier;
    metrics::FairnessReport report;
};

/// Trains an unconstrained probe on repr(train) -> train.labels and reports
/// hard-prediction metrics on `test`. `repr` is only read.
ProbeResult probe_train(const Representation& repr, const data::GroupedDataset& train,
                        const data::GroupedDataset& test, const ProbeConfig& config, std::uint64_t seed);

struct CheckpointScore {
    std::size_t epoch = 0;
    std::vector<double> scores;  // error + delta per successful probe seed
    double median = 0.0;
};

/// Index of the score with the lowest median; ties go to the earliest epoch.
/// Entries without scores are skipped; SelectionError if none remain.
std::size_t select_by_scores(std::span<const CheckpointScore> scores);

struct Selection {
    std::size_t index = 0;  // into the checkpoint list
    std::size_t epoch = 0;
    std::vector<CheckpointScore> scores;
};

/// For every checkpoint, trains `r` probes (seeds base_seed .. base_seed+r-1)
/// on `train` and scores them on `validation`.
Selection select_model(std::span<const training::Checkpoint> checkpoints, const data::GroupedDataset& train,
                       const data::GroupedDataset& validation, std::size_t r, FairnessMetric metric,
                       const ProbeConfig& probe, std::uint64_t base_seed);

/// Indices of the points not dominated under (higher accuracy, lower delta),
/// ordered by accuracy descending then index. Exact duplicates are all kept.
std::vector<std::size_t> pareto_front(std::span<const std::pair<double, double>> accuracy_delta);

/// Eight log-spaced values in [0.1, 4].
std::vector<double> default_gamma_grid();

struct SweepConfig {
    std::vector<double> gammas = default_gamma_grid();
    training::TrainConfig train{};
    ProbeConfig probe{};
    std::size_t r = 7;
    std::size_t jobs = 1;
};

struct SweepRecord {
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::size_t checkpoint_epoch = 0;
    std::string phase;  // "validation" or "test"
    metrics::FairnessReport report;
};

struct SweepSummary {
    double gamma = 0.0;
    std::size_t checkpoint_epoch = 0;
    double accuracy = 0.0;  // medians over the r test probes
    double delta_dp = 0.0;
    double delta_eo = 0.0;
    double delta_eopp = 0.0;
    double delta = 0.0;  // the metric matching the objective
    bool failed = false;
    std::string failure;
};

struct SweepResult {
    std::string objective;
    std::string metric;
    std::vector<SweepRecord> records;
    std::vector<SweepSummary> summaries;  // one per gamma, in input order
    std::vector<std::size_t> front;       // indices into summaries
    std::size_t failures = 0;
};

/// Per gamma: fit on splits.train, choose a checkpoint with validation
/// probes, then train r fresh probes on transfer_train and evaluate them on
/// transfer_test (both unseen during representation learning).
SweepResult sweep(const data::DataSplits& splits, const SweepConfig& config);

std::string sweep_csv(const SweepResult& result, const std::string& provenance);
nlohmann::json sweep_json(const SweepResult& result);
/// x = delta, y = accuracy, series = objective kind.
std::string sweep_plot_csv(const SweepResult& result, const std::string& provenance);

}  // namespace laftr::eval
