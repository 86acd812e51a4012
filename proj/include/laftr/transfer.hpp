#pragma once

// Few-shot transfer: representations learned on the original task are frozen
// and probed on held-out transfer tasks Y'.

#include "laftr/classifier.hpp"
#include "laftr/data.hpp"
#include "laftr/metrics.hpp"
#include "laftr/representation.hpp"
#include "laftr/trainer.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace laftr::transfer {

enum class ReprLearnerKind { Laftr, TransferUnfair, TransferFair, TransferYAdv, TargetUnfair };

struct LearnerSpec {
    ReprLearnerKind kind = ReprLearnerKind::Laftr;
    /// Transfer-Y-Adv only: adds the reconstruction term with weight 1.
    bool with_decoder = false;

    std::string name() const;
    static LearnerSpec parse(const std::string& text);
};

/// Pseudo-task name that probes the original label Y.
inline constexpr const char* kOriginalTask = "y";

struct TransferConfig {
    training::TrainConfig base{};  // widths, epochs, optimizer, seed
    ProbeConfig probe{};
    std::size_t r = 7;
    std::size_t audit_rows = 1000;  // per group, for the MMD
    std::size_t jobs = 1;
};

/// Objective weights and adversary wiring for a learner kind.
training::TrainConfig learner_config(const LearnerSpec& spec, const training::TrainConfig& base);

struct ReprLearner {
    std::string name;
    RepresentationPtr representation;
    /// Probe hidden width override (Target-Unfair uses the encoder width).
    std::optional<std::size_t> probe_hidden;
    bool is_baseline = false;
};

/// Trains the learner on splits.train (original labels). Target-Unfair
/// trains nothing and exposes the raw encoder input.
ReprLearner build_repr_learner(const LearnerSpec& spec, const data::DataSplits& splits, const TransferConfig& config);

struct TaskResult {
    std::string learner;
    std::string task;
    double error = 0.0;     // median over r probes
    double delta_eo = 0.0;  // median over r probes
    std::optional<double> rel_error;
    std::optional<double> rel_delta_eo;
    bool failed = false;
    std::string failure;
};

struct LearnerSummary {
    std::string learner;
    double mean_error = 0.0;
    double mean_delta_eo = 0.0;
    std::optional<double> mean_rel_error;
    std::optional<double> mean_rel_delta_eo;
    std::size_t tasks = 0;
    std::optional<double> mmd;
    std::optional<double> adv_acc;
};

struct TransferReport {
    std::vector<TaskResult> rows;
    std::vector<LearnerSummary> learners;

    std::string to_csv(const std::string& provenance) const;
    nlohmann::json to_json() const;
};

/// Labels for a task name: kOriginalTask or a transfer task.
data::GroupedDataset task_view(const data::GroupedDataset& ds, const std::string& task);

/// Probes every learner on every task: fit on transfer_train, evaluate on
/// transfer_test. Relative differences are (v - base) / base against the
/// learner flagged is_baseline, undefined when base is 0.
TransferReport run_transfer_suite(const std::vector<ReprLearner>& learners, const data::DataSplits& splits,
                                  const std::vector<std::string>& tasks, const TransferConfig& config);

struct AuditResult {
    double mmd = 0.0;
    double adv_acc = 0.0;
    bool degenerate = false;
};

/// Group MMD (sigma = 1, at most `max_rows` per group) and held-out accuracy
/// of a fresh probe for A, both on repr(ds).
AuditResult representation_audit(const Representation& repr, const data::GroupedDataset& ds, std::size_t max_rows,
                                 const ProbeConfig& probe, std::uint64_t seed);

}  // namespace laftr::transfer
