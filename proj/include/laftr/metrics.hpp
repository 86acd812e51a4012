#pragma once

// Evaluation-time fairness quantities: test discrepancy and statistical
// distance on discrete distribution pairs, the three group-fairness gaps of a
// hard classifier, RBF-kernel MMD, and the sensitive-attribute probe.

#include "laftr/classifier.hpp"
#include "laftr/nn.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace laftr::metrics {

struct PredictionRecord {
    int prediction = 0;  // hard y-hat
    int label = 0;
    int group = 0;
};

std::vector<PredictionRecord> make_records(std::span<const int> predictions, std::span<const int> labels,
                                           std::span<const int> groups);

/// Two probability vectors over one shared finite support.
class DiscreteDistributionPair {
public:
    /// Throws InputError unless both vectors are nonnegative, equally long
    /// and sum to 1 within 1e-12.
    DiscreteDistributionPair(std::vector<double> p0, std::vector<double> p1);

    std::size_t support_size() const { return p0_.size(); }
    const std::vector<double>& p0() const { return p0_; }
    const std::vector<double>& p1() const { return p1_; }

private:
    std::vector<double> p0_;
    std::vector<double> p1_;
};

/// |E_p0[mu] - E_p1[mu]| for a binary test `mu` over the support.
double test_discrepancy(const DiscreteDistributionPair& pair, std::span<const int> mu);

/// Half the l1 distance between the two probability vectors.
double total_variation(const DiscreteDistributionPair& pair);

inline constexpr std::size_t kMaxEnumerationSupport = 24;

struct StatisticalDistance {
    double value = 0.0;
    std::vector<int> argmax_test;
};

/// Maximum test discrepancy over all 2^k binary tests, by enumeration.
/// Cross-checked against total_variation (InternalStateError beyond 1e-12);
/// supports larger than kMaxEnumerationSupport are rejected.
StatisticalDistance statistical_distance(const DiscreteDistributionPair& pair);

double delta_dp(std::span<const PredictionRecord> records);
double delta_eo(std::span<const PredictionRecord> records);
double delta_eopp(std::span<const PredictionRecord> records);

/// Unbiased MMD^2 with kernel exp(-|u-v|^2 / (2 sigma^2)). Within-sample
/// sums skip the diagonal. With equal sample counts the paired cross terms
/// k(x_i, y_i) are skipped as well, so identical inputs give exactly 0.
double mmd_rbf(const nn::Matrix& samples0, const nn::Matrix& samples1, double sigma);

struct AdversarialProbeConfig {
    ProbeConfig probe{};
    double test_fraction = 0.3;
    std::uint64_t seed = 0;
};

struct AdversarialProbeResult {
    double accuracy = 0.0;
    bool degenerate = false;  // single-class A: majority accuracy returned
};

/// Held-out accuracy of a fresh probe predicting A from representations.
AdversarialProbeResult adversarial_accuracy_probe(const nn::Matrix& representations, std::span<const int> sensitive,
                                                  const AdversarialProbeConfig& config);

struct FairnessReport {
    double accuracy = 0.0;
    double delta_dp = 0.0;
    double delta_eo = 0.0;
    double delta_eopp = 0.0;
    std::optional<double> mmd;
    std::optional<double> adv_acc;

    nlohmann::json to_json() const;
    static FairnessReport from_json(const nlohmann::json& j);
};

/// Accuracy and the three gaps for hard predictions.
FairnessReport classification_report(std::span<const int> predictions, std::span<const int> labels,
                                      std::span<const int> groups);

}  // namespace laftr::metrics
