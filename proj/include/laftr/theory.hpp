#pragma once

// Exhaustive checks of the adversarial upper bounds on small discrete
// representation spaces, and the imbalanced two-point example on which the
// cross-entropy adversary fails to detect unfairness.

#include "laftr/metrics.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace laftr::theory {

inline constexpr std::size_t kMaxDpSupport = 20;
inline constexpr std::size_t kMaxEoSupport = 12;

/// Joint table over a finite Z support and A (and optionally Y).
class DiscreteScenario {
public:
    using JointZA = std::vector<std::array<double, 2>>;                     // [z][a]
    using JointZAY = std::vector<std::array<std::array<double, 2>, 2>>;      // [z][a][y]

    /// InputError unless the table is nonnegative, sums to 1 within 1e-12 and
    /// every conditional (each group, and each group-label cell) has mass.
    static DiscreteScenario from_joint(const JointZA& p);
    static DiscreteScenario from_labeled_joint(const JointZAY& p);

    /// Random table on k atoms; every conditional has mass at least ~1e-3.
    static DiscreteScenario random(std::size_t k, bool labeled, std::mt19937_64& rng);

    std::size_t support_size() const { return p_.size(); }
    bool labeled() const { return labeled_; }
    double mass(std::size_t z, int a, int y) const { return p_[z][a][y]; }
    double mass(std::size_t z, int a) const { return p_[z][a][0] + p_[z][a][1]; }

    /// p(Z | A=a)
    const std::vector<double>& group(int a) const { return group_[a]; }
    /// p(Z | A=a, Y=y); labeled scenarios only.
    const std::vector<double>& cell(int a, int y) const;

    metrics::DiscreteDistributionPair groups() const { return {group_[0], group_[1]}; }
    metrics::DiscreteDistributionPair cells(int y) const { return {cell(0, y), cell(1, y)}; }

    /// Same scenario with atom z moved to position perm[z].
    DiscreteScenario permuted(std::span<const std::size_t> perm) const;

private:
    DiscreteScenario() = default;
    void derive();

    std::vector<std::array<std::array<double, 2>, 2>> p_;
    bool labeled_ = false;
    std::array<std::vector<double>, 2> group_;
    std::array<std::array<std::vector<double>, 2>, 2> cell_;
};

// Adversary objectives written over the conditionals:
//   DP:   E_{Z_0}[1 - h] + E_{Z_1}[h] - 1
//   EO:   sum over y of (E_{Z_0^y}[1 - h_y] + E_{Z_1^y}[h_y]) - 2
//   EOpp: the y = 0 term of EO
double dp_objective(const DiscreteScenario& s, std::span<const double> h);
double eo_objective(const DiscreteScenario& s, std::span<const double> h_y0, std::span<const double> h_y1);
double eopp_objective(const DiscreteScenario& s, std::span<const double> h_y0);

double delta_dp(const DiscreteScenario& s, std::span<const double> g);
double delta_eo(const DiscreteScenario& s, std::span<const double> g);
double delta_eopp(const DiscreteScenario& s, std::span<const double> g);

struct AdversaryOptimum {
    std::vector<int> h;     // DP / EOpp: h(z); EO: h(z, y=0) followed by h(z, y=1)
    double value = 0.0;
};

/// Best binary adversary by enumerating all 2^k functions; the value is
/// cross-checked against the statistical distance (InternalStateError).
AdversaryOptimum optimal_adversary_dp(const DiscreteScenario& s);
/// All 2^(2k) label-conditioned functions.
AdversaryOptimum optimal_adversary_eo(const DiscreteScenario& s);
AdversaryOptimum optimal_adversary_eopp(const DiscreteScenario& s);

struct BoundRecord {
    std::string kind;  // "dp", "eo", "eopp"
    double delta = 0.0;           // Delta(g)
    double optimal_value = 0.0;   // L*
    double constructed_value = 0.0;
    std::vector<int> constructed_h;
    double statistical_distance = 0.0;  // TV of the relevant pair(s), summed for EO
    bool holds = false;

    nlohmann::json to_json() const;
};

/// Throw TheoremViolationError unless L* >= Delta(g) and the adversary built
/// from g (g or 1 - g per label, whichever sign branch applies) scores
/// exactly Delta(g) within 1e-12.
BoundRecord verify_dp_bound(const DiscreteScenario& s, std::span<const int> g);
BoundRecord verify_eo_bound(const DiscreteScenario& s, std::span<const int> g);
BoundRecord verify_eopp_bound(const DiscreteScenario& s, std::span<const int> g);

struct AppendixARecord {
    std::array<double, 2> ce_h{};
    double ce_objective = 0.0;  // natural log
    double reported_ce_objective = -0.051;
    bool ce_matches_reported = false;  // within 0.0005
    std::array<int, 2> ce_thresholded{};
    double ce_test_discrepancy = 0.0;
    std::vector<int> l1_h;
    double l1_objective = 0.0;
    double l1_expected = 0.0;
    bool l1_matches = false;  // within 1e-12

    nlohmann::json to_json() const;
};

/// p(Z=0,A=0)=0.92, p(Z=0,A=1)=0.03, p(Z=1,A=0)=0.03, p(Z=1,A=1)=0.02.
DiscreteScenario appendix_a_scenario();
/// Cross-entropy adversary objective sum p(z,a) [a log h(z) + (1-a) log(1-h(z))].
double ce_objective(const DiscreteScenario& s, std::span<const double> h);
AppendixARecord reproduce_appendix_a();

struct RelaxationRecord {
    std::string kind;
    std::size_t samples = 0;
    double mc_delta = 0.0;
    double mc_delta_se = 0.0;
    double mc_adversary = 0.0;  // sampled optimal adversary
    double mc_adversary_se = 0.0;
    double exact_delta = 0.0;   // Delta of the expected classifier
    double exact_adversary = 0.0;
    std::optional<double> mc_given_adversary;  // sampled caller-supplied soft h
    bool holds = false;  // mc_adversary >= mc_delta - 3 * combined SE

    nlohmann::json to_json() const;
};

/// Monte Carlo over Bernoulli realizations of soft g and of the optimal
/// adversary; each group (or group-label cell) receives samples / cells draws.
/// EO is used for labeled scenarios, DP otherwise. Soft h is optional and
/// indexed like AdversaryOptimum::h.
RelaxationRecord verify_randomized_relaxation(const DiscreteScenario& s, std::span<const double> g_soft,
                                              std::span<const double> h_soft, std::size_t samples,
                                              std::uint64_t seed);

struct SuiteConfig {
    std::size_t dp_scenarios = 1000;
    std::size_t dp_max_support = 10;
    std::size_t eo_scenarios = 500;
    std::size_t eo_max_support = 6;
    std::size_t eopp_scenarios = 500;
    std::size_t relaxation_scenarios = 20;
    std::size_t relaxation_samples = 100000;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    void validate() const;
};

struct SuiteReport {
    std::size_t dp_checked = 0;
    std::size_t eo_checked = 0;
    std::size_t eopp_checked = 0;
    std::size_t relaxation_checked = 0;
    std::size_t relaxation_failures = 0;
    double max_tv_gap = 0.0;         // |L*_dp - TV|
    double max_construct_gap = 0.0;  // |constructed - Delta| over all kinds
    std::vector<std::string> violations;
    AppendixARecord appendix_a;

    bool ok() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

/// Random scenarios and classifiers for every bound, plus the fixed example.
SuiteReport run_suite(const SuiteConfig& config);

}  // namespace laftr::theory
