#include "laftr/metrics.hpp"

#include "laftr/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace laftr::metrics {

std::vector<PredictionRecord> make_records(std::span<const int> predictions, std::span<const int> labels,
                                           std::span<const int> groups) {
    if (predictions.size() != labels.size() || labels.size() != groups.size()) {
        throw InputError("prediction, label and group vectors differ in length");
    }
    std::vector<PredictionRecord> out(predictions.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {predictions[i], labels[i], groups[i]};
        const auto& r = out[i];
        if ((r.prediction | r.label | r.group) & ~1) {
            throw InputError("prediction record " + std::to_string(i) + " is not binary");
        }
    }
    return out;
}

DiscreteDistributionPair::DiscreteDistributionPair(std::vector<double> p0, std::vector<double> p1)
    : p0_(std::move(p0)), p1_(std::move(p1)) {
    if (p0_.size() != p1_.size() || p0_.empty()) {
        throw InputError("distribution pair needs two equally long, nonempty vectors");
    }
    for (const auto* p : {&p0_, &p1_}) {
        if (std::any_of(p->begin(), p->end(), [](double v) { return !(v >= 0.0); })) {
            throw InputError("probabilities must be nonnegative");
        }
        const double total = std::accumulate(p->begin(), p->end(), 0.0);
        if (std::abs(total - 1.0) > 1e-12) {
            throw InputError("probabilities must sum to 1 (got " + std::to_string(total) + ")");
        }
    }
}

double test_discrepancy(const DiscreteDistributionPair& pair, std::span<const int> mu) {
    if (mu.size() != pair.support_size()) {
        throw InputError("test function must be defined on every support point");
    }
    double e0 = 0.0;
    double e1 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] != 0) {
            e0 += pair.p0()[i];
            e1 += pair.p1()[i];
        }
    }
    return std::abs(e0 - e1);
}

double total_variation(const DiscreteDistributionPair& pair) {
    double total = 0.0;
    for (std::size_t i = 0; i < pair.support_size(); ++i) {
        total += std::abs(pair.p0()[i] - pair.p1()[i]);
    }
    return 0.5 * total;
}

StatisticalDistance statistical_distance(const DiscreteDistributionPair& pair) {
    const auto k = pair.support_size();
    if (k > kMaxEnumerationSupport) {
        throw InputError("support of " + std::to_string(k) + " points is too large to enumerate; use total_variation");
    }
    std::vector<double> diff(k);
    for (std::size_t i = 0; i < k; ++i) {
        diff[i] = pair.p0()[i] - pair.p1()[i];
    }
    // Walk all subsets in Gray-code order, flipping one atom per step.
    const std::uint64_t count = std::uint64_t{1} << k;
    double running = 0.0;
    double best = 0.0;
    std::uint64_t best_mask = 0;
    std::uint64_t mask = 0;
    for (std::uint64_t step = 1; step < count; ++step) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(step));
        mask ^= std::uint64_t{1} << bit;
        running += (mask >> bit & 1U) ? diff[bit] : -diff[bit];
        if (std::abs(running) > best) {
            best = std::abs(running);
            best_mask = mask;
        }
    }
    StatisticalDistance out;
    out.argmax_test.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.argmax_test[i] = static_cast<int>(best_mask >> i & 1U);
    }
    out.value = test_discrepancy(pair, out.argmax_test);
    const double closed = total_variation(pair);
    if (std::abs(out.value - closed) > 1e-12) {
        throw InternalStateError("enumerated statistical distance " + std::to_string(out.value) +
                                 " disagrees with the total-variation closed form " + std::to_string(closed));
    }
    return out;
}

namespace {

struct CellRates {
    std::array<std::array<double, 2>, 2> positives{};  // [a][y]
    std::array<std::array<std::size_t, 2>, 2> counts{};
};

CellRates tally(std::span<const PredictionRecord> records) {
    CellRates t;
    for (const auto& r : records) {
        const auto a = static_cast<std::size_t>(r.group != 0);
        const auto y = static_cast<std::size_t>(r.label != 0);
        t.counts[a][y] += 1;
        t.positives[a][y] += r.prediction != 0 ? 1.0 : 0.0;
    }
    return t;
}

double cell_rate(const CellRates& t, int a, int y) {
    const auto ai = static_cast<std::size_t>(a);
    const auto yi = static_cast<std::size_t>(y);
    if (t.counts[ai][yi] == 0) {
        throw MetricUndefinedError("cell (a=" + std::to_string(a) + ", y=" + std::to_string(y) + ") is empty");
    }
    return t.positives[ai][yi] / static_cast<double>(t.counts[ai][yi]);
}

}  // namespace

double delta_dp(std::span<const PredictionRecord> records) {
    const auto t = tally(records);
    std::array<double, 2> rate{};
    for (int a = 0; a < 2; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        const auto n = t.counts[ai][0] + t.counts[ai][1];
        if (n == 0) {
            throw MetricUndefinedError("group a=" + std::to_string(a) + " is empty");
        }
        rate[ai] = (t.positives[ai][0] + t.positives[ai][1]) / static_cast<double>(n);
    }
    return std::abs(rate[0] - rate[1]);
}

double delta_eo(std::span<const PredictionRecord> records) {
    const auto t = tally(records);
    const double fpr_gap = std::abs(cell_rate(t, 0, 0) - cell_rate(t, 1, 0));
    const double fnr_gap = std::abs((1.0 - cell_rate(t, 0, 1)) - (1.0 - cell_rate(t, 1, 1)));
    return fpr_gap + fnr_gap;
}

double delta_eopp(std::span<const PredictionRecord> records) {
    const auto t = tally(records);
    return std::abs(cell_rate(t, 0, 0) - cell_rate(t, 1, 0));
}

double mmd_rbf(const nn::Matrix& samples0, const nn::Matrix& samples1, double sigma) {
    if (samples0.rows() < 2 || samples1.rows() < 2) {
        throw InputError("mmd needs at least 2 rows per sample");
    }
    if (samples0.cols() != samples1.cols()) {
        throw InputError("mmd samples differ in column count");
    }
    if (!(sigma > 0.0)) {
        throw InputError("mmd bandwidth must be positive");
    }
    const double scale = -1.0 / (2.0 * sigma * sigma);
    const auto kernel_sum = [&](const nn::Matrix& u, const nn::Matrix& v, bool skip_diagonal) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            for (Eigen::Index j = 0; j < v.rows(); ++j) {
                if (skip_diagonal && i == j) {
                    continue;
                }
                total += std::exp(scale * (u.row(i) - v.row(j)).squaredNorm());
            }
        }
        return total;
    };
    const auto m = static_cast<double>(samples0.rows());
    const auto n = static_cast<double>(samples1.rows());
    const bool paired = samples0.rows() == samples1.rows();
    const double within0 = kernel_sum(samples0, samples0, true) / (m * (m - 1.0));
    const double within1 = kernel_sum(samples1, samples1, true) / (n * (n - 1.0));
    const double cross = paired ? kernel_sum(samples0, samples1, true) / (m * (m - 1.0))
                                : kernel_sum(samples0, samples1, false) / (m * n);
    return within0 + within1 - 2.0 * cross;
}

AdversarialProbeResult adversarial_accuracy_probe(const nn::Matrix& representations, std::span<const int> sensitive,
                                                  const AdversarialProbeConfig& config) {
    const auto n = static_cast<std::size_t>(representations.rows());
    if (sensitive.size() != n) {
        throw InputError("representation rows and sensitive labels differ in count");
    }
    if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
        throw InputError("probe test fraction must lie in (0,1)");
    }
    const auto positives = static_cast<std::size_t>(std::count(sensitive.begin(), sensitive.end(), 1));
    if (positives == 0 || positives == n) {
        return {1.0, true};
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(n))));
    if (n_test >= n) {
        throw InputError("adversarial probe needs at least one training row");
    }
    const auto n_train = n - n_test;
    nn::Matrix train_x(static_cast<Eigen::Index>(n_train), representations.cols());
    nn::Matrix test_x(static_cast<Eigen::Index>(n_test), representations.cols());
    std::vector<int> train_a(n_train);
    std::vector<int> test_a(n_test);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(order[i]);
        if (i < n_train) {
            train_x.row(static_cast<Eigen::Index>(i)) = representations.row(src);
            train_a[i] = sensitive[order[i]];
        } else {
            test_x.row(static_cast<Eigen::Index>(i - n_train)) = representations.row(src);
            test_a[i - n_train] = sensitive[order[i]];
        }
    }
    const auto train_pos = std::count(train_a.begin(), train_a.end(), 1);
    if (train_pos == 0 || static_cast<std::size_t>(train_pos) == n_train) {
        // Training side saw one class only: the probe can only predict it.
        const int majority = train_pos == 0 ? 0 : 1;
        std::vector<int> constant(n_test, majority);
        return {accuracy(constant, test_a), true};
    }
    const auto probe = train_classifier(train_x, train_a, config.probe, config.seed + 1);
    return {accuracy(probe.predict(test_x, config.probe.threshold), test_a), false};
}

nlohmann::json FairnessReport::to_json() const {
    nlohmann::json j;
    j["accuracy"] = accuracy;
    j["delta_dp"] = delta_dp;
    j["delta_eo"] = delta_eo;
    j["delta_eopp"] = delta_eopp;
    j["mmd"] = mmd ? nlohmann::json(*mmd) : nlohmann::json(nullptr);
    j["adv_acc"] = adv_acc ? nlohmann::json(*adv_acc) : nlohmann::json(nullptr);
    return j;
}

FairnessReport FairnessReport::from_json(const nlohmann::json& j) {
    FairnessReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.delta_dp = j.at("delta_dp").get<double>();
    r.delta_eo = j.at("delta_eo").get<double>();
    r.delta_eopp = j.at("delta_eopp").get<double>();
    if (j.contains("mmd") && !j["mmd"].is_null()) {
        r.mmd = j["mmd"].get<double>();
    }
    if (j.contains("adv_acc") && !j["adv_acc"].is_null()) {
        r.adv_acc = j["adv_acc"].get<double>();
    }
    return r;
}

FairnessReport classification_report(std::span<const int> predictions, std::span<const int> labels,
                                      std::span<const int> groups) {
    const auto records = make_records(predictions, labels, groups);
    FairnessReport r;
    r.accuracy = accuracy(predictions, labels);
    r.delta_dp = delta_dp(records);
    r.delta_eo = delta_eo(records);
    r.delta_eopp = delta_eopp(records);
    return r;
}

}  // namespace laftr::metrics
