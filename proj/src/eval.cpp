#include "laftr/eval.hpp"

#include "laftr/errors.hpp"
#include "laftr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace laftr::eval {

FairnessMetric metric_for(objectives::AdvObjectiveKind kind) {
    switch (kind) {
        case objectives::AdvObjectiveKind::EO:
            return FairnessMetric::EO;
        case objectives::AdvObjectiveKind::EOpp:
            return FairnessMetric::EOpp;
        default:
            return FairnessMetric::DP;
    }
}

const char* to_string(FairnessMetric metric) {
    switch (metric) {
        case FairnessMetric::EO:
            return "delta_eo";
        case FairnessMetric::EOpp:
            return "delta_eopp";
        default:
            return "delta_dp";
    }
}

double delta_of(const metrics::FairnessReport& report, FairnessMetric metric) {
    switch (metric) {
        case FairnessMetric::EO:
            return report.delta_eo;
        case FairnessMetric::EOpp:
            return report.delta_eopp;
        default:
            return report.delta_dp;
    }
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw InputError("median of an empty list");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ProbeResult probe_train(const Representation& repr, const data::GroupedDataset& train,
                        const data::GroupedDataset& test, const ProbeConfig& config, std::uint64_t seed) {
    const nn::Matrix z_train = repr.encode(train);
    auto classifier = train_classifier(z_train, train.labels, config, seed);
    const auto predictions = classifier.predict(repr.encode(test), config.threshold);
    auto report = metrics::classification_report(predictions, test.labels, test.sensitive);
    return {std::move(classifier), report};
}

std::size_t select_by_scores(std::span<const CheckpointScore> scores) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].scores.empty()) {
            continue;
        }
        if (!best) {
            best = i;
            continue;
        }
        const auto& cand = scores[i];
        const auto& cur = scores[*best];
        if (cand.median < cur.median || (cand.median == cur.median && cand.epoch < cur.epoch)) {
            best = i;
        }
    }
    if (!best) {
        throw SelectionError("no checkpoint has a successful validation probe");
    }
    return *best;
}

Selection select_model(std::span<const training::Checkpoint> checkpoints, const data::GroupedDataset& train,
                       const data::GroupedDataset& validation, std::size_t r, FairnessMetric metric,
                       const ProbeConfig& probe, std::uint64_t base_seed) {
    if (checkpoints.empty()) {
        throw SelectionError("no checkpoints to select from");
    }
    if (r == 0) {
        throw InputError("select_model: r must be positive");
    }
    Selection selection;
    for (const auto& ckpt : checkpoints) {
        CheckpointScore score;
        score.epoch = ckpt.epoch;
        const auto repr = ckpt.model.representation();
        for (std::size_t s = 0; s < r; ++s) {
            try {
                const auto result = probe_train(*repr, train, validation, probe, base_seed + s);
                score.scores.push_back((1.0 - result.report.accuracy) + delta_of(result.report, metric));
            } catch (const MetricUndefinedError&) {
            } catch (const NonFiniteError&) {
            }
        }
        if (!score.scores.empty()) {
            score.median = median(score.scores);
        }
        selection.scores.push_back(std::move(score));
    }
    selection.index = select_by_scores(selection.scores);
    selection.epoch = selection.scores[selection.index].epoch;
    return selection;
}

std::vector<std::size_t> pareto_front(std::span<const std::pair<double, double>> points) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [acc_i, delta_i] = points[i];
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            const auto [acc_j, delta_j] = points[j];
            dominated = acc_j >= acc_i && delta_j <= delta_i && (acc_j > acc_i || delta_j < delta_i);
        }
        if (!dominated) {
            front.push_back(i);
        }
    }
    std::stable_sort(front.begin(), front.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].first > points[b].first; });
    return front;
}

std::vector<double> default_gamma_grid() {
    constexpr std::size_t kCount = 8;
    const double lo = std::log(0.1);
    const double hi = std::log(4.0);
    std::vector<double> grid(kCount);
    for (std::size_t i = 0; i < kCount; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kCount - 1));
    }
    grid.front() = 0.1;
    grid.back() = 4.0;
    return grid;
}

namespace {

struct GammaOutcome {
    SweepSummary summary;
    std::vector<SweepRecord> records;
};

GammaOutcome run_gamma(const data::DataSplits& splits, const SweepConfig& config, double gamma) {
    GammaOutcome out;
    out.summary.gamma = gamma;
    auto train_config = config.train;
    train_config.gamma = gamma;
    const auto metric = metric_for(train_config.objective);
    try {
        const auto fitted = training::fit(splits.train, train_config);
        const auto selection = select_model(fitted.checkpoints, splits.train, splits.validation, config.r, metric,
                                            config.probe, train_config.seed);
        const auto& chosen = fitted.checkpoints[selection.index];
        out.summary.checkpoint_epoch = chosen.epoch;
        const auto repr = chosen.model.representation();
        std::vector<double> acc;
        std::vector<double> dp;
        std::vector<double> eo;
        std::vector<double> eopp;
        for (std::size_t s = 0; s < config.r; ++s) {
            const std::uint64_t seed = train_config.seed + 1000 + s;
            const auto result = probe_train(*repr, splits.transfer_train, splits.transfer_test, config.probe, seed);
            out.records.push_back({gamma, seed, chosen.epoch, "test", result.report});
            acc.push_back(result.report.accuracy);
            dp.push_back(result.report.delta_dp);
            eo.push_back(result.report.delta_eo);
            eopp.push_back(result.report.delta_eopp);
        }
        // Validation rows are regenerated for the chosen checkpoint so the
        // CSV carries the full per-seed detail of both phases.
        for (std::size_t s = 0; s < config.r; ++s) {
            const std::uint64_t seed = train_config.seed + s;
            try {
                const auto result = probe_train(*repr, splits.train, splits.validation, config.probe, seed);
                out.records.push_back({gamma, seed, chosen.epoch, "validation", result.report});
            } catch (const MetricUndefinedError&) {
            }
        }
        out.summary.accuracy = median(acc);
        out.summary.delta_dp = median(dp);
        out.summary.delta_eo = median(eo);
        out.summary.delta_eopp = median(eopp);
        out.summary.delta = metric == FairnessMetric::EO     ? out.summary.delta_eo
                            : metric == FairnessMetric::EOpp ? out.summary.delta_eopp
                                                             : out.summary.delta_dp;
    } catch (const Error& e) {
        out.records.clear();
        out.summary.failed = true;
        out.summary.failure = std::string(e.kind()) + ": " + e.what();
    }
    return out;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SweepResult sweep(const data::DataSplits& splits, const SweepConfig& config) {
    if (config.gammas.empty()) {
        throw InputError("sweep: empty gamma list");
    }
    for (double g : config.gammas) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw InputError("sweep: gamma must be a finite nonnegative number");
        }
    }
    if (config.r == 0) {
        throw InputError("sweep: r must be positive");
    }
    config.train.validate();
    config.probe.validate();

    std::vector<GammaOutcome> outcomes(config.gammas.size());
    run_parallel(config.gammas.size(), config.jobs,
                 [&](std::size_t i) { outcomes[i] = run_gamma(splits, config, config.gammas[i]); });

    SweepResult result;
    result.objective = objectives::to_string(config.train.objective);
    if (config.train.fairness_term == training::FairnessTerm::SoftEqualizedOdds) {
        result.objective = "soft-eo";
    }
    result.metric = to_string(metric_for(config.train.objective));
    std::vector<std::pair<double, double>> points;
    std::vector<std::size_t> point_owner;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        if (o.summary.failed) {
            ++result.failures;
        } else {
            points.emplace_back(o.summary.accuracy, o.summary.delta);
            point_owner.push_back(i);
        }
        result.summaries.push_back(o.summary);
        for (auto& rec : o.records) {
            result.records.push_back(std::move(rec));
        }
    }
    for (std::size_t p : pareto_front(points)) {
        result.front.push_back(point_owner[p]);
    }
    return result;
}

std::string sweep_csv(const SweepResult& result, const std::string& provenance) {
    std::ostringstream out;
    out << "# " << provenance << '\n';
    out << "objective,gamma,seed,phase,checkpoint_epoch,accuracy,delta_dp,delta_eo,delta_eopp\n";
    for (const auto& rec : result.records) {
        out << result.objective << ',' << format_real(rec.gamma) << ',' << rec.seed << ',' << rec.phase << ','
            << rec.checkpoint_epoch << ',' << format_real(rec.report.accuracy) << ','
            << format_real(rec.report.delta_dp) << ',' << format_real(rec.report.delta_eo) << ','
            << format_real(rec.report.delta_eopp) << '\n';
    }
    return out.str();
}

nlohmann::json sweep_json(const SweepResult& result) {
    nlohmann::json j;
    j["objective"] = result.objective;
    j["metric"] = result.metric;
    j["failures"] = result.failures;
    j["summaries"] = nlohmann::json::array();
    for (const auto& s : result.summaries) {
        nlohmann::json row{{"gamma", s.gamma}, {"failed", s.failed}};
        if (s.failed) {
            row["failure"] = s.failure;
        } else {
            row["checkpoint_epoch"] = s.checkpoint_epoch;
            row["accuracy"] = s.accuracy;
            row["delta_dp"] = s.delta_dp;
            row["delta_eo"] = s.delta_eo;
            row["delta_eopp"] = s.delta_eopp;
            row["delta"] = s.delta;
        }
        j["summaries"].push_back(row);
    }
    j["pareto_front"] = result.front;
    return j;
}

std::string sweep_plot_csv(const SweepResult& result, const std::string& provenance) {
    std::ostringstream out;
    out << "# " << provenance << '\n';
    out << "x,y,series,gamma,on_front\n";
    for (std::size_t i = 0; i < result.summaries.size(); ++i) {
        const auto& s = result.summaries[i];
        if (s.failed) {
            continue;
        }
        const bool on_front = std::find(result.front.begin(), result.front.end(), i) != result.front.end();
        out << format_real(s.delta) << ',' << format_real(s.accuracy) << ',' << result.objective << ','
            << format_real(s.gamma) << ',' << (on_front ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace laftr::eval
