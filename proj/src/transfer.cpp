#include "laftr/transfer.hpp"

#include "laftr/errors.hpp"
#include "laftr/eval.hpp"
#include "laftr/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace laftr::transfer {

std::string LearnerSpec::name() const {
    switch (kind) {
        case ReprLearnerKind::Laftr:
            return "laftr";
        case ReprLearnerKind::TransferUnfair:
            return "transfer-unfair";
        case ReprLearnerKind::TransferFair:
            return "transfer-fair";
        case ReprLearnerKind::TransferYAdv:
            return with_decoder ? "transfer-y-adv-dec" : "transfer-y-adv";
        case ReprLearnerKind::TargetUnfair:
            return "target-unfair";
    }
    return "unknown";
}

LearnerSpec LearnerSpec::parse(const std::string& text) {
    if (text == "laftr") return {ReprLearnerKind::Laftr, false};
    if (text == "transfer-unfair") return {ReprLearnerKind::TransferUnfair, false};
    if (text == "transfer-fair") return {ReprLearnerKind::TransferFair, false};
    if (text == "transfer-y-adv") return {ReprLearnerKind::TransferYAdv, false};
    if (text == "transfer-y-adv-dec") return {ReprLearnerKind::TransferYAdv, true};
    if (text == "target-unfair") return {ReprLearnerKind::TargetUnfair, false};
    throw InputError("unknown representation learner '" + text + "'");
}

training::TrainConfig learner_config(const LearnerSpec& spec, const training::TrainConfig& base) {
    auto cfg = base;
    cfg.adversary_input = training::AdversaryInput::Representation;
    cfg.fairness_term = training::FairnessTerm::Adversary;
    switch (spec.kind) {
        case ReprLearnerKind::Laftr:
            cfg.alpha = 0.0;
            cfg.beta = 1.0;
            cfg.gamma = 1.0;
            cfg.objective = objectives::AdvObjectiveKind::EO;
            break;
        case ReprLearnerKind::TransferUnfair:
            cfg.alpha = 1.0;
            cfg.beta = 0.0;
            cfg.gamma = 0.0;
            break;
        case ReprLearnerKind::TransferFair:
            cfg.alpha = 1.0;
            cfg.beta = 0.0;
            cfg.gamma = 1.0;
            cfg.fairness_term = training::FairnessTerm::SoftEqualizedOdds;
            break;
        case ReprLearnerKind::TransferYAdv:
            cfg.alpha = 1.0;
            cfg.beta = spec.with_decoder ? 1.0 : 0.0;
            cfg.gamma = 1.0;
            cfg.objective = objectives::AdvObjectiveKind::EO;
            cfg.adversary_input = training::AdversaryInput::PredictionAndLabel;
            break;
        case ReprLearnerKind::TargetUnfair:
            break;
    }
    return cfg;
}

ReprLearner build_repr_learner(const LearnerSpec& spec, const data::DataSplits& splits, const TransferConfig& config) {
    ReprLearner learner;
    learner.name = spec.name();
    if (spec.kind == ReprLearnerKind::TargetUnfair) {
        learner.representation = std::make_shared<RawFeatures>(
            InputEncoding::fit(splits.train, config.base.append_sensitive));
        learner.probe_hidden = config.base.representation_width;
        learner.is_baseline = true;
        return learner;
    }
    const auto cfg = learner_config(spec, config.base);
    const auto fitted = training::fit(splits.train, cfg);
    learner.representation = fitted.model.representation(learner.name);
    return learner;
}

data::GroupedDataset task_view(const data::GroupedDataset& ds, const std::string& task) {
    if (task == kOriginalTask) {
        return ds;
    }
    return ds.with_task(task);
}

namespace {

std::optional<double> relative(double value, double base) {
    if (base == 0.0) {
        return std::nullopt;
    }
    return (value - base) / base;
}

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string real(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

AuditResult representation_audit(const Representation& repr, const data::GroupedDataset& ds, std::size_t max_rows,
                                 const ProbeConfig& probe, std::uint64_t seed) {
    const nn::Matrix z = repr.encode(ds);
    const auto cells = data::partition_cells(ds);
    auto take = [&](int a) {
        const auto& rows = cells.group(a);
        const std::size_t n = std::min(rows.size(), max_rows);
        nn::Matrix out(static_cast<Eigen::Index>(n), z.cols());
        for (std::size_t i = 0; i < n; ++i) {
            out.row(static_cast<Eigen::Index>(i)) = z.row(static_cast<Eigen::Index>(rows[i]));
        }
        return out;
    };
    const auto z0 = take(0);
    const auto z1 = take(1);
    if (z0.rows() < 2 || z1.rows() < 2) {
        throw MetricUndefinedError("representation audit needs two rows per group");
    }
    AuditResult result;
    result.mmd = metrics::mmd_rbf(z0, z1, 1.0);
    metrics::AdversarialProbeConfig adv;
    adv.probe = probe;
    adv.seed = seed;
    const auto a = metrics::adversarial_accuracy_probe(z, ds.sensitive, adv);
    result.adv_acc = a.accuracy;
    result.degenerate = a.degenerate;
    return result;
}

TransferReport run_transfer_suite(const std::vector<ReprLearner>& learners, const data::DataSplits& splits,
                                  const std::vector<std::string>& tasks, const TransferConfig& config) {
    if (learners.empty() || tasks.empty()) {
        throw InputError("transfer suite needs at least one learner and one task");
    }
    if (config.r == 0) {
        throw InputError("transfer suite: r must be positive");
    }
    std::optional<std::size_t> baseline;
    for (std::size_t l = 0; l < learners.size(); ++l) {
        if (!learners[l].representation) {
            throw InputError("learner '" + learners[l].name + "' has no representation");
        }
        if (learners[l].is_baseline) {
            baseline = l;
        }
    }
    std::vector<data::GroupedDataset> train_views;
    std::vector<data::GroupedDataset> test_views;
    for (const auto& t : tasks) {
        train_views.push_back(task_view(splits.transfer_train, t));
        test_views.push_back(task_view(splits.transfer_test, t));
    }

    const std::size_t cells = learners.size() * tasks.size();
    std::vector<TaskResult> grid(cells);
    run_parallel(cells, config.jobs, [&](std::size_t idx) {
        const auto& learner = learners[idx / tasks.size()];
        const std::size_t t = idx % tasks.size();
        TaskResult row;
        row.learner = learner.name;
        row.task = tasks[t];
        auto probe = config.probe;
        if (learner.probe_hidden) {
            probe.hidden_width = *learner.probe_hidden;
        }
        try {
            std::vector<double> err;
            std::vector<double> eo;
            for (std::size_t s = 0; s < config.r; ++s) {
                const auto result = eval::probe_train(*learner.representation, train_views[t], test_views[t], probe,
                                                      config.base.seed + s);
                err.push_back(1.0 - result.report.accuracy);
                eo.push_back(result.report.delta_eo);
            }
            row.error = eval::median(err);
            row.delta_eo = eval::median(eo);
        } catch (const Error& e) {
            row.failed = true;
            row.failure = std::string(e.kind()) + ": " + e.what();
        }
        grid[idx] = row;
    });

    TransferReport report;
    for (std::size_t l = 0; l < learners.size(); ++l) {
        LearnerSummary summary;
        summary.learner = learners[l].name;
        double rel_err_sum = 0.0;
        double rel_eo_sum = 0.0;
        std::size_t rel_err_n = 0;
        std::size_t rel_eo_n = 0;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            auto& row = grid[l * tasks.size() + t];
            if (!row.failed && baseline) {
                const auto& base = grid[*baseline * tasks.size() + t];
                if (!base.failed) {
                    row.rel_error = relative(row.error, base.error);
                    row.rel_delta_eo = relative(row.delta_eo, base.delta_eo);
                }
            }
            if (!row.failed) {
                summary.mean_error += row.error;
                summary.mean_delta_eo += row.delta_eo;
                ++summary.tasks;
            }
            if (row.rel_error) {
                rel_err_sum += *row.rel_error;
                ++rel_err_n;
            }
            if (row.rel_delta_eo) {
                rel_eo_sum += *row.rel_delta_eo;
                ++rel_eo_n;
            }
            report.rows.push_back(row);
        }
        if (summary.tasks > 0) {
            summary.mean_error /= static_cast<double>(summary.tasks);
            summary.mean_delta_eo /= static_cast<double>(summary.tasks);
        }
        if (rel_err_n > 0) {
            summary.mean_rel_error = rel_err_sum / static_cast<double>(rel_err_n);
        }
        if (rel_eo_n > 0) {
            summary.mean_rel_delta_eo = rel_eo_sum / static_cast<double>(rel_eo_n);
        }
        try {
            const auto audit = representation_audit(*learners[l].representation, splits.test, config.audit_rows,
                                                    config.probe, config.base.seed);
            summary.mmd = audit.mmd;
            summary.adv_acc = audit.adv_acc;
        } catch (const MetricUndefinedError&) {
        }
        report.learners.push_back(summary);
    }
    return report;
}

std::string TransferReport::to_csv(const std::string& provenance) const {
    std::ostringstream out;
    out << "# " << provenance << '\n';
    out << "learner,task,error,delta_eo,rel_error,rel_delta_eo\n";
    for (const auto& row : rows) {
        if (row.failed) {
            out << row.learner << ',' << row.task << ",,,,\n";
            continue;
        }
        out << row.learner << ',' << row.task << ',' << real(row.error) << ',' << real(row.delta_eo) << ','
            << real(row.rel_error) << ',' << real(row.rel_delta_eo) << '\n';
    }
    return out.str();
}

nlohmann::json TransferReport::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r{{"learner", row.learner}, {"task", row.task}, {"failed", row.failed}};
        if (row.failed) {
            r["failure"] = row.failure;
        } else {
            r["error"] = row.error;
            r["delta_eo"] = row.delta_eo;
            r["rel_error"] = opt(row.rel_error);
            r["rel_delta_eo"] = opt(row.rel_delta_eo);
        }
        j["rows"].push_back(r);
    }
    j["learners"] = nlohmann::json::array();
    for (const auto& s : learners) {
        j["learners"].push_back({{"learner", s.learner},
                                 {"tasks", s.tasks},
                                 {"mean_error", s.mean_error},
                                 {"mean_delta_eo", s.mean_delta_eo},
                                 {"mean_rel_error", opt(s.mean_rel_error)},
                                 {"mean_rel_delta_eo", opt(s.mean_rel_delta_eo)},
                                 {"mmd", opt(s.mmd)},
                                 {"adv_acc", opt(s.adv_acc)}});
    }
    return j;
}

}  // namespace laftr::transfer
