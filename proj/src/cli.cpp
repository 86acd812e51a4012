#include "laftr/cli.hpp"

#include "laftr/errors.hpp"
#include "laftr/eval.hpp"
#include "laftr/parallel.hpp"
#include "laftr/transfer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace laftr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys{
    "run.seed",
    "data.path", "data.schema", "data.n", "data.d", "data.p_sensitive", "data.base_rate0", "data.base_rate1",
    "data.proxy_strength", "data.transfer_tasks", "data.seed",
    "split.train", "split.validation", "split.test", "split.transfer_train", "split.transfer_validation",
    "split.transfer_test", "split.seed",
    "train.alpha", "train.beta", "train.gamma", "train.objective", "train.adversary_input", "train.fairness_term",
    "train.epochs", "train.batch_size", "train.learning_rate", "train.beta1", "train.beta2", "train.epsilon",
    "train.checkpoint_interval", "train.hidden_width", "train.representation_width", "train.append_sensitive",
    "train.seed",
    "probe.hidden_width", "probe.max_epochs", "probe.patience", "probe.batch_size", "probe.learning_rate",
    "probe.threshold", "probe.r", "probe.seed",
    "eval.checkpoint", "eval.select", "eval.audit_rows",
    "sweep.gammas",
    "transfer.learners", "transfer.tasks", "transfer.audit_rows",
    "verify.dp_scenarios", "verify.dp_max_support", "verify.eo_scenarios", "verify.eo_max_support",
    "verify.eopp_scenarios", "verify.relaxation_scenarios", "verify.relaxation_samples", "verify.seed",
};

std::uint64_t run_seed(const RunConfig& cfg) { return cfg.get_u64("run.seed", 0); }

std::uint64_t seed_for(const RunConfig& cfg, const std::string& section) {
    return cfg.get_u64(section + ".seed", run_seed(cfg));
}

struct Context {
    RunConfig config;
    fs::path out_dir;
    std::size_t jobs = 1;
    std::string provenance;

    json stamp(json j) const {
        j["config_fingerprint"] = config.fingerprint();
        j["tool_version"] = kToolVersion;
        return j;
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

data::DataSplits load_splits(const Context& ctx) {
    return data::make_splits(load_dataset(ctx.config), split_spec(ctx.config));
}

training::Checkpoint load_model(const fs::path& path, const data::GroupedDataset& ds) {
    auto ckpt = training::load_checkpoint(path);
    ckpt.model.check_consistency(ds.feature_width());
    return ckpt;
}

int cmd_gen_data(const Context& ctx, std::ostream& out) {
    const auto ds = load_dataset(ctx.config);
    const auto csv = ctx.out_dir / "dataset.csv";
    const auto schema_path = ctx.out_dir / "dataset.schema";
    data::write_csv(ds, csv, nullptr, ctx.provenance);
    write_text(schema_path, "# " + ctx.provenance + "\n" + data::Schema::for_dataset(ds).to_text());
    std::size_t positives = 0;
    std::size_t group1 = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        positives += static_cast<std::size_t>(ds.labels[i]);
        group1 += static_cast<std::size_t>(ds.sensitive[i]);
    }
    std::vector<std::string> tasks;
    for (const auto& [task, labels] : ds.transfer_labels) {
        tasks.push_back(task);
    }
    const auto summary = ctx.stamp({{"command", "gen-data"},
                                    {"dataset", csv.string()},
                                    {"schema", schema_path.string()},
                                    {"rows", ds.size()},
                                    {"features", ds.feature_width()},
                                    {"positive_rate", static_cast<double>(positives) / static_cast<double>(ds.size())},
                                    {"sensitive_rate", static_cast<double>(group1) / static_cast<double>(ds.size())},
                                    {"transfer_tasks", tasks}});
    write_json(ctx.out_dir / "gen_data.json", summary);
    out << summary.dump() << '\n';
    return kExitOk;
}

int cmd_train(const Context& ctx, std::ostream& out) {
    const auto splits = load_splits(ctx);
    const auto config = train_config(ctx.config);
    training::FitOutputs outputs;
    outputs.checkpoint_dir = ctx.out_dir / "checkpoints";
    outputs.loss_log = ctx.out_dir / "loss_log.csv";
    outputs.provenance = ctx.provenance;
    const auto fitted = training::fit(splits.train, config, outputs);
    training::save_checkpoint(fitted.checkpoints.back(), ctx.out_dir / "model.laftr");
    std::vector<std::size_t> epochs;
    for (const auto& c : fitted.checkpoints) {
        epochs.push_back(c.epoch);
    }
    json summary = ctx.stamp({{"command", "train"},
                              {"train_fingerprint", config.fingerprint()},
                              {"epochs", config.epochs},
                              {"checkpoint_epochs", epochs},
                              {"model", (ctx.out_dir / "model.laftr").string()},
                              {"loss_log", outputs.loss_log->string()}});
    if (!fitted.losses.empty()) {
        const auto& last = fitted.losses.back().mean;
        summary["final_loss"] = {{"L_C", last.classification},
                                 {"L_Dec", last.reconstruction},
                                 {"L_Adv", last.adversarial},
                                 {"L", last.total}};
    }
    write_json(ctx.out_dir / "train_summary.json", summary);
    out << summary.dump() << '\n';
    return kExitOk;
}

int cmd_eval(const Context& ctx, std::ostream& out) {
    const auto& cfg = ctx.config;
    const auto splits = load_splits(ctx);
    const auto probe = probe_config(cfg);
    const std::size_t r = cfg.get_size("probe.r", 7);
    const std::uint64_t seed = seed_for(cfg, "probe");
    if (r == 0) {
        throw InputError("probe.r must be positive");
    }

    training::Checkpoint chosen;
    std::optional<eval::Selection> selection;
    if (cfg.get_bool("eval.select", false)) {
        const auto dir = ctx.out_dir / "checkpoints";
        if (!fs::is_directory(dir)) {
            throw InputNotFoundError("checkpoint directory " + dir.string() + " does not exist");
        }
        std::vector<fs::path> paths;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".laftr") {
                paths.push_back(entry.path());
            }
        }
        std::sort(paths.begin(), paths.end());
        std::vector<training::Checkpoint> checkpoints;
        for (const auto& p : paths) {
            checkpoints.push_back(load_model(p, splits.train));
        }
        const auto kind = train_config(cfg).objective;
        selection = eval::select_model(checkpoints, splits.train, splits.validation, r, eval::metric_for(kind), probe,
                                       seed);
        chosen = checkpoints[selection->index];
    } else {
        const fs::path path = cfg.get_string("eval.checkpoint", (ctx.out_dir / "model.laftr").string());
        chosen = load_model(path, splits.train);
    }

    const auto repr = chosen.model.representation();
    std::vector<double> acc;
    std::vector<double> dp;
    std::vector<double> eo;
    std::vector<double> eopp;
    for (std::size_t s = 0; s < r; ++s) {
        const auto result = eval::probe_train(*repr, splits.transfer_train, splits.transfer_test, probe, seed + s);
        acc.push_back(result.report.accuracy);
        dp.push_back(result.report.delta_dp);
        eo.push_back(result.report.delta_eo);
        eopp.push_back(result.report.delta_eopp);
    }
    metrics::FairnessReport report;
    report.accuracy = eval::median(acc);
    report.delta_dp = eval::median(dp);
    report.delta_eo = eval::median(eo);
    report.delta_eopp = eval::median(eopp);
    try {
        const auto audit =
            transfer::representation_audit(*repr, splits.test, cfg.get_size("eval.audit_rows", 1000), probe, seed);
        report.mmd = audit.mmd;
        report.adv_acc = audit.adv_acc;
    } catch (const MetricUndefinedError&) {
    }
    json result = ctx.stamp(report.to_json());
    result["command"] = "eval";
    result["checkpoint_epoch"] = chosen.epoch;
    result["probes"] = r;
    if (selection) {
        json scores = json::array();
        for (const auto& s : selection->scores) {
            scores.push_back({{"epoch", s.epoch}, {"median", s.median}, {"successful_probes", s.scores.size()}});
        }
        result["selection"] = scores;
    }
    write_json(ctx.out_dir / "eval_report.json", result);
    out << result.dump() << '\n';
    return kExitOk;
}

int cmd_sweep(const Context& ctx, std::ostream& out) {
    const auto& cfg = ctx.config;
    const auto splits = load_splits(ctx);
    eval::SweepConfig sweep;
    sweep.train = train_config(cfg);
    sweep.probe = probe_config(cfg);
    sweep.r = cfg.get_size("probe.r", 7);
    sweep.gammas = cfg.get_doubles("sweep.gammas", eval::default_gamma_grid());
    sweep.jobs = ctx.jobs;
    const auto result = eval::sweep(splits, sweep);
    write_text(ctx.out_dir / "sweep.csv", eval::sweep_csv(result, ctx.provenance));
    write_text(ctx.out_dir / "sweep_plot.csv", eval::sweep_plot_csv(result, ctx.provenance));
    auto summary = ctx.stamp(eval::sweep_json(result));
    summary["command"] = "sweep";
    write_json(ctx.out_dir / "sweep_summary.json", summary);
    out << summary.dump() << '\n';
    return kExitOk;
}

int cmd_transfer(const Context& ctx, std::ostream& out) {
    const auto& cfg = ctx.config;
    const auto ds = load_dataset(cfg);
    const auto splits = data::make_splits(ds, split_spec(cfg));
    transfer::TransferConfig config;
    config.base = train_config(cfg);
    config.probe = probe_config(cfg);
    config.r = cfg.get_size("probe.r", 7);
    config.audit_rows = cfg.get_size("transfer.audit_rows", 1000);
    config.jobs = ctx.jobs;

    std::vector<std::string> default_tasks;
    for (const auto& [task, labels] : ds.transfer_labels) {
        default_tasks.push_back(task);
    }
    const auto tasks = cfg.get_list("transfer.tasks", default_tasks);
    if (tasks.empty()) {
        throw InputError("dataset has no transfer tasks and transfer.tasks is empty");
    }
    std::vector<transfer::LearnerSpec> specs;
    for (const auto& name : cfg.get_list("transfer.learners", {"laftr", "transfer-unfair", "transfer-fair",
                                                              "transfer-y-adv", "transfer-y-adv-dec",
                                                              "target-unfair"})) {
        specs.push_back(transfer::LearnerSpec::parse(name));
    }
    std::vector<transfer::ReprLearner> learners(specs.size());
    run_parallel(specs.size(), ctx.jobs,
                 [&](std::size_t i) { learners[i] = transfer::build_repr_learner(specs[i], splits, config); });
    const auto report = transfer::run_transfer_suite(learners, splits, tasks, config);
    write_text(ctx.out_dir / "transfer.csv", report.to_csv(ctx.provenance));
    auto summary = ctx.stamp(report.to_json());
    summary["command"] = "transfer";
    write_json(ctx.out_dir / "transfer_summary.json", summary);
    out << summary.dump() << '\n';
    return kExitOk;
}

int cmd_verify(const Context& ctx, std::ostream& out) {
    const auto config = suite_config(ctx.config);
    auto suite = config;
    suite.jobs = ctx.jobs;
    const auto report = theory::run_suite(suite);
    auto result = ctx.stamp(report.to_json());
    result["command"] = "verify";
    write_json(ctx.out_dir / "verify.json", result);
    out << result.dump() << '\n';
    return report.ok() ? kExitOk : kExitTheorem;
}

int report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

}  // namespace

data::SyntheticSpec synthetic_spec(const RunConfig& cfg) {
    data::SyntheticSpec spec;
    spec.n = cfg.get_size("data.n", spec.n);
    spec.d = cfg.get_size("data.d", spec.d);
    spec.p_sensitive = cfg.get_double("data.p_sensitive", spec.p_sensitive);
    spec.base_rates[0] = cfg.get_double("data.base_rate0", spec.base_rates[0]);
    spec.base_rates[1] = cfg.get_double("data.base_rate1", spec.base_rates[1]);
    spec.proxy_strength = cfg.get_double("data.proxy_strength", spec.proxy_strength);
    spec.transfer_tasks = cfg.get_size("data.transfer_tasks", spec.transfer_tasks);
    spec.seed = seed_for(cfg, "data");
    spec.validate();
    return spec;
}

data::SplitSpec split_spec(const RunConfig& cfg) {
    data::SplitSpec spec;
    spec.train = cfg.get_double("split.train", spec.train);
    spec.validation = cfg.get_double("split.validation", spec.validation);
    spec.test = cfg.get_double("split.test", spec.test);
    spec.transfer_train = cfg.get_double("split.transfer_train", spec.transfer_train);
    spec.transfer_validation = cfg.get_double("split.transfer_validation", spec.transfer_validation);
    spec.transfer_test = cfg.get_double("split.transfer_test", spec.transfer_test);
    spec.seed = seed_for(cfg, "split");
    spec.validate();
    return spec;
}

training::TrainConfig train_config(const RunConfig& cfg) {
    training::TrainConfig c;
    c.alpha = cfg.get_double("train.alpha", c.alpha);
    c.beta = cfg.get_double("train.beta", c.beta);
    c.gamma = cfg.get_double("train.gamma", c.gamma);
    c.objective = objectives::parse_kind(cfg.get_string("train.objective", objectives::to_string(c.objective)));
    const auto adversary_input = cfg.get_string("train.adversary_input", "representation");
    if (adversary_input == "representation") {
        c.adversary_input = training::AdversaryInput::Representation;
    } else if (adversary_input == "prediction") {
        c.adversary_input = training::AdversaryInput::PredictionAndLabel;
    } else {
        throw InputError("train.adversary_input must be 'representation' or 'prediction'");
    }
    const auto term = cfg.get_string("train.fairness_term", "adversary");
    if (term == "adversary") {
        c.fairness_term = training::FairnessTerm::Adversary;
    } else if (term == "soft-eo") {
        c.fairness_term = training::FairnessTerm::SoftEqualizedOdds;
    } else {
        throw InputError("train.fairness_term must be 'adversary' or 'soft-eo'");
    }
    c.epochs = cfg.get_size("train.epochs", c.epochs);
    c.batch_size = cfg.get_size("train.batch_size", c.batch_size);
    c.adam.learning_rate = cfg.get_double("train.learning_rate", c.adam.learning_rate);
    c.adam.beta1 = cfg.get_double("train.beta1", c.adam.beta1);
    c.adam.beta2 = cfg.get_double("train.beta2", c.adam.beta2);
    c.adam.epsilon = cfg.get_double("train.epsilon", c.adam.epsilon);
    c.checkpoint_interval = cfg.get_size("train.checkpoint_interval", c.checkpoint_interval);
    c.hidden_width = cfg.get_size("train.hidden_width", c.hidden_width);
    c.representation_width = cfg.get_size("train.representation_width", c.representation_width);
    c.append_sensitive = cfg.get_bool("train.append_sensitive", c.append_sensitive);
    c.seed = seed_for(cfg, "train");
    c.validate();
    return c;
}

ProbeConfig probe_config(const RunConfig& cfg) {
    ProbeConfig p;
    p.hidden_width = cfg.get_size("probe.hidden_width", p.hidden_width);
    p.max_epochs = cfg.get_size("probe.max_epochs", p.max_epochs);
    p.patience = cfg.get_size("probe.patience", p.patience);
    p.batch_size = cfg.get_size("probe.batch_size", p.batch_size);
    p.adam.learning_rate = cfg.get_double("probe.learning_rate", p.adam.learning_rate);
    p.threshold = cfg.get_double("probe.threshold", p.threshold);
    p.validate();
    return p;
}

theory::SuiteConfig suite_config(const RunConfig& cfg) {
    theory::SuiteConfig s;
    s.dp_scenarios = cfg.get_size("verify.dp_scenarios", s.dp_scenarios);
    s.dp_max_support = cfg.get_size("verify.dp_max_support", s.dp_max_support);
    s.eo_scenarios = cfg.get_size("verify.eo_scenarios", s.eo_scenarios);
    s.eo_max_support = cfg.get_size("verify.eo_max_support", s.eo_max_support);
    s.eopp_scenarios = cfg.get_size("verify.eopp_scenarios", s.eopp_scenarios);
    s.relaxation_scenarios = cfg.get_size("verify.relaxation_scenarios", s.relaxation_scenarios);
    s.relaxation_samples = cfg.get_size("verify.relaxation_samples", s.relaxation_samples);
    s.seed = seed_for(cfg, "verify");
    s.validate();
    return s;
}

data::GroupedDataset load_dataset(const RunConfig& cfg) {
    const auto path = cfg.get_string("data.path", "");
    if (path.empty()) {
        return data::generate_synthetic(synthetic_spec(cfg));
    }
    if (!fs::exists(path)) {
        throw InputNotFoundError("dataset " + path + " does not exist");
    }
    const auto schema_name = cfg.get_string("data.schema", fs::path(path).replace_extension(".schema").string());
    data::Schema schema;
    if (schema_name == "adult") {
        schema = data::adult_schema();
    } else if (schema_name == "health") {
        schema = data::health_schema();
    } else {
        schema = data::Schema::read(schema_name);
    }
    auto ds = data::load_csv(path, schema);
    ds.validate();
    return ds;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adversarially fair representation learning", "laftr"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::size_t jobs = 1;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Run configuration file");
    app.add_option("--seed", seed, "Seed used by every component without its own seed key");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--jobs", jobs, "Parallel workers for sweep, transfer and verify")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "Config override section.key=value (repeatable)");
    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen-data", "Write the dataset and its schema"},
        {"train", "Fit one model; write checkpoints and the loss log"},
        {"eval", "Probe a trained representation"},
        {"sweep", "Sweep the fairness coefficient and report the Pareto front"},
        {"transfer", "Run the transfer suite against the baselines"},
        {"verify", "Check the adversarial bounds by enumeration"}};
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "rejected-input", e.what(), kExitBadInput);
    }

    try {
        Context ctx;
        if (!config_path.empty()) {
            ctx.config = RunConfig::read(config_path);
        }
        for (const auto& o : overrides) {
            ctx.config.set_assignment(o);
        }
        if (seed) {
            ctx.config.set("run.seed", std::to_string(*seed));
        }
        ctx.config.check_keys(kKnownKeys);
        ctx.out_dir = out_dir;
        ctx.jobs = jobs;
        ctx.provenance = "config_fingerprint=" + ctx.config.fingerprint() + " tool_version=" + kToolVersion;
        fs::create_directories(ctx.out_dir);

        const auto name = app.get_subcommands().front()->get_name();
        if (name == "gen-data") return cmd_gen_data(ctx, out);
        if (name == "train") return cmd_train(ctx, out);
        if (name == "eval") return cmd_eval(ctx, out);
        if (name == "sweep") return cmd_sweep(ctx, out);
        if (name == "transfer") return cmd_transfer(ctx, out);
        return cmd_verify(ctx, out);
    } catch (const InputError& e) {
        return report_error(err, e.kind(), e.what(), kExitBadInput);
    } catch (const InputNotFoundError& e) {
        return report_error(err, e.kind(), e.what(), kExitBadInput);
    } catch (const TheoremViolationError& e) {
        return report_error(err, e.kind(), e.what(), kExitTheorem);
    } catch (const Error& e) {
        return report_error(err, e.kind(), e.what(), kExitInternal);
    } catch (const fs::filesystem_error& e) {
        return report_error(err, "rejected-input", e.what(), kExitBadInput);
    } catch (const std::exception& e) {
        return report_error(err, "internal", e.what(), kExitInternal);
    }
}

}  // namespace laftr::cli
