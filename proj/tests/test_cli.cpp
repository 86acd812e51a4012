#include "laftr/cli.hpp"
#include "laftr/errors.hpp"
#include "laftr/run_config.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace laftr;
using namespace laftr::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "laftr");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("laftr_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallConfig = R"(# small run
[run]
seed = 5

[data]
n = 1500
transfer_tasks = 2

[train]
epochs = 2
gamma = 1
objective = dp

[probe]
r = 1
max_epochs = 20
patience = 3
)";

fs::path write_config(const fs::path& dir) {
    const auto path = dir / "run.ini";
    std::ofstream(path) << kSmallConfig;
    return path;
}

}  // namespace

TEST_CASE("config text parses and overrides win") {
    auto cfg = RunConfig::parse(kSmallConfig);
    CHECK(cfg.get_size("data.n", 0) == 1500);
    CHECK(cfg.get_double("train.gamma", 0) == 1.0);
    cfg.set_assignment("train.gamma=2.5");
    CHECK(cfg.get_double("train.gamma", 0) == 2.5);
    CHECK(train_config(cfg).gamma == 2.5);
    CHECK(train_config(cfg).seed == 5);  // falls back to run.seed
    cfg.set("train.seed", "9");
    CHECK(train_config(cfg).seed == 9);
    CHECK(synthetic_spec(cfg).seed == 5);

    CHECK_THROWS_AS(RunConfig::parse("[a]\nno equals sign\n"), InputError);
    CHECK_THROWS_AS(cfg.set_assignment("nodot"), InputError);
    CHECK_THROWS_AS(cfg.get_size("train.gamma", 0), InputError);  // 2.5 is not a count
}

TEST_CASE("fingerprint ignores key order") {
    const auto a = RunConfig::parse("[x]\na = 1\nb = 2\n");
    const auto b = RunConfig::parse("[x]\nb = 2\na = 1\n");
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() != RunConfig::parse("[x]\na = 1\nb = 3\n").fingerprint());
}

TEST_CASE("verify on the command line") {
    const auto dir = scratch("verify");
    const auto r = run({"verify", "--out", dir.string(), "--set", "verify.dp_scenarios=50", "--set",
                        "verify.eo_scenarios=20", "--set", "verify.eopp_scenarios=20", "--set",
                        "verify.relaxation_scenarios=2", "--set", "verify.relaxation_samples=2000"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
    const double l1 = j.at("appendix_a").at("l1_objective").get<double>();
    CHECK(l1 == doctest::Approx(0.92 / 0.95 + 0.02 / 0.05 - 1).epsilon(1e-12));
    CHECK(j.at("tool_version") == kToolVersion);
    CHECK(j.contains("config_fingerprint"));
}

TEST_CASE("gen-data, train, eval end to end") {
    const auto dir = scratch("pipeline");
    const auto cfg = write_config(dir).string();

    auto g = run({"gen-data", "--config", cfg, "--out", dir.string()});
    REQUIRE(g.code == kExitOk);
    CHECK(fs::exists(dir / "dataset.csv"));
    CHECK(fs::exists(dir / "dataset.schema"));

    // Train from the written file.
    const std::string data_path = "data.path=" + (dir / "dataset.csv").string();
    auto t = run({"train", "--config", cfg, "--out", dir.string(), "--set", data_path});
    REQUIRE(t.code == kExitOk);
    CHECK(fs::exists(dir / "model.laftr"));
    const auto log = slurp(dir / "loss_log.csv");
    CHECK(log.rfind("# config_fingerprint=", 0) == 0);

    auto e = run({"eval", "--config", cfg, "--out", dir.string(), "--set", data_path});
    REQUIRE(e.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "eval_report.json"));
    for (const char* key : {"accuracy", "delta_dp", "delta_eo", "delta_eopp", "mmd", "adv_acc"}) {
        CHECK(j.contains(key));
    }
    CHECK(j.at("accuracy").get<double>() > 0.5);
}

TEST_CASE("training twice with one config gives byte-identical logs") {
    const auto a = scratch("repeat_a");
    const auto b = scratch("repeat_b");
    const auto cfg = write_config(a).string();
    REQUIRE(run({"train", "--config", cfg, "--out", a.string()}).code == kExitOk);
    REQUIRE(run({"train", "--config", cfg, "--out", b.string()}).code == kExitOk);
    CHECK(slurp(a / "loss_log.csv") == slurp(b / "loss_log.csv"));
    CHECK(slurp(a / "model.laftr") == slurp(b / "model.laftr"));
    // A different seed changes the run.
    const auto c = scratch("repeat_c");
    REQUIRE(run({"train", "--config", cfg, "--out", c.string(), "--seed", "6"}).code == kExitOk);
    CHECK(slurp(a / "model.laftr") != slurp(c / "model.laftr"));
}

TEST_CASE("sweep with one gamma writes its tables") {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir).string();
    const auto r = run({"sweep", "--config", cfg, "--out", dir.string(), "--set", "sweep.gammas=0.5", "--set",
                        "data.n=3000"});
    REQUIRE(r.code == kExitOk);
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("# config_fingerprint=", 0) == 0);
    CHECK(csv.find("gamma") != std::string::npos);
    CHECK(fs::exists(dir / "sweep_plot.csv"));
}

TEST_CASE("input errors map to exit code 2") {
    const auto dir = scratch("errors");
    auto missing = run({"train", "--out", dir.string(), "--set", "data.path=/nonexistent/data.csv"});
    CHECK(missing.code == kExitBadInput);
    CHECK(missing.err.find("input-not-found") != std::string::npos);

    auto unknown = run({"train", "--out", dir.string(), "--set", "train.gamm=1"});
    CHECK(unknown.code == kExitBadInput);
    CHECK(unknown.err.find("train.gamm") != std::string::npos);

    auto bad_value = run({"train", "--out", dir.string(), "--set", "train.objective=xor"});
    CHECK(bad_value.code == kExitBadInput);

    auto no_command = run({"--out", dir.string()});
    CHECK(no_command.code == kExitBadInput);

    auto missing_config = run({"verify", "--config", (dir / "none.ini").string()});
    CHECK(missing_config.code == kExitBadInput);

    // stderr carries one JSON object
    const auto j = nlohmann::json::parse(missing.err);
    CHECK(j.at("exit_code") == kExitBadInput);
}

TEST_CASE("eval without a trained model is a missing input") {
    const auto dir = scratch("no_model");
    auto r = run({"eval", "--out", dir.string(), "--set", "data.n=1000"});
    CHECK(r.code == kExitBadInput);
    CHECK(r.err.find("input-not-found") != std::string::npos);
}
