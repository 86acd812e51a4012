#pragma once

// Batch front end: gen-data, train, eval, sweep, transfer, verify.
// Exit codes: 0 success, 1 internal failure, 2 bad input, 3 a theorem check
// failed. Errors are written to stderr as one JSON object.

#include "laftr/classifier.hpp"
#include "laftr/data.hpp"
#include "laftr/run_config.hpp"
#include "laftr/theory.hpp"
#include "laftr/trainer.hpp"

#include <ostream>

namespace laftr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitTheorem = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Config section readers; every seed falls back to run.seed.
data::SyntheticSpec synthetic_spec(const RunConfig& cfg);
data::SplitSpec split_spec(const RunConfig& cfg);
training::TrainConfig train_config(const RunConfig& cfg);
ProbeConfig probe_config(const RunConfig& cfg);
theory::SuiteConfig suite_config(const RunConfig& cfg);
/// Synthetic data unless data.path is set.
data::GroupedDataset load_dataset(const RunConfig& cfg);

}  // namespace laftr::cli
