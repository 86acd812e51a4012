#pragma once

// Tabular (X, Y, A) datasets: CSV ingestion against a column-role schema,
// group/label cell partitions, seeded splits, and synthetic generators that
// stand in for the Adult and Heritage Health schemas.

#include "laftr/nn.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace laftr::data {

using nn::Matrix;
using nn::Vector;

struct GroupedDataset {
    Matrix features;                 // [n x d]
    std::vector<int> labels;         // Y in {0,1}
    std::vector<int> sensitive;      // A in {0,1}
    std::map<std::string, std::vector<int>> transfer_labels;  // Y' by task name
    std::vector<std::string> feature_names;
    std::vector<std::size_t> continuous_columns;  // feature columns eligible for standardization

    std::size_t size() const { return labels.size(); }
    std::size_t feature_width() const { return static_cast<std::size_t>(features.cols()); }

    /// Throws InputError on inconsistent lengths or non-binary Y/A/Y'.
    void validate() const;

    GroupedDataset subset(std::span<const std::size_t> rows) const;

    /// Copy with `labels` replaced by the named transfer task.
    GroupedDataset with_task(const std::string& task) const;

    Matrix label_column() const;
    Matrix sensitive_column() const;
};

/// Row indices per sensitive group D_a and per group-label cell D_a^y.
struct CellPartition {
    std::array<std::vector<std::size_t>, 2> groups;
    std::array<std::array<std::vector<std::size_t>, 2>, 2> cells;  // [a][y]

    const std::vector<std::size_t>& group(int a) const { return groups[static_cast<std::size_t>(a)]; }
    const std::vector<std::size_t>& cell(int a, int y) const {
        return cells[static_cast<std::size_t>(a)][static_cast<std::size_t>(y)];
    }
};

CellPartition partition_cells(const GroupedDataset& ds);
CellPartition partition_cells(std::span<const int> labels, std::span<const int> sensitive);

// ---------------------------------------------------------------- CSV schema

enum class ColumnKind { Continuous, Categorical, Label, Sensitive, TransferLabel, Ignore };

struct ColumnRole {
    ColumnKind kind = ColumnKind::Ignore;
    std::string task;  // TransferLabel only
};

/// How a raw cell becomes a binary value for label/sensitive/transfer columns.
struct Binarizer {
    enum class Rule { Numeric, Map, AtLeast, NonZero };
    Rule rule = Rule::Numeric;
    std::map<std::string, int> mapping;
    double threshold = 0.0;

    int apply(const std::string& raw, std::size_t row, const std::string& column) const;
};

/// Column roles read from a key-value schema file:
///
///   column.<name> = feature-continuous | feature-categorical | label |
///                   sensitive | transfer-label:<task> | ignore
///   levels.<name> = v1, v2, ...        (categorical; unlisted values rejected)
///   map.<name>    = raw:0, raw:1       (binary columns)
///   binarize.<name> = ge:<threshold> | nonzero
struct Schema {
    std::map<std::string, ColumnRole> roles;
    std::map<std::string, std::vector<std::string>> levels;
    std::map<std::string, Binarizer> binarizers;

    static Schema parse(const std::string& text);
    static Schema read(const std::filesystem::path& path);
    std::string to_text() const;

    /// Schema matching the layout produced by write_csv for `ds`.
    static Schema for_dataset(const GroupedDataset& ds);
};

/// Reads a headered CSV; leading '#' lines are skipped. Categorical columns
/// are one-hot encoded; continuous columns are kept raw and listed in
/// `continuous_columns`.
GroupedDataset load_csv(const std::filesystem::path& path, const Schema& schema);

/// Writes x columns, y, a, one t:<task> column per transfer label and, when
/// `split_column` is given, a trailing `split` column. Values use max_digits10.
/// A non-empty `preamble` is written first as a '#' line.
void write_csv(const GroupedDataset& ds, const std::filesystem::path& path,
               const std::vector<std::string>* split_column = nullptr, const std::string& preamble = "");

/// Zero-mean / unit-variance scaling of the continuous columns, fitted on a
/// subset of rows and applied to whole datasets.
struct Standardizer {
    std::vector<std::size_t> columns;
    std::vector<double> means;
    std::vector<double> scales;

    static Standardizer fit(const GroupedDataset& ds, std::span<const std::size_t> rows);
    GroupedDataset apply(const GroupedDataset& ds) const;
};

// ------------------------------------------------------------------- splits

struct SplitSpec {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
    double transfer_train = 0.6;
    double transfer_validation = 0.2;
    double transfer_test = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    // Drawn from `test` only.
    std::vector<std::size_t> transfer_train;
    std::vector<std::size_t> transfer_validation;
    std::vector<std::size_t> transfer_test;
};

SplitIndices split(std::size_t n, const SplitSpec& spec);

/// Materialized split datasets, standardized with train-split statistics.
struct DataSplits {
    GroupedDataset train;
    GroupedDataset validation;
    GroupedDataset test;
    GroupedDataset transfer_train;
    GroupedDataset transfer_validation;
    GroupedDataset transfer_test;
};

DataSplits make_splits(const GroupedDataset& ds, const SplitSpec& spec);

// ---------------------------------------------------------------- synthetic

struct SyntheticSpec {
    std::size_t n = 10000;
    std::size_t d = 8;
    double p_sensitive = 0.26;                 // p(A=1)
    std::array<double, 2> base_rates{0.3, 0.15};  // p(Y=1 | A=a)
    double proxy_strength = 0.8;
    std::size_t transfer_tasks = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Feature layout: columns 0-1 are proxies for A scaled by proxy_strength,
/// 2-3 carry Y, 4 mixes both, the rest are draws of three shared latent
/// factors that the transfer labels also read. Transfer task t has positive
/// base rate 0.09 + t * 0.51 / (tasks - 1) and depends on Y, A and one
/// latent factor with task-specific weights.
GroupedDataset generate_synthetic(const SyntheticSpec& spec);

/// Column-role descriptors for the two real datasets the synthetic data
/// stands in for.
Schema adult_schema();
Schema health_schema();

}  // namespace laftr::data
