#include "laftr/data.hpp"

#include "laftr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace laftr::data {

namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

// Comma-separated fields; double quotes may wrap a field containing commas.
std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

void check_binary(const std::vector<int>& values, const std::string& what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0 && values[i] != 1) {
            throw InputError(what + " must be 0/1; row " + std::to_string(i) + " has " +
                             std::to_string(values[i]));
        }
    }
}

double parse_number(const std::string& raw, std::size_t row, const std::string& column) {
    try {
        std::size_t used = 0;
        const double value = std::stod(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return value;
    } catch (const std::exception&) {
        throw InputError("row " + std::to_string(row) + ", column '" + column + "': '" + raw +
                         "' is not a number");
    }
}

}  // namespace

// ------------------------------------------------------------ GroupedDataset

void GroupedDataset::validate() const {
    const auto n = labels.size();
    if (sensitive.size() != n || static_cast<std::size_t>(features.rows()) != n) {
        throw InputError("dataset fields disagree on row count");
    }
    if (!feature_names.empty() && feature_names.size() != feature_width()) {
        throw InputError("feature name count does not match feature width");
    }
    check_binary(labels, "label Y");
    check_binary(sensitive, "sensitive attribute A");
    for (const auto& [task, values] : transfer_labels) {
        if (values.size() != n) {
            throw InputError("transfer label '" + task + "' has the wrong length");
        }
        check_binary(values, "transfer label '" + task + "'");
    }
    for (auto c : continuous_columns) {
        if (c >= feature_width()) {
            throw InputError("continuous column index out of range");
        }
    }
}

GroupedDataset GroupedDataset::subset(std::span<const std::size_t> rows) const {
    GroupedDataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    out.sensitive.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = rows[i];
        if (r >= size()) {
            throw InputError("subset row " + std::to_string(r) + " out of range");
        }
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(r));
        out.labels.push_back(labels[r]);
        out.sensitive.push_back(sensitive[r]);
    }
    for (const auto& [task, values] : transfer_labels) {
        auto& dst = out.transfer_labels[task];
        dst.reserve(rows.size());
        for (auto r : rows) {
            dst.push_back(values[r]);
        }
    }
    out.feature_names = feature_names;
    out.continuous_columns = continuous_columns;
    return out;
}

GroupedDataset GroupedDataset::with_task(const std::string& task) const {
    const auto it = transfer_labels.find(task);
    if (it == transfer_labels.end()) {
        throw InputError("unknown transfer task '" + task + "'");
    }
    GroupedDataset out = *this;
    out.labels = it->second;
    return out;
}

Matrix GroupedDataset::label_column() const {
    Matrix out(static_cast<Eigen::Index>(size()), 1);
    for (std::size_t i = 0; i < size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = labels[i];
    }
    return out;
}

Matrix GroupedDataset::sensitive_column() const {
    Matrix out(static_cast<Eigen::Index>(size()), 1);
    for (std::size_t i = 0; i < size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = sensitive[i];
    }
    return out;
}

CellPartition partition_cells(std::span<const int> labels, std::span<const int> sensitive) {
    if (labels.size() != sensitive.size()) {
        throw InputError("partition_cells: label and sensitive lengths differ");
    }
    CellPartition out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto a = static_cast<std::size_t>(sensitive[i] != 0);
        const auto y = static_cast<std::size_t>(labels[i] != 0);
        out.groups[a].push_back(i);
        out.cells[a][y].push_back(i);
    }
    return out;
}

CellPartition partition_cells(const GroupedDataset& ds) { return partition_cells(ds.labels, ds.sensitive); }

// --------------------------------------------------------------------- schema

int Binarizer::apply(const std::string& raw, std::size_t row, const std::string& column) const {
    switch (rule) {
        case Rule::Map: {
            const auto it = mapping.find(raw);
            if (it == mapping.end()) {
                throw InputError("row " + std::to_string(row) + ", column '" + column + "': value '" + raw +
                                 "' has no declared mapping");
            }
            return it->second;
        }
        case Rule::AtLeast:
            return parse_number(raw, row, column) >= threshold ? 1 : 0;
        case Rule::NonZero:
            return parse_number(raw, row, column) != 0.0 ? 1 : 0;
        case Rule::Numeric: {
            const double v = parse_number(raw, row, column);
            if (v != 0.0 && v != 1.0) {
                throw InputError("row " + std::to_string(row) + ", column '" + column + "': value '" + raw +
                                 "' is not binary");
            }
            return static_cast<int>(v);
        }
    }
    return 0;
}

Schema Schema::parse(const std::string& text) {
    Schema schema;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const auto dot = line.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw InputError("schema line " + std::to_string(line_no) + ": expected '<kind>.<column> = value'");
        }
        const std::string kind = trim(line.substr(0, dot));
        const std::string column = trim(line.substr(dot + 1, eq - dot - 1));
        const std::string value = trim(line.substr(eq + 1));
        if (kind == "column") {
            ColumnRole role;
            if (value == "feature-continuous") {
                role.kind = ColumnKind::Continuous;
            } else if (value == "feature-categorical") {
                role.kind = ColumnKind::Categorical;
            } else if (value == "label") {
                role.kind = ColumnKind::Label;
            } else if (value == "sensitive") {
                role.kind = ColumnKind::Sensitive;
            } else if (value.rfind("transfer-label:", 0) == 0) {
                role.kind = ColumnKind::TransferLabel;
                role.task = value.substr(std::string("transfer-label:").size());
                if (role.task.empty()) {
                    throw InputError("schema line " + std::to_string(line_no) + ": transfer label needs a name");
                }
            } else if (value == "ignore") {
                role.kind = ColumnKind::Ignore;
            } else {
                throw InputError("schema line " + std::to_string(line_no) + ": unknown role '" + value + "'");
            }
            schema.roles[column] = role;
        } else if (kind == "levels") {
            schema.levels[column] = split_list(value, ',');
        } else if (kind == "map") {
            Binarizer b;
            b.rule = Binarizer::Rule::Map;
            for (const auto& entry : split_list(value, ',')) {
                const auto colon = entry.rfind(':');
                if (colon == std::string::npos) {
                    throw InputError("schema line " + std::to_string(line_no) + ": map entries are raw:0|1");
                }
                const int target = std::stoi(entry.substr(colon + 1));
                if (target != 0 && target != 1) {
                    throw InputError("schema line " + std::to_string(line_no) + ": map targets must be 0 or 1");
                }
                b.mapping[trim(entry.substr(0, colon))] = target;
            }
            schema.binarizers[column] = b;
        } else if (kind == "binarize") {
            Binarizer b;
            if (value == "nonzero") {
                b.rule = Binarizer::Rule::NonZero;
            } else if (value.rfind("ge:", 0) == 0) {
                b.rule = Binarizer::Rule::AtLeast;
                b.threshold = std::stod(value.substr(3));
            } else {
                throw InputError("schema line " + std::to_string(line_no) + ": unknown binarize rule '" + value + "'");
            }
            schema.binarizers[column] = b;
        } else {
            throw InputError("schema line " + std::to_string(line_no) + ": unknown key kind '" + kind + "'");
        }
    }
    return schema;
}

Schema Schema::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputNotFoundError("cannot open schema file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string Schema::to_text() const {
    std::ostringstream out;
    for (const auto& [column, role] : roles) {
        out << "column." << column << " = ";
        switch (role.kind) {
            case ColumnKind::Continuous: out << "feature-continuous"; break;
            case ColumnKind::Categorical: out << "feature-categorical"; break;
            case ColumnKind::Label: out << "label"; break;
            case ColumnKind::Sensitive: out << "sensitive"; break;
            case ColumnKind::TransferLabel: out << "transfer-label:" << role.task; break;
            case ColumnKind::Ignore: out << "ignore"; break;
        }
        out << '\n';
    }
    for (const auto& [column, values] : levels) {
        out << "levels." << column << " = ";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i ? ", " : "") << values[i];
        }
        out << '\n';
    }
    for (const auto& [column, b] : binarizers) {
        switch (b.rule) {
            case Binarizer::Rule::Map: {
                out << "map." << column << " = ";
                bool first = true;
                for (const auto& [raw, target] : b.mapping) {
                    out << (first ? "" : ", ") << raw << ':' << target;
                    first = false;
                }
                out << '\n';
                break;
            }
            case Binarizer::Rule::AtLeast:
                out << "binarize." << column << " = ge:" << b.threshold << '\n';
                break;
            case Binarizer::Rule::NonZero:
                out << "binarize." << column << " = nonzero\n";
                break;
            case Binarizer::Rule::Numeric:
                break;
        }
    }
    return out.str();
}

Schema Schema::for_dataset(const GroupedDataset& ds) {
    Schema schema;
    for (std::size_t j = 0; j < ds.feature_width(); ++j) {
        const std::string name = ds.feature_names.empty() ? "x" + std::to_string(j) : ds.feature_names[j];
        schema.roles[name] = {ColumnKind::Continuous, {}};
    }
    schema.roles["y"] = {ColumnKind::Label, {}};
    schema.roles["a"] = {ColumnKind::Sensitive, {}};
    for (const auto& [task, values] : ds.transfer_labels) {
        schema.roles["t:" + task] = {ColumnKind::TransferLabel, task};
    }
    schema.roles["split"] = {ColumnKind::Ignore, {}};
    return schema;
}

// ------------------------------------------------------------------------ CSV

GroupedDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw InputNotFoundError("cannot open dataset " + path.string());
    }
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            continue;  // provenance preamble
        }
        have_header = true;
        break;
    }
    if (!have_header) {
        throw InputError("dataset " + path.string() + " is empty; a header row is required");
    }
    const auto header = parse_csv_line(line);
    std::vector<ColumnRole> roles;
    for (const auto& name : header) {
        const auto it = schema.roles.find(name);
        if (it == schema.roles.end()) {
            throw InputError("column '" + name + "' has no role in the schema");
        }
        roles.push_back(it->second);
    }
    const auto count_kind = [&](ColumnKind k) {
        return std::count_if(roles.begin(), roles.end(), [k](const ColumnRole& r) { return r.kind == k; });
    };
    if (count_kind(ColumnKind::Label) != 1 || count_kind(ColumnKind::Sensitive) != 1) {
        throw InputError("schema must declare exactly one label and one sensitive column present in the header");
    }

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        auto fields = parse_csv_line(line);
        if (fields.size() != header.size()) {
            throw InputError("row " + std::to_string(rows.size()) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (fields[c].empty() && roles[c].kind != ColumnKind::Ignore) {
                throw InputError("row " + std::to_string(rows.size()) + ", column '" + header[c] +
                                 "': missing value");
            }
        }
        rows.push_back(std::move(fields));
    }

    // Categorical levels: declared order, else sorted distinct values.
    std::map<std::size_t, std::vector<std::string>> column_levels;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (roles[c].kind != ColumnKind::Categorical) {
            continue;
        }
        const auto declared = schema.levels.find(header[c]);
        if (declared != schema.levels.end()) {
            column_levels[c] = declared->second;
        } else {
            std::set<std::string> seen;
            for (const auto& row : rows) {
                seen.insert(row[c]);
            }
            column_levels[c].assign(seen.begin(), seen.end());
        }
    }

    GroupedDataset ds;
    std::vector<std::size_t> feature_offset(header.size(), 0);
    std::size_t width = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
        feature_offset[c] = width;
        if (roles[c].kind == ColumnKind::Continuous) {
            ds.continuous_columns.push_back(width);
            ds.feature_names.push_back(header[c]);
            ++width;
        } else if (roles[c].kind == ColumnKind::Categorical) {
            for (const auto& level : column_levels[c]) {
                ds.feature_names.push_back(header[c] + "=" + level);
            }
            width += column_levels[c].size();
        }
    }

    const auto n = rows.size();
    ds.features = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    ds.labels.resize(n);
    ds.sensitive.resize(n);
    static const Binarizer kNumeric;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            const auto& raw = rows[r][c];
            const auto binarizer_it = schema.binarizers.find(header[c]);
            const Binarizer& binarizer = binarizer_it == schema.binarizers.end() ? kNumeric : binarizer_it->second;
            const auto row = static_cast<Eigen::Index>(r);
            switch (roles[c].kind) {
                case ColumnKind::Continuous:
                    ds.features(row, static_cast<Eigen::Index>(feature_offset[c])) = parse_number(raw, r, header[c]);
                    break;
                case ColumnKind::Categorical: {
                    const auto& levels = column_levels[c];
                    const auto it = std::find(levels.begin(), levels.end(), raw);
                    if (it == levels.end()) {
                        throw InputError("row " + std::to_string(r) + ", column '" + header[c] +
                                         "': unmapped category '" + raw + "'");
                    }
                    ds.features(row, static_cast<Eigen::Index>(feature_offset[c] + (it - levels.begin()))) = 1.0;
                    break;
                }
                case ColumnKind::Label:
                    ds.labels[r] = binarizer.apply(raw, r, header[c]);
                    break;
                case ColumnKind::Sensitive:
                    ds.sensitive[r] = binarizer.apply(raw, r, header[c]);
                    break;
                case ColumnKind::TransferLabel: {
                    auto& values = ds.transfer_labels[roles[c].task];
                    values.resize(n);
                    values[r] = binarizer.apply(raw, r, header[c]);
                    break;
                }
                case ColumnKind::Ignore:
                    break;
            }
        }
    }
    ds.validate();
    return ds;
}

void write_csv(const GroupedDataset& ds, const std::filesystem::path& path,
               const std::vector<std::string>* split_column, const std::string& preamble) {
    ds.validate();
    if (split_column != nullptr && split_column->size() != ds.size()) {
        throw InputError("split column length does not match dataset");
    }
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    if (!preamble.empty()) {
        out << "# " << preamble << '\n';
    }
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t j = 0; j < ds.feature_width(); ++j) {
        out << (ds.feature_names.empty() ? "x" + std::to_string(j) : ds.feature_names[j]) << ',';
    }
    out << "y,a";
    for (const auto& [task, values] : ds.transfer_labels) {
        out << ",t:" << task;
    }
    if (split_column != nullptr) {
        out << ",split";
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
            out << ds.features(row, j) << ',';
        }
        out << ds.labels[i] << ',' << ds.sensitive[i];
        for (const auto& [task, values] : ds.transfer_labels) {
            out << ',' << values[i];
        }
        if (split_column != nullptr) {
            out << ',' << (*split_column)[i];
        }
        out << '\n';
    }
}

// --------------------------------------------------------------- standardize

Standardizer Standardizer::fit(const GroupedDataset& ds, std::span<const std::size_t> rows) {
    if (rows.empty()) {
        throw InputError("cannot fit standardization on zero rows");
    }
    Standardizer s;
    s.columns = ds.continuous_columns;
    for (auto c : s.columns) {
        const auto col = static_cast<Eigen::Index>(c);
        double mean = 0.0;
        for (auto r : rows) {
            mean += ds.features(static_cast<Eigen::Index>(r), col);
        }
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (auto r : rows) {
            const double d = ds.features(static_cast<Eigen::Index>(r), col) - mean;
            var += d * d;
        }
        var /= static_cast<double>(rows.size());
        s.means.push_back(mean);
        // Constant columns are centred only.
        s.scales.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
    }
    return s;
}

GroupedDataset Standardizer::apply(const GroupedDataset& ds) const {
    GroupedDataset out = ds;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        auto col = out.features.col(static_cast<Eigen::Index>(columns[k]));
        col = (col.array() - means[k]) / scales[k];
    }
    return out;
}

// --------------------------------------------------------------------- splits

void SplitSpec::validate() const {
    const auto check_triplet = [](double a, double b, double c, const char* what) {
        for (double f : {a, b, c}) {
            if (!(f > 0.0 && f < 1.0)) {
                throw InputError(std::string(what) + " fractions must each lie in (0,1)");
            }
        }
        if (std::abs(a + b + c - 1.0) > 1e-9) {
            throw InputError(std::string(what) + " fractions must sum to 1");
        }
    };
    check_triplet(train, validation, test, "split");
    check_triplet(transfer_train, transfer_validation, transfer_test, "transfer split");
}

namespace {

std::array<std::size_t, 3> part_sizes(std::size_t n, double first, double second) {
    const auto a = static_cast<std::size_t>(std::llround(first * static_cast<double>(n)));
    const auto b = static_cast<std::size_t>(std::llround(second * static_cast<double>(n)));
    if (a + b >= n) {
        return {a, b, 0};
    }
    return {a, b, n - a - b};
}

}  // namespace

SplitIndices split(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    const auto sizes = part_sizes(n, spec.train, spec.validation);
    if (sizes[0] < 1 || sizes[1] < 1 || sizes[2] < 1) {
        throw InputError("split of " + std::to_string(n) + " rows leaves a partition with fewer than 1 row");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    SplitIndices out;
    const auto take = [&](std::vector<std::size_t>& dst, std::size_t from, std::size_t count) {
        dst.assign(order.begin() + static_cast<std::ptrdiff_t>(from),
                   order.begin() + static_cast<std::ptrdiff_t>(from + count));
    };
    take(out.train, 0, sizes[0]);
    take(out.validation, sizes[0], sizes[1]);
    take(out.test, sizes[0] + sizes[1], sizes[2]);

    const auto sub = part_sizes(out.test.size(), spec.transfer_train, spec.transfer_validation);
    if (sub[0] < 1 || sub[1] < 1 || sub[2] < 1) {
        throw InputError("transfer split of " + std::to_string(out.test.size()) +
                         " test rows leaves a partition with fewer than 1 row");
    }
    const auto& test = out.test;
    out.transfer_train.assign(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(sub[0]));
    out.transfer_validation.assign(test.begin() + static_cast<std::ptrdiff_t>(sub[0]),
                                   test.begin() + static_cast<std::ptrdiff_t>(sub[0] + sub[1]));
    out.transfer_test.assign(test.begin() + static_cast<std::ptrdiff_t>(sub[0] + sub[1]), test.end());
    return out;
}

DataSplits make_splits(const GroupedDataset& ds, const SplitSpec& spec) {
    ds.validate();
    const auto idx = split(ds.size(), spec);
    const auto scaler = Standardizer::fit(ds, idx.train);
    const auto scaled = scaler.apply(ds);
    return {scaled.subset(idx.train),          scaled.subset(idx.validation),
            scaled.subset(idx.test),           scaled.subset(idx.transfer_train),
            scaled.subset(idx.transfer_validation), scaled.subset(idx.transfer_test)};
}

// ------------------------------------------------------------------ synthetic

void SyntheticSpec::validate() const {
    if (n < 4) {
        throw InputError("synthetic dataset needs at least 4 rows");
    }
    if (d < 5) {
        throw InputError("synthetic dataset needs at least 5 feature columns");
    }
    if (!(p_sensitive > 0.0 && p_sensitive < 1.0)) {
        throw InputError("p(A=1) must lie strictly inside (0,1)");
    }
    for (double r : base_rates) {
        if (!(r > 0.0 && r < 1.0)) {
            throw InputError("per-group base rates must lie strictly inside (0,1)");
        }
    }
    if (!(proxy_strength >= 0.0 && proxy_strength <= 1.0)) {
        throw InputError("proxy strength must lie in [0,1]");
    }
}

namespace {

constexpr double kProxyScale = 2.5;
constexpr double kLabelScale = 1.0;

const std::vector<std::string>& pcg_task_names() {
    static const std::vector<std::string> names{"MSC2a3",  "METAB3",  "ARTHSPIN", "NEUMENT", "RESPR4",
                                                "MISCHRT", "SKNAUT", "GIBLEED",  "INFEC4",  "TRAUMA"};
    return names;
}

}  // namespace

GroupedDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution group(spec.p_sensitive);
    std::normal_distribution<double> noise(0.0, 1.0);

    const auto n = spec.n;
    const auto d = static_cast<Eigen::Index>(spec.d);
    GroupedDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), d);
    ds.labels.resize(n);
    ds.sensitive.resize(n);
    constexpr int kLatent = 3;
    Matrix latent(static_cast<Eigen::Index>(n), kLatent);

    const double s = spec.proxy_strength;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const int a = group(rng) ? 1 : 0;
        const int y = std::bernoulli_distribution(spec.base_rates[static_cast<std::size_t>(a)])(rng) ? 1 : 0;
        ds.sensitive[i] = a;
        ds.labels[i] = y;
        const double fa = 2.0 * a - 1.0;
        const double fy = 2.0 * y - 1.0;
        for (int k = 0; k < kLatent; ++k) {
            latent(row, k) = noise(rng);
        }
        ds.features(row, 0) = s * kProxyScale * fa + noise(rng);
        ds.features(row, 1) = s * kProxyScale * fa + noise(rng);
        ds.features(row, 2) = kLabelScale * fy + noise(rng);
        ds.features(row, 3) = kLabelScale * fy + noise(rng);
        ds.features(row, 4) = 0.5 * kLabelScale * fy + 0.5 * s * kProxyScale * fa + noise(rng);
        for (Eigen::Index j = 5; j < d; ++j) {
            ds.features(row, j) = latent(row, (j - 5) % kLatent) + 0.5 * noise(rng);
        }
    }

    const auto tasks = spec.transfer_tasks;
    for (std::size_t t = 0; t < tasks; ++t) {
        const double frac = tasks > 1 ? static_cast<double>(t) / static_cast<double>(tasks - 1) : 0.0;
        const double base_rate = 0.09 + 0.51 * frac;
        const double label_weight = 1.0 - 0.9 * frac;
        const double group_weight = 0.4 + 0.4 * std::fmod(0.37 * static_cast<double>(t), 1.0);
        std::vector<double> score(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            score[i] = label_weight * (2.0 * ds.labels[i] - 1.0) + group_weight * (2.0 * ds.sensitive[i] - 1.0) +
                       0.8 * latent(row, static_cast<Eigen::Index>(t % kLatent)) + 0.5 * noise(rng);
        }
        // Positives are the top base_rate fraction of scores.
        std::vector<double> sorted = score;
        const auto positives = static_cast<std::size_t>(std::llround(base_rate * static_cast<double>(n)));
        const auto cut = n - std::min(n, positives);
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(std::min(cut, n - 1)),
                         sorted.end());
        const double threshold = sorted[std::min(cut, n - 1)];
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = positives > 0 && score[i] >= threshold ? 1 : 0;
        }
        const std::string name = t < pcg_task_names().size() ? pcg_task_names()[t] : "task" + std::to_string(t);
        ds.transfer_labels[name] = std::move(labels);
    }

    for (Eigen::Index j = 0; j < d; ++j) {
        ds.feature_names.push_back("x" + std::to_string(j));
        ds.continuous_columns.push_back(static_cast<std::size_t>(j));
    }
    ds.validate();
    return ds;
}

Schema adult_schema() {
    return Schema::parse(R"(
column.age = feature-continuous
column.workclass = feature-categorical
column.fnlwgt = ignore
column.education = feature-categorical
column.education-num = feature-continuous
column.marital-status = feature-categorical
column.occupation = feature-categorical
column.relationship = feature-categorical
column.race = feature-categorical
column.sex = sensitive
column.capital-gain = feature-continuous
column.capital-loss = feature-continuous
column.hours-per-week = feature-continuous
column.native-country = feature-categorical
column.income = label
map.sex = Male:0, Female:1
map.income = <=50K:0, >50K:1, <=50K.:0, >50K.:1
)");
}

Schema health_schema() {
    std::string text = R"(
column.MemberID = ignore
column.AgeAtFirstClaim = sensitive
map.AgeAtFirstClaim = 0-9:0, 10-19:0, 20-29:0, 30-39:0, 40-49:0, 50-59:0, 60-69:0, 70-79:1, 80+:1
column.Sex = feature-categorical
column.CharlsonIndex = label
binarize.CharlsonIndex = nonzero
column.ClaimsCount = feature-continuous
column.LengthOfStay = feature-continuous
column.DrugCount = feature-continuous
column.LabCount = feature-continuous
)";
    for (const auto& task : pcg_task_names()) {
        text += "column.pcg_" + task + " = transfer-label:" + task + "\n";
        text += "binarize.pcg_" + task + " = nonzero\n";
    }
    return Schema::parse(text);
}

}  // namespace laftr::data
