#include "laftr/objectives.hpp"

#include "laftr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace laftr::objectives {

AdvObjectiveKind parse_kind(std::string_view text) {
    if (text == "dp") return AdvObjectiveKind::DP;
    if (text == "eo") return AdvObjectiveKind::EO;
    if (text == "eopp") return AdvObjectiveKind::EOpp;
    if (text == "ce") return AdvObjectiveKind::CE;
    throw InputError("unknown adversarial objective '" + std::string(text) + "' (expected dp|eo|eopp|ce)");
}

const char* to_string(AdvObjectiveKind kind) {
    switch (kind) {
        case AdvObjectiveKind::DP: return "dp";
        case AdvObjectiveKind::EO: return "eo";
        case AdvObjectiveKind::EOpp: return "eopp";
        case AdvObjectiveKind::CE: return "ce";
    }
    return "?";
}

bool uses_label(AdvObjectiveKind kind) { return kind == AdvObjectiveKind::EO || kind == AdvObjectiveKind::EOpp; }

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_lengths(std::span<const double> h, std::span<const int> a, std::span<const int> y, bool need_y) {
    if (h.size() != a.size() || (need_y && y.size() != h.size())) {
        throw InputError("adversary outputs, sensitive and label vectors differ in length");
    }
}

std::size_t index_of(int bit) { return static_cast<std::size_t>(bit != 0); }

// Cells are keyed by (a, y); `by_label` false merges both labels of a group.
struct Normalizer {
    std::array<std::array<std::size_t, 2>, 2> count{};
    bool by_label = true;

    std::size_t of(int a, int y) const {
        const auto ai = index_of(a);
        return by_label ? count[ai][index_of(y)] : count[ai][0] + count[ai][1];
    }
};

Normalizer count_cells(std::span<const int> a, std::span<const int> y, bool by_label) {
    Normalizer norm;
    norm.by_label = by_label;
    for (std::size_t i = 0; i < a.size(); ++i) {
        norm.count[index_of(a[i])][by_label ? index_of(y[i]) : 0] += 1;
    }
    return norm;
}

// value = (used cells) / 2 - sum over used cells of mean |h - a|, i.e.
// 1 - ... for DP and EOpp, 2 - ... for EO. Rows outside the used cells
// (y=1 for EOpp) contribute nothing.
ObjectiveEvaluation l1_objective(std::span<const double> h, std::span<const int> a, std::span<const int> y,
                                 bool by_label, bool only_y0) {
    const auto norm = count_cells(a, y, by_label);
    double offset = 0.0;
    for (int ai = 0; ai < 2; ++ai) {
        for (int yi = 0; yi < (by_label ? 2 : 1); ++yi) {
            if (only_y0 && yi == 1) {
                continue;
            }
            if (norm.of(ai, yi) == 0) {
                throw GroupStarvationError(by_label ? "batch has no rows in cell (a=" + std::to_string(ai) +
                                                          ", y=" + std::to_string(yi) + ")"
                                                    : "batch has no rows with a=" + std::to_string(ai));
            }
            offset += 0.5;
        }
    }
    ObjectiveEvaluation out{offset, nn::Vector::Zero(static_cast<Eigen::Index>(h.size()))};
    for (std::size_t i = 0; i < h.size(); ++i) {
        const int yi = by_label ? y[i] : 0;
        if (only_y0 && yi != 0) {
            continue;
        }
        const double weight = 1.0 / static_cast<double>(norm.of(a[i], yi));
        const double diff = h[i] - static_cast<double>(a[i]);
        out.value -= weight * std::abs(diff);
        out.gradient(static_cast<Eigen::Index>(i)) = -weight * sign(diff);
    }
    return out;
}

ObjectiveEvaluation ce_objective(std::span<const double> h, std::span<const int> a) {
    if (h.empty()) {
        throw InputError("cross-entropy objective on an empty batch");
    }
    const auto n = static_cast<double>(h.size());
    ObjectiveEvaluation out{0.0, nn::Vector::Zero(static_cast<Eigen::Index>(h.size()))};
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double raw = h[i];
        const double p = std::clamp(raw, nn::kProbClamp, 1.0 - nn::kProbClamp);
        const double t = static_cast<double>(a[i]);
        out.value += (t * std::log(p) + (1.0 - t) * std::log(1.0 - p)) / n;
        if (raw > nn::kProbClamp && raw < 1.0 - nn::kProbClamp) {
            out.gradient(static_cast<Eigen::Index>(i)) = (t / raw - (1.0 - t) / (1.0 - raw)) / n;
        }
    }
    return out;
}

}  // namespace

CellAverages cell_averages(std::span<const double> h, std::span<const int> a, std::span<const int> y) {
    check_lengths(h, a, y, true);
    CellAverages out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto ai = index_of(a[i]);
        const auto yi = index_of(y[i]);
        out.count[ai][yi] += 1;
        out.mean_abs_error[ai][yi] += std::abs(h[i] - static_cast<double>(a[i]));
    }
    for (std::size_t ai = 0; ai < 2; ++ai) {
        for (std::size_t yi = 0; yi < 2; ++yi) {
            if (out.count[ai][yi] > 0) {
                out.mean_abs_error[ai][yi] /= static_cast<double>(out.count[ai][yi]);
            }
        }
    }
    return out;
}

double adv_objective_dp(std::span<const double> h, std::span<const int> a) {
    return evaluate(AdvObjectiveKind::DP, h, a, {}).value;
}

double adv_objective_eo(std::span<const double> h, std::span<const int> a, std::span<const int> y) {
    return evaluate(AdvObjectiveKind::EO, h, a, y).value;
}

double adv_objective_eopp(std::span<const double> h, std::span<const int> a, std::span<const int> y) {
    return evaluate(AdvObjectiveKind::EOpp, h, a, y).value;
}

double adv_objective_ce(std::span<const double> h, std::span<const int> a) {
    return evaluate(AdvObjectiveKind::CE, h, a, {}).value;
}

ObjectiveEvaluation evaluate(AdvObjectiveKind kind, std::span<const double> h, std::span<const int> a,
                             std::span<const int> y) {
    check_lengths(h, a, y, uses_label(kind));
    switch (kind) {
        case AdvObjectiveKind::DP: return l1_objective(h, a, y, false, false);
        case AdvObjectiveKind::EO: return l1_objective(h, a, y, true, false);
        case AdvObjectiveKind::EOpp: return l1_objective(h, a, y, true, true);
        case AdvObjectiveKind::CE: return ce_objective(h, a);
    }
    throw InternalStateError("unhandled objective kind");
}

}  // namespace laftr::objectives
