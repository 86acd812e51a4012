#pragma once

// Adversary objectives evaluated on a minibatch of adversary outputs h in
// (0,1). The adversary maximizes each of them.
//
// The group-normalized l1 objectives average |h - a| inside every sensitive
// group (DP) or group-label cell (EO, EOpp) before summing, so they equal a
// test discrepancy for binary h and ignore group imbalance. The cross-entropy
// objective is a plain batch mean of the log-likelihood.

#include "laftr/nn.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace laftr::objectives {

enum class AdvObjectiveKind { DP, EO, EOpp, CE };

AdvObjectiveKind parse_kind(std::string_view text);
const char* to_string(AdvObjectiveKind kind);

/// True when the objective needs per-label cells (and the adversary sees y).
bool uses_label(AdvObjectiveKind kind);

struct CellAverages {
    std::array<std::array<double, 2>, 2> mean_abs_error{};  // [a][y]
    std::array<std::array<std::size_t, 2>, 2> count{};
};

/// Per-cell mean of |h - a| for every nonempty (a, y) cell.
CellAverages cell_averages(std::span<const double> h, std::span<const int> a, std::span<const int> y);

double adv_objective_dp(std::span<const double> h, std::span<const int> a);
double adv_objective_eo(std::span<const double> h, std::span<const int> a, std::span<const int> y);
double adv_objective_eopp(std::span<const double> h, std::span<const int> a, std::span<const int> y);
/// E[a log h + (1-a) log(1-h)] with h clamped into (1e-7, 1 - 1e-7).
double adv_objective_ce(std::span<const double> h, std::span<const int> a);

struct ObjectiveEvaluation {
    double value = 0.0;
    nn::Vector gradient;  // d value / d h
};

/// Value and gradient of the chosen objective. `y` may be empty for DP/CE.
ObjectiveEvaluation evaluate(AdvObjectiveKind kind, std::span<const double> h, std::span<const int> a,
                             std::span<const int> y);

}  // namespace laftr::objectives
