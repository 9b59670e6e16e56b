#pragma once

#include "eulac/types.hpp"

#include <span>
#include <vector>

namespace eulac {

/// (K+1) x (K+1) counts, rows = truth, columns = prediction, nc last.
struct ConfusionMatrix {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;

    [[nodiscard]] int num_known() const noexcept { return static_cast<int>(counts.rows()) - 1; }
    [[nodiscard]] long long total() const { return counts.sum(); }
};

/// Labels must lie in 1..K+1.
[[nodiscard]] ConfusionMatrix confusion_matrix(std::span<const Label> truths, std::span<const Label> predictions, int num_known);

[[nodiscard]] double accuracy(const ConfusionMatrix &cm);

/// Per-class F1 averaged over the K+1 classes. A class with neither truths nor
/// predictions is left out; any other zero denominator counts as F1 = 0.
[[nodiscard]] double macro_f1(const ConfusionMatrix &cm);

/// Spearman rank correlation with average ranks for ties. Throws on fewer
/// than two points; returns 0 when either side is constant.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace eulac
