#pragma once

#include "eulac/types.hpp"

#include <span>
#include <vector>

namespace eulac {

/// Samples from the training distribution, labels remapped to 1..K.
///
/// A dataset drawn from the testing distribution (a "test set") reuses this
/// type; it may additionally carry the augmented label K+1.
struct LabeledDataset {
    FeatureMatrix features;
    std::vector<Label> labels;
    int num_known = 0;
    /// original_labels[k-1] is the file-level id of internal class k.
    std::vector<int> original_labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return features.cols(); }
    [[nodiscard]] Label new_class() const noexcept { return new_class_label(num_known); }
    [[nodiscard]] bool contains_new_class() const;
    /// Number of samples per internal label, indexed 1..K+1 (slot 0 unused).
    [[nodiscard]] std::vector<std::size_t> class_counts() const;

    /// Throws invalid_input if labels fall outside 1..K (or 1..K+1 when
    /// allow_new_class), features are non-finite, or shapes disagree.
    void validate(bool allow_new_class) const;
};

struct UnlabeledDataset {
    FeatureMatrix features;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return features.cols(); }

    void validate() const;
};

/// Row subsets.
[[nodiscard]] FeatureMatrix select_rows(const FeatureMatrix &features, std::span<const std::size_t> rows);
[[nodiscard]] LabeledDataset select(const LabeledDataset &data, std::span<const std::size_t> rows);
[[nodiscard]] UnlabeledDataset select(const UnlabeledDataset &data, std::span<const std::size_t> rows);

/// Stacks labeled features on top of unlabeled features.
[[nodiscard]] FeatureMatrix stack(const FeatureMatrix &top, const FeatureMatrix &bottom);

/// Drops the labels; used when a labeled pool feeds the unlabeled role.
[[nodiscard]] UnlabeledDataset strip_labels(const LabeledDataset &data);

/// Builds a dataset from raw integer labels, remapping the distinct values to
/// 1..K in ascending order and retaining the inverse table.
[[nodiscard]] LabeledDataset remap_labels(FeatureMatrix features, std::span<const int> raw_labels);

}  // namespace eulac
