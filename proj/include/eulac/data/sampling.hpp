#pragma once

#include "eulac/data/dataset.hpp"

#include <optional>
#include <random>
#include <vector>

namespace eulac {

using Rng = std::mt19937_64;

/// Partition of a dataset's original class ids into known and new classes.
struct ClassConfiguration {
    std::vector<int> known_labels;
    std::vector<int> new_labels;
    Seed seed = 0;

    /// Disjoint, non-empty known set, every id present in class_ids.
    void validate(std::span<const int> class_ids) const;
};

/// Picks floor(|class_ids| / 2) new classes uniformly at random.
[[nodiscard]] ClassConfiguration random_class_configuration(std::span<const int> class_ids, Seed seed);

/// Labeled, unlabeled and test sets produced by one sampling round.
struct ShiftSplit {
    LabeledDataset labeled;
    UnlabeledDataset unlabeled;
    /// Labels 1..K for known classes, K+1 for every new-class sample.
    LabeledDataset test;
};

struct SplitSizes {
    std::size_t labeled = 500;
    std::size_t unlabeled = 1000;
    std::size_t test = 1000;
};

/// Draws the labeled set from known classes only and the unlabeled/test sets
/// from the whole dataset with per-class stratification. When known_fraction
/// is given, unlabeled/test sets put exactly that share (rounded) on known
/// classes instead of the dataset's own proportions. Sets are disjoint when
/// every class has enough samples; otherwise a class pool is reused across
/// sets (never within one set).
[[nodiscard]] ShiftSplit split_class_configuration(const LabeledDataset &full, const ClassConfiguration &config, const SplitSizes &sizes, Seed seed,
                                                   std::optional<double> known_fraction = std::nullopt);

struct Fold {
    LabeledDataset train_labeled;
    UnlabeledDataset train_unlabeled;
    LabeledDataset val_labeled;
    UnlabeledDataset val_unlabeled;
    std::vector<std::size_t> train_labeled_rows;
    std::vector<std::size_t> train_unlabeled_rows;
    std::vector<std::size_t> val_labeled_rows;
    std::vector<std::size_t> val_unlabeled_rows;
};

/// Class-stratified folds over the labeled set and plain random folds over the
/// unlabeled set. Validation parts partition each dataset.
[[nodiscard]] std::vector<Fold> kfold_split(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, std::size_t k, Seed seed);

/// Splits total into parts proportional to weights (largest remainder, ties
/// to the lower index) so the parts sum to total exactly.
[[nodiscard]] std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights);

}  // namespace eulac
