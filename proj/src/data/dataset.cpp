#include "eulac/data/dataset.hpp"

#include <algorithm>
#include <map>

namespace eulac {

bool LabeledDataset::contains_new_class() const {
    const Label nc = new_class();
    return std::find(labels.begin(), labels.end(), nc) != labels.end();
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_known) + 2, 0);
    for (const Label y : labels) {
        if (y >= 1 && y <= num_known + 1) {
            ++counts[static_cast<std::size_t>(y)];
        }
    }
    return counts;
}

void LabeledDataset::validate(const bool allow_new_class) const {
    if (num_known < 1) {
        throw invalid_input{ "labeled dataset needs at least one known class" };
    }
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw invalid_input{ "labeled dataset: feature rows and label count differ" };
    }
    if (features.rows() > 0 && features.cols() < 1) {
        throw invalid_input{ "labeled dataset: feature dimension must be at least 1" };
    }
    if (!features.allFinite()) {
        throw invalid_input{ "labeled dataset: non-finite feature value" };
    }
    const Label max_label = allow_new_class ? new_class() : num_known;
    for (const Label y : labels) {
        if (y < 1 || y > max_label) {
            throw invalid_input{ "labeled dataset: label " + std::to_string(y) + " outside 1.." + std::to_string(max_label) };
        }
    }
}

void UnlabeledDataset::validate() const {
    if (features.rows() == 0) {
        throw invalid_input{ "unlabeled dataset is empty" };
    }
    if (features.cols() < 1) {
        throw invalid_input{ "unlabeled dataset: feature dimension must be at least 1" };
    }
    if (!features.allFinite()) {
        throw invalid_input{ "unlabeled dataset: non-finite feature value" };
    }
}

FeatureMatrix select_rows(const FeatureMatrix &features, std::span<const std::size_t> rows) {
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

LabeledDataset select(const LabeledDataset &data, std::span<const std::size_t> rows) {
    LabeledDataset out;
    out.features = select_rows(data.features, rows);
    out.labels.reserve(rows.size());
    for (const std::size_t r : rows) {
        out.labels.push_back(data.labels[r]);
    }
    out.num_known = data.num_known;
    out.original_labels = data.original_labels;
    return out;
}

UnlabeledDataset select(const UnlabeledDataset &data, std::span<const std::size_t> rows) {
    return UnlabeledDataset{ select_rows(data.features, rows) };
}

FeatureMatrix stack(const FeatureMatrix &top, const FeatureMatrix &bottom) {
    if (top.rows() > 0 && bottom.rows() > 0 && top.cols() != bottom.cols()) {
        throw invalid_input{ "cannot stack feature matrices of dimension " + std::to_string(top.cols()) + " and " + std::to_string(bottom.cols()) };
    }
    const Eigen::Index cols = top.rows() > 0 ? top.cols() : bottom.cols();
    FeatureMatrix out(top.rows() + bottom.rows(), cols);
    if (top.rows() > 0) {
        out.topRows(top.rows()) = top;
    }
    if (bottom.rows() > 0) {
        out.bottomRows(bottom.rows()) = bottom;
    }
    return out;
}

UnlabeledDataset strip_labels(const LabeledDataset &data) {
    return UnlabeledDataset{ data.features };
}

LabeledDataset remap_labels(FeatureMatrix features, std::span<const int> raw_labels) {
    std::map<int, Label> table;
    for (const int raw : raw_labels) {
        table.emplace(raw, 0);
    }
    LabeledDataset out;
    Label next = 1;
    for (auto &[raw, internal] : table) {
        internal = next++;
        out.original_labels.push_back(raw);
    }
    out.labels.reserve(raw_labels.size());
    for (const int raw : raw_labels) {
        out.labels.push_back(table.at(raw));
    }
    out.num_known = static_cast<int>(table.size());
    out.features = std::move(features);
    return out;
}

}  // namespace eulac
