#include "eulac/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace eulac {

namespace {

// Hands out rows of one class in shuffled order; wraps around once the pool is
// exhausted so later sets may overlap earlier ones but never themselves.
class ClassPool {
  public:
    ClassPool(std::vector<std::size_t> rows, Rng &rng) : rows_{ std::move(rows) } {
        std::shuffle(rows_.begin(), rows_.end(), rng);
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    void take(const std::size_t count, std::vector<std::size_t> &out) {
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(rows_[cursor_ % rows_.size()]);
            ++cursor_;
        }
    }

  private:
    std::vector<std::size_t> rows_;
    std::size_t cursor_ = 0;
};

std::vector<std::size_t> draw(std::vector<ClassPool *> &pools, std::span<const std::size_t> counts, const std::string &what) {
    std::vector<std::size_t> rows;
    for (std::size_t c = 0; c < pools.size(); ++c) {
        if (counts[c] > pools[c]->size()) {
            throw invalid_input{ "insufficient samples: " + what + " needs " + std::to_string(counts[c]) + " samples from a class with " + std::to_string(pools[c]->size()) };
        }
        pools[c]->take(counts[c], rows);
    }
    return rows;
}

}  // namespace

void ClassConfiguration::validate(std::span<const int> class_ids) const {
    const std::set<int> ids(class_ids.begin(), class_ids.end());
    if (known_labels.empty()) {
        throw invalid_input{ "class configuration: no known classes" };
    }
    std::set<int> seen;
    for (const int id : known_labels) {
        if (!ids.contains(id)) {
            throw invalid_input{ "class configuration: known class " + std::to_string(id) + " not in dataset" };
        }
        if (!seen.insert(id).second) {
            throw invalid_input{ "class configuration: duplicate class " + std::to_string(id) };
        }
    }
    for (const int id : new_labels) {
        if (!ids.contains(id)) {
            throw invalid_input{ "class configuration: new class " + std::to_string(id) + " not in dataset" };
        }
        if (!seen.insert(id).second) {
            throw invalid_input{ "class configuration: class " + std::to_string(id) + " is both known and new" };
        }
    }
}

ClassConfiguration random_class_configuration(std::span<const int> class_ids, const Seed seed) {
    std::vector<int> ids(class_ids.begin(), class_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Rng rng{ seed };
    std::shuffle(ids.begin(), ids.end(), rng);
    ClassConfiguration config;
    config.seed = seed;
    const std::size_t num_new = ids.size() / 2;
    config.new_labels.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(num_new));
    config.known_labels.assign(ids.begin() + static_cast<std::ptrdiff_t>(num_new), ids.end());
    std::sort(config.known_labels.begin(), config.known_labels.end());
    std::sort(config.new_labels.begin(), config.new_labels.end());
    return config;
}

std::vector<std::size_t> apportion(const std::size_t total, std::span<const double> weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> parts(weights.size(), 0);
    if (weights.empty() || total == 0) {
        return parts;
    }
    if (!(sum > 0.0)) {
        throw invalid_input{ "apportion: weights must have positive sum" };
    }
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        parts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += parts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
        ++parts[remainders[i % remainders.size()].second];
    }
    return parts;
}

ShiftSplit split_class_configuration(const LabeledDataset &full, const ClassConfiguration &config, const SplitSizes &sizes, const Seed seed,
                                     const std::optional<double> known_fraction) {
    config.validate(full.original_labels);
    if (known_fraction && (!(*known_fraction > 0.0) || *known_fraction > 1.0)) {
        throw invalid_input{ "known fraction must lie in (0, 1]" };
    }
    if (known_fraction && *known_fraction < 1.0 && config.new_labels.empty()) {
        throw invalid_input{ "known fraction below 1 requires at least one new class" };
    }

    std::map<int, std::vector<std::size_t>> rows_by_original;
    for (std::size_t i = 0; i < full.size(); ++i) {
        rows_by_original[full.original_labels[static_cast<std::size_t>(full.labels[i] - 1)]].push_back(i);
    }

    std::vector<int> known = config.known_labels;
    std::vector<int> fresh = config.new_labels;
    std::sort(known.begin(), known.end());
    std::sort(fresh.begin(), fresh.end());

    Rng rng{ seed };
    std::vector<ClassPool> pools;
    pools.reserve(known.size() + fresh.size());
    for (const int id : known) {
        pools.emplace_back(rows_by_original.at(id), rng);
    }
    for (const int id : fresh) {
        pools.emplace_back(rows_by_original.at(id), rng);
    }

    std::vector<ClassPool *> known_pools;
    std::vector<ClassPool *> all_pools;
    for (std::size_t c = 0; c < pools.size(); ++c) {
        all_pools.push_back(&pools[c]);
        if (c < known.size()) {
            known_pools.push_back(&pools[c]);
        }
    }

    std::vector<double> known_weights;
    for (const ClassPool *p : known_pools) {
        known_weights.push_back(static_cast<double>(p->size()));
    }
    std::vector<double> mixture_weights;
    double known_total = 0.0;
    double new_total = 0.0;
    for (std::size_t c = 0; c < pools.size(); ++c) {
        (c < known.size() ? known_total : new_total) += static_cast<double>(pools[c].size());
    }
    for (std::size_t c = 0; c < pools.size(); ++c) {
        const auto size = static_cast<double>(pools[c].size());
        if (!known_fraction) {
            mixture_weights.push_back(size);
        } else if (c < known.size()) {
            mixture_weights.push_back(*known_fraction * size / known_total);
        } else {
            mixture_weights.push_back((1.0 - *known_fraction) * size / new_total);
        }
    }

    const auto labeled_rows = draw(known_pools, apportion(sizes.labeled, known_weights), "labeled set");
    const auto unlabeled_rows = draw(all_pools, apportion(sizes.unlabeled, mixture_weights), "unlabeled set");
    const auto test_rows = draw(all_pools, apportion(sizes.test, mixture_weights), "test set");

    std::map<int, Label> internal;
    for (std::size_t k = 0; k < known.size(); ++k) {
        internal[known[k]] = static_cast<Label>(k + 1);
    }
    const auto num_known = static_cast<int>(known.size());

    auto build = [&](std::vector<std::size_t> rows) {
        std::shuffle(rows.begin(), rows.end(), rng);
        LabeledDataset out;
        out.features = select_rows(full.features, rows);
        out.num_known = num_known;
        out.original_labels = known;
        out.labels.reserve(rows.size());
        for (const std::size_t r : rows) {
            const int original = full.original_labels[static_cast<std::size_t>(full.labels[r] - 1)];
            const auto it = internal.find(original);
            out.labels.push_back(it != internal.end() ? it->second : new_class_label(num_known));
        }
        return out;
    };

    ShiftSplit split;
    split.labeled = build(labeled_rows);
    split.unlabeled = strip_labels(build(unlabeled_rows));
    split.test = build(test_rows);
    return split;
}

std::vector<Fold> kfold_split(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const std::size_t k, const Seed seed) {
    if (k < 2) {
        throw invalid_input{ "k-fold split needs k >= 2" };
    }
    if (unlabeled.size() < k) {
        throw invalid_input{ "k-fold split: fewer unlabeled samples than folds" };
    }
    Rng rng{ seed };
    std::vector<std::vector<std::size_t>> val_l(k);
    std::vector<std::vector<std::size_t>> val_u(k);

    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        by_class[labeled.labels[i]].push_back(i);
    }
    std::size_t position = 0;
    for (auto &[label, rows] : by_class) {
        if (rows.size() < k) {
            throw invalid_input{ "k-fold split: class " + std::to_string(label) + " has " + std::to_string(rows.size()) + " samples, fewer than k = " + std::to_string(k) };
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        for (const std::size_t r : rows) {
            val_l[position++ % k].push_back(r);
        }
    }

    std::vector<std::size_t> urows(unlabeled.size());
    std::iota(urows.begin(), urows.end(), std::size_t{ 0 });
    std::shuffle(urows.begin(), urows.end(), rng);
    for (std::size_t p = 0; p < urows.size(); ++p) {
        val_u[p % k].push_back(urows[p]);
    }

    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_l;
        std::vector<std::size_t> train_u;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) {
                train_l.insert(train_l.end(), val_l[g].begin(), val_l[g].end());
                train_u.insert(train_u.end(), val_u[g].begin(), val_u[g].end());
            }
        }
        std::sort(train_l.begin(), train_l.end());
        std::sort(train_u.begin(), train_u.end());
        std::sort(val_l[f].begin(), val_l[f].end());
        std::sort(val_u[f].begin(), val_u[f].end());
        folds[f].train_labeled = select(labeled, train_l);
        folds[f].train_unlabeled = select(unlabeled, train_u);
        folds[f].val_labeled = select(labeled, val_l[f]);
        folds[f].val_unlabeled = select(unlabeled, val_u[f]);
        folds[f].train_labeled_rows = std::move(train_l);
        folds[f].train_unlabeled_rows = std::move(train_u);
        folds[f].val_labeled_rows = val_l[f];
        folds[f].val_unlabeled_rows = val_u[f];
    }
    return folds;
}

}  // namespace eulac
