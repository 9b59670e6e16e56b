#include "eulac/evalbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace eulac {

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t p = i; p <= j; ++p) {
            ranks[order[p]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const Label> truths, std::span<const Label> predictions, const int num_known) {
    if (truths.size() != predictions.size()) {
        throw invalid_input{ "confusion matrix: " + std::to_string(truths.size()) + " truths but " + std::to_string(predictions.size()) + " predictions" };
    }
    if (num_known < 1) {
        throw invalid_input{ "confusion matrix: need at least one known class" };
    }
    ConfusionMatrix cm;
    cm.counts.setZero(num_known + 1, num_known + 1);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const Label t = truths[i];
        const Label p = predictions[i];
        if (t < 1 || t > num_known + 1 || p < 1 || p > num_known + 1) {
            throw invalid_input{ "confusion matrix: label out of range at index " + std::to_string(i) };
        }
        ++cm.counts(t - 1, p - 1);
    }
    return cm;
}

double accuracy(const ConfusionMatrix &cm) {
    const long long total = cm.total();
    if (total == 0) {
        throw invalid_input{ "accuracy: empty confusion matrix" };
    }
    return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix &cm) {
    if (cm.counts.size() == 0 || cm.total() == 0) {
        throw invalid_input{ "macro_f1: empty confusion matrix" };
    }
    double sum = 0.0;
    int classes = 0;
    for (Eigen::Index c = 0; c < cm.counts.rows(); ++c) {
        const long long truth = cm.counts.row(c).sum();
        const long long predicted = cm.counts.col(c).sum();
        if (truth == 0 && predicted == 0) {
            continue;
        }
        ++classes;
        const long long hit = cm.counts(c, c);
        if (hit == 0) {
            continue;  // P or R is zero or undefined
        }
        const double precision = static_cast<double>(hit) / static_cast<double>(predicted);
        const double recall = static_cast<double>(hit) / static_cast<double>(truth);
        sum += 2.0 * precision * recall / (precision + recall);
    }
    return sum / static_cast<double>(classes);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw invalid_input{ "spearman: need two equally long samples of size >= 2" };
    }
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double mean = 0.5 * static_cast<double>(x.size() + 1);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace eulac
