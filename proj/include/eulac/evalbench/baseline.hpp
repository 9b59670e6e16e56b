#pragma once

#include "eulac/data/dataset.hpp"
#include "eulac/kernel.hpp"
#include "eulac/modelsel.hpp"

#include <vector>

namespace eulac {

/// K one-vs-rest square-loss kernel classifiers trained on labeled data
/// alone. A query whose K scores are all negative is rejected as nc.
struct OvrRejectModel {
    FeatureMatrix support;
    Matrix alpha;  // n_l x K
    KernelSpec kernel;
    double lambda = 1.0;

    [[nodiscard]] int num_known() const noexcept { return static_cast<int>(alpha.cols()); }
};

/// Minimizes (1/n_l) sum_i sum_k psi(t_ik f_k(x_i)) + lambda sum_k ||f_k||^2
/// with psi(z) = (1 - z)^2 / 4 and targets t in {+1, -1}, i.e. solves
/// (G + 4 lambda n_l I) a = t.
[[nodiscard]] OvrRejectModel fit_ovr_reject(const LabeledDataset &labeled, const KernelSpec &kernel, double lambda);

/// m x K known-class scores.
[[nodiscard]] Matrix ovr_reject_scores(const OvrRejectModel &model, const FeatureMatrix &queries);

/// nc (K+1) when every score is strictly negative, else the first argmax.
[[nodiscard]] std::vector<Label> ovr_reject_predict(const OvrRejectModel &model, const FeatureMatrix &queries);

/// Mean OVR square loss of known-class scores on labeled points.
[[nodiscard]] double ovr_square_risk(const Matrix &scores, std::span<const Label> labels);

struct BaselineSelection {
    OvrRejectModel model;
    std::vector<CvCell> cells;
    std::size_t selected = 0;
};

/// Same sigma multipliers, lambda candidates and fold count as EULAC; the
/// bandwidth base is the median distance over the labeled points and the
/// validation criterion is the held-out OVR square risk.
[[nodiscard]] BaselineSelection fit_ovr_reject_with_selection(const LabeledDataset &labeled, const HyperGrid &grid, Seed seed);

}  // namespace eulac
