#pragma once

#include "eulac/data/dataset.hpp"
#include "eulac/kernel.hpp"
#include "eulac/loss.hpp"
#include "eulac/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace eulac {

/// K+1 kernel expansions over the combined support (labeled rows first, then
/// unlabeled rows): f_c(x) = sum_i alpha(i, c) k(x, support_i).
struct DualModel {
    FeatureMatrix support;
    std::size_t n_labeled = 0;
    Matrix alpha;  // n x (K+1), last column is f_nc
    KernelSpec kernel;
    LossKind loss = LossKind::square;
    double theta = 1.0;
    double lambda = 1.0;
    std::vector<int> original_labels;

    [[nodiscard]] int num_known() const noexcept { return static_cast<int>(alpha.cols()) - 1; }
    void validate() const;
};

struct FitOptions {
    double lambda = 1e-2;
    int max_iterations = 5000;
    double gradient_tolerance = 1e-6;
    Seed seed = 0;

    void validate() const;
};

struct ConvergenceRecord {
    int iterations = 0;
    double gradient_norm = 0.0;  // max-norm of the objective gradient in alpha
    bool converged = true;
    std::vector<double> objective_trace;  // one entry per accepted iterate
};

struct FitResult {
    DualModel model;
    ConvergenceRecord record;
};

/// Regularized empirical LAC objective over dual coefficients. gram is the
/// Gram matrix of the full support; the first labels.size() rows are labeled.
struct ObjectiveSetup {
    double theta = 1.0;
    double lambda = 1.0;
    LossKind loss = LossKind::square;
    /// Drops the unlabeled-data term (used to isolate the linear labeled term).
    bool include_unlabeled = true;
};

/// R_hat_LAC(G alpha) + lambda * sum_c alpha_c^T G alpha_c.
[[nodiscard]] double objective(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup);

/// Exact gradient of objective() with respect to alpha, n x (K+1).
[[nodiscard]] Matrix objective_gradient(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup);

/// Square loss: solves the K+1 stationarity systems exactly.
[[nodiscard]] FitResult fit_square_closed_form(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                                               double lambda);

/// Same, reusing a precomputed Gram matrix of the stacked support.
[[nodiscard]] FitResult fit_square_closed_form(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                                               double lambda, const Matrix &gram);

/// Kernel gradient descent with Armijo backtracking (halving) from alpha = 0.
/// record.converged is false when max_iterations ran out or the line search
/// failed; the model is returned either way.
[[nodiscard]] FitResult fit_first_order(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                                        const FitOptions &options, LossKind loss);
[[nodiscard]] FitResult fit(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                            const FitOptions &options, LossKind loss, const Matrix &gram);
[[nodiscard]] FitResult fit_first_order(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                                        const FitOptions &options, LossKind loss, const Matrix &gram);

/// Closed form for the square loss, first-order otherwise.
[[nodiscard]] FitResult fit(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, double theta,
                            const FitOptions &options, LossKind loss);

/// m x (K+1) scores of the model at the query points.
[[nodiscard]] Matrix predict_scores(const DualModel &model, const FeatureMatrix &queries);

/// argmax over the K+1 scores; ties go to the smallest index, so nc (the last
/// index) only wins a tie it does not share with a known class.
[[nodiscard]] Label predict_label(const Eigen::Ref<const Eigen::RowVectorXd> &scores);
[[nodiscard]] std::vector<Label> predict_labels(const Matrix &scores);

/// Versioned text dump; every double is written as a hex float so a reload
/// reproduces the model bit for bit.
void save_model(std::ostream &out, const DualModel &model);
void save_model(const std::filesystem::path &path, const DualModel &model);
[[nodiscard]] DualModel load_model(std::istream &in, const std::string &source);
[[nodiscard]] DualModel load_model(const std::filesystem::path &path);

}  // namespace eulac
