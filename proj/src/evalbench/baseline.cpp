#include "eulac/evalbench/baseline.hpp"

#include "eulac/data/sampling.hpp"
#include "eulac/loss.hpp"

#include <cmath>
#include <numeric>

namespace eulac {

namespace {

Matrix targets(std::span<const Label> labels, const int num_known) {
    Matrix t = Matrix::Constant(static_cast<Eigen::Index>(labels.size()), num_known, -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        t(static_cast<Eigen::Index>(i), labels[i] - 1) = 1.0;
    }
    return t;
}

Matrix solve_ovr(const Matrix &g, std::span<const Label> labels, const int num_known, const double lambda) {
    Matrix system = g;
    system.diagonal().array() += 4.0 * lambda * static_cast<double>(labels.size());
    const Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
        throw solver_error{ "OVR baseline system is not positive definite" };
    }
    return llt.solve(targets(labels, num_known));
}

}  // namespace

OvrRejectModel fit_ovr_reject(const LabeledDataset &labeled, const KernelSpec &kernel, const double lambda) {
    labeled.validate(false);
    kernel.validate();
    if (labeled.size() == 0) {
        throw invalid_input{ "OVR baseline: labeled dataset is empty" };
    }
    if (!(lambda > 0.0)) {
        throw invalid_input{ "OVR baseline: lambda must be positive" };
    }
    OvrRejectModel model;
    model.support = labeled.features;
    model.kernel = kernel;
    model.lambda = lambda;
    model.alpha = solve_ovr(gram(kernel, labeled.features), labeled.labels, labeled.num_known, lambda);
    return model;
}

Matrix ovr_reject_scores(const OvrRejectModel &model, const FeatureMatrix &queries) {
    if (queries.cols() != model.support.cols()) {
        throw invalid_input{ "OVR baseline: query dimension does not match the model" };
    }
    if (queries.rows() == 0) {
        return Matrix(0, model.alpha.cols());
    }
    return kernel_expansion(model.kernel, queries, model.support, model.alpha);
}

std::vector<Label> ovr_reject_predict(const OvrRejectModel &model, const FeatureMatrix &queries) {
    const Matrix scores = ovr_reject_scores(model, queries);
    std::vector<Label> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < scores.cols(); ++k) {
            if (scores(j, k) > scores(j, best)) {
                best = k;
            }
        }
        out[static_cast<std::size_t>(j)] = scores(j, best) < 0.0 ? model.num_known() + 1 : static_cast<Label>(best + 1);
    }
    return out;
}

double ovr_square_risk(const Matrix &scores, std::span<const Label> labels) {
    if (static_cast<std::size_t>(scores.rows()) != labels.size() || labels.empty()) {
        throw invalid_input{ "OVR risk: score rows do not match labels" };
    }
    const Matrix t = targets(labels, static_cast<int>(scores.cols()));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        for (Eigen::Index k = 0; k < scores.cols(); ++k) {
            sum += loss_value(LossKind::square, t(i, k) * scores(i, k));
        }
    }
    return sum / static_cast<double>(labels.size());
}

BaselineSelection fit_ovr_reject_with_selection(const LabeledDataset &labeled, const HyperGrid &grid, const Seed seed) {
    grid.validate();
    labeled.validate(false);
    // the unlabeled half of the split is ignored; only labeled folds are used
    const std::vector<Fold> folds = kfold_split(labeled, strip_labels(labeled), grid.folds, seed);
    const double median = median_heuristic(labeled.features);
    const std::size_t n_lambda = grid.lambda_candidates.size();

    BaselineSelection selection;
    selection.cells.resize(grid.sigma_multipliers.size() * n_lambda);
    for (std::size_t s = 0; s < grid.sigma_multipliers.size(); ++s) {
        const KernelSpec kernel{ grid.sigma_multipliers[s] * median };
        const Matrix full = gram(kernel, labeled.features);
        for (std::size_t l = 0; l < n_lambda; ++l) {
            CvCell &cell = selection.cells[s * n_lambda + l];
            cell.sigma_multiplier = grid.sigma_multipliers[s];
            cell.sigma = kernel.sigma;
            cell.lambda = grid.lambda_candidates[l];
            for (const Fold &fold : folds) {
                std::vector<Eigen::Index> train(fold.train_labeled_rows.begin(), fold.train_labeled_rows.end());
                std::vector<Eigen::Index> val(fold.val_labeled_rows.begin(), fold.val_labeled_rows.end());
                const Matrix alpha = solve_ovr(full(train, train), fold.train_labeled.labels, labeled.num_known, cell.lambda);
                cell.fold_risks.push_back(ovr_square_risk(full(val, train) * alpha, fold.val_labeled.labels));
            }
            const auto k = static_cast<double>(cell.fold_risks.size());
            cell.mean_risk = std::accumulate(cell.fold_risks.begin(), cell.fold_risks.end(), 0.0) / k;
            double spread = 0.0;
            for (const double r : cell.fold_risks) {
                spread += (r - cell.mean_risk) * (r - cell.mean_risk);
            }
            cell.standard_error = std::sqrt(spread / (k - 1.0) / k);
        }
    }
    selection.selected = select_cell(selection.cells);
    const CvCell &best = selection.cells[selection.selected];
    selection.model = fit_ovr_reject(labeled, KernelSpec{ best.sigma }, best.lambda);
    return selection;
}

}  // namespace eulac
