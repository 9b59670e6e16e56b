#include "eulac/modelsel.hpp"

#include "eulac/data/sampling.hpp"
#include "eulac/kernel.hpp"
#include "eulac/risk.hpp"

#include <cmath>
#include <numeric>

namespace eulac {

namespace {

std::vector<Eigen::Index> support_rows(const Fold &fold, const std::size_t n_labeled) {
    std::vector<Eigen::Index> rows;
    rows.reserve(fold.train_labeled_rows.size() + fold.train_unlabeled_rows.size());
    for (const std::size_t r : fold.train_labeled_rows) {
        rows.push_back(static_cast<Eigen::Index>(r));
    }
    for (const std::size_t r : fold.train_unlabeled_rows) {
        rows.push_back(static_cast<Eigen::Index>(n_labeled + r));
    }
    return rows;
}

std::vector<Eigen::Index> validation_rows(const std::vector<std::size_t> &rows, const std::size_t offset) {
    std::vector<Eigen::Index> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) {
        out.push_back(static_cast<Eigen::Index>(offset + r));
    }
    return out;
}

std::string cell_name(const double multiplier, const double lambda) {
    return "cv cell (sigma multiplier " + std::to_string(multiplier) + ", lambda " + std::to_string(lambda) + ")";
}

}  // namespace

void HyperGrid::validate() const {
    if (sigma_multipliers.empty() || lambda_candidates.empty()) {
        throw invalid_input{ "hyperparameter grid is empty" };
    }
    for (const double m : sigma_multipliers) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw invalid_input{ "sigma multipliers must be positive" };
        }
    }
    for (const double l : lambda_candidates) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw invalid_input{ "lambda candidates must be positive" };
        }
    }
    if (folds < 2) {
        throw invalid_input{ "cross-validation needs at least 2 folds" };
    }
}

std::size_t select_cell(const std::vector<CvCell> &cells) {
    if (cells.empty()) {
        throw invalid_input{ "select_cell: no cells" };
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const CvCell &a = cells[i];
        const CvCell &b = cells[best];
        const bool better = a.mean_risk < b.mean_risk ||
                            (a.mean_risk == b.mean_risk && (a.lambda > b.lambda || (a.lambda == b.lambda && a.sigma > b.sigma)));
        if (better) {
            best = i;
        }
    }
    return best;
}

CvReport cross_validate(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const double theta, const HyperGrid &grid, const Seed seed) {
    grid.validate();
    labeled.validate(false);
    unlabeled.validate();
    const std::vector<Fold> folds = kfold_split(labeled, unlabeled, grid.folds, seed);
    const FeatureMatrix points = stack(labeled.features, unlabeled.features);

    CvReport report;
    report.folds = grid.folds;
    report.theta = theta;
    report.loss = grid.loss;
    report.median_distance = median_heuristic(points);

    const std::size_t n_lambda = grid.lambda_candidates.size();
    report.cells.resize(grid.sigma_multipliers.size() * n_lambda);

    for (std::size_t s = 0; s < grid.sigma_multipliers.size(); ++s) {
        const double multiplier = grid.sigma_multipliers[s];
        const KernelSpec kernel{ multiplier * report.median_distance };
        // one Gram matrix per bandwidth, sliced per fold
        const Matrix full = gram(kernel, points);
        for (std::size_t l = 0; l < n_lambda; ++l) {
            CvCell &cell = report.cells[s * n_lambda + l];
            cell.sigma_multiplier = multiplier;
            cell.sigma = kernel.sigma;
            cell.lambda = grid.lambda_candidates[l];
            cell.fold_risks.assign(folds.size(), 0.0);
        }

        const auto tasks = static_cast<long>(folds.size() * n_lambda);
        std::vector<std::string> failures(static_cast<std::size_t>(tasks));
        std::vector<char> failed_solver(static_cast<std::size_t>(tasks), 0);
        std::vector<char> unconverged(static_cast<std::size_t>(tasks), 0);
#pragma omp parallel for schedule(dynamic)
        for (long task = 0; task < tasks; ++task) {
            const std::size_t f = static_cast<std::size_t>(task) / n_lambda;
            const std::size_t l = static_cast<std::size_t>(task) % n_lambda;
            CvCell &cell = report.cells[s * n_lambda + l];
            const Fold &fold = folds[f];
            try {
                const std::vector<Eigen::Index> rows = support_rows(fold, labeled.size());
                const Matrix train_gram = full(rows, rows);
                FitOptions options = grid.fit_options;
                options.lambda = cell.lambda;
                const FitResult result = fit(fold.train_labeled, fold.train_unlabeled, kernel, theta, options, grid.loss, train_gram);
                unconverged[static_cast<std::size_t>(task)] = result.record.converged ? 0 : 1;
                const Matrix val_l_scores = full(validation_rows(fold.val_labeled_rows, 0), rows) * result.model.alpha;
                const Matrix val_u_scores = full(validation_rows(fold.val_unlabeled_rows, labeled.size()), rows) * result.model.alpha;
                cell.fold_risks[f] = empirical_lac_risk(val_l_scores, fold.val_labeled.labels, val_u_scores, theta, grid.loss);
            } catch (const solver_error &e) {
                failures[static_cast<std::size_t>(task)] = cell_name(cell.sigma_multiplier, cell.lambda) + ", fold " + std::to_string(f + 1) + ": " + e.what();
                failed_solver[static_cast<std::size_t>(task)] = 1;
            } catch (const std::exception &e) {
                failures[static_cast<std::size_t>(task)] = cell_name(cell.sigma_multiplier, cell.lambda) + ", fold " + std::to_string(f + 1) + ": " + e.what();
            }
        }
        for (std::size_t t = 0; t < failures.size(); ++t) {
            if (unconverged[t]) {
                report.cells[s * n_lambda + t % n_lambda].converged = false;
            }
            if (!failures[t].empty()) {
                if (failed_solver[t]) {
                    throw solver_error{ failures[t] };
                }
                throw error{ failures[t] };
            }
        }
    }

    for (CvCell &cell : report.cells) {
        const auto k = static_cast<double>(cell.fold_risks.size());
        cell.mean_risk = std::accumulate(cell.fold_risks.begin(), cell.fold_risks.end(), 0.0) / k;
        double spread = 0.0;
        for (const double r : cell.fold_risks) {
            spread += (r - cell.mean_risk) * (r - cell.mean_risk);
        }
        cell.standard_error = std::sqrt(spread / (k - 1.0)) / std::sqrt(k);
    }
    report.selected = select_cell(report.cells);
    return report;
}

Selection fit_with_selection(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const double theta, const HyperGrid &grid,
                             const Seed seed) {
    CvReport report = cross_validate(labeled, unlabeled, theta, grid, seed);
    const CvCell &best = report.best();
    FitOptions options = grid.fit_options;
    options.lambda = best.lambda;
    FitResult result = fit(labeled, unlabeled, KernelSpec{ best.sigma }, theta, options, grid.loss);
    return Selection{ std::move(result), std::move(report) };
}

void to_json(nlohmann::json &out, const CvCell &cell) {
    out = nlohmann::json{ { "sigma_multiplier", cell.sigma_multiplier },
                          { "sigma", cell.sigma },
                          { "lambda", cell.lambda },
                          { "mean_risk", cell.mean_risk },
                          { "standard_error", cell.standard_error },
                          { "fold_risks", cell.fold_risks },
                          { "converged", cell.converged } };
}

void to_json(nlohmann::json &out, const CvReport &report) {
    out = nlohmann::json{ { "folds", report.folds },
                          { "theta", report.theta },
                          { "loss", to_string(report.loss) },
                          { "median_distance", report.median_distance },
                          { "selected", report.best() },
                          { "cells", report.cells } };
}

}  // namespace eulac
