#pragma once

#include "eulac/data/dataset.hpp"
#include "eulac/loss.hpp"
#include "eulac/solver.hpp"
#include "eulac/types.hpp"

#include <json.hpp>

#include <vector>

namespace eulac {

struct HyperGrid {
    /// Bandwidths are multiples of the median pairwise distance over L and U.
    std::vector<double> sigma_multipliers = default_sigma_multipliers();
    /// lambda = 1/C for C in {1e-3, ..., 1e1}
    std::vector<double> lambda_candidates{ 1e-3, 1e-2, 1e-1, 1.0, 10.0 };
    LossKind loss = LossKind::square;
    std::size_t folds = 5;
    /// Iteration limits for the non-square losses; lambda is taken from the grid.
    FitOptions fit_options;

    void validate() const;
};

struct CvCell {
    double sigma_multiplier = 1.0;
    double sigma = 1.0;
    double lambda = 1.0;
    double mean_risk = 0.0;
    double standard_error = 0.0;
    std::vector<double> fold_risks;
    bool converged = true;
};

struct CvReport {
    std::vector<CvCell> cells;  // grid order, sigma-major
    std::size_t selected = 0;
    std::size_t folds = 0;
    double median_distance = 0.0;
    double theta = 1.0;
    LossKind loss = LossKind::square;

    [[nodiscard]] const CvCell &best() const { return cells.at(selected); }
};

/// k-fold CV of the empirical LAC risk (no regularizer) on held-out labeled
/// and unlabeled data. Selects the smallest mean risk; exact ties go to the
/// larger lambda, then the larger sigma.
[[nodiscard]] CvReport cross_validate(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, double theta, const HyperGrid &grid, Seed seed);

struct Selection {
    FitResult fit;
    CvReport report;
};

/// cross_validate, then a refit on all data at the selected cell.
[[nodiscard]] Selection fit_with_selection(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, double theta, const HyperGrid &grid,
                                           Seed seed);

/// Index of the winning cell under the selection rule above.
[[nodiscard]] std::size_t select_cell(const std::vector<CvCell> &cells);

void to_json(nlohmann::json &out, const CvCell &cell);
void to_json(nlohmann::json &out, const CvReport &report);

}  // namespace eulac
