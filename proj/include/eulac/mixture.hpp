#pragma once

#include "eulac/kernel.hpp"
#include "eulac/types.hpp"

#include <vector>

namespace eulac {

/// Point of the audit curve: candidate c = 1/theta and the RKHS distance
/// d(c) = min over nu in the convex hull of all sample embeddings of
/// || mu_U - (1/c) mu_L - (1 - 1/c) nu ||.
struct DistancePoint {
    double candidate = 1.0;
    double distance = 0.0;
};

struct ThetaEstimate {
    double theta = 1.0;
    std::vector<DistancePoint> curve;
    /// Set when the curve never flattened below the slope threshold and the
    /// estimator fell back to theta = 1.
    bool fallback = false;
    double slope_threshold = 0.0;
};

struct MixtureOptions {
    /// Slope threshold constant: the curve counts as flat once its slope in
    /// 1/c drops to tau * (1/sqrt(n_l) + 1/sqrt(n_u)).
    double tau = 3.0;
    int grid_points = 64;
    double max_candidate = 20.0;
    /// Incomplete-Cholesky accuracy (residual trace per point) and rank cap.
    double rank_tolerance = 1e-6;
    Eigen::Index max_rank = 600;
    /// Major-iteration cap of the min-norm-point solver.
    int max_qp_iterations = 3000;
    double qp_gap_tolerance = 1e-10;
};

/// Estimates the share of known-class mass in the unlabeled (test) sample.
[[nodiscard]] ThetaEstimate estimate_theta(const FeatureMatrix &labeled, const FeatureMatrix &unlabeled, const KernelSpec &kernel,
                                           const MixtureOptions &options = {});

/// Gaussian kernel with the median-heuristic bandwidth over labeled and
/// unlabeled points together.
[[nodiscard]] KernelSpec mixture_kernel(const FeatureMatrix &labeled, const FeatureMatrix &unlabeled);

/// Known theta, passed through with an empty curve.
[[nodiscard]] ThetaEstimate theta_override(double value);

/// Distance of `target` (in factor coordinates) to the scaled convex hull
/// scale * conv(rows of factor), by the Wolfe min-norm-point algorithm.
/// `weights` warm-starts and receives the minimizer.
[[nodiscard]] double hull_distance(const Matrix &factor, const Vector &target, double scale, Vector &weights, int max_iterations, double gap_tolerance);

/// Euclidean projection onto the probability simplex.
[[nodiscard]] Vector project_to_simplex(const Vector &v);

}  // namespace eulac
