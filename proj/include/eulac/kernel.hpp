#pragma once

#include "eulac/types.hpp"

#include <span>
#include <vector>

namespace eulac {

/// Gaussian kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
struct KernelSpec {
    double sigma = 1.0;

    void validate() const;
};

using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

[[nodiscard]] double eval_kernel(const KernelSpec &spec, const RowRef &x, const RowRef &y);

/// Entry (i, j) = k(rows_i, cols_j). Parallel over rows; every entry is
/// computed independently with a fixed summation order, so the output is
/// bit-identical for any thread count.
[[nodiscard]] Matrix gram(const KernelSpec &spec, const FeatureMatrix &rows, const FeatureMatrix &cols);

/// gram(points, points), evaluating each unordered pair once.
[[nodiscard]] Matrix gram(const KernelSpec &spec, const FeatureMatrix &points);

/// out(j, c) = sum_i k(queries_j, support_i) * coefficients(i, c), without
/// materializing the Gram matrix.
[[nodiscard]] Matrix kernel_expansion(const KernelSpec &spec, const FeatureMatrix &queries, const FeatureMatrix &support, const Matrix &coefficients);

/// Euclidean distances over all unordered pairs i < j, in row-major pair order.
[[nodiscard]] std::vector<double> pairwise_distances(const FeatureMatrix &points);

/// Median of the pairwise distances (mean of the two middle values for an even
/// count). Throws if fewer than two points or the median is zero.
[[nodiscard]] double median_heuristic(const FeatureMatrix &points);

/// Default bandwidth multipliers applied to the median heuristic.
[[nodiscard]] std::vector<double> default_sigma_multipliers();

/// Low-rank factor G ~ Z Z^T from pivoted incomplete Cholesky. Stops when the
/// residual trace drops below tolerance or max_rank columns are built.
struct LowRankFactor {
    Matrix factor;
    double residual_trace = 0.0;
};
[[nodiscard]] LowRankFactor incomplete_cholesky(const KernelSpec &spec, const FeatureMatrix &points, double tolerance, Eigen::Index max_rank);

/// Serial implementations kept as the test oracle and benchmark baseline.
namespace reference {

[[nodiscard]] Matrix gram(const KernelSpec &spec, const FeatureMatrix &rows, const FeatureMatrix &cols);
[[nodiscard]] Matrix kernel_expansion(const KernelSpec &spec, const FeatureMatrix &queries, const FeatureMatrix &support, const Matrix &coefficients);
[[nodiscard]] std::vector<double> pairwise_distances(const FeatureMatrix &points);

}  // namespace reference

namespace detail {

inline double squared_distance(const double *x, const double *y, const Eigen::Index d) noexcept {
    double s = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x[k] - y[k];
        s += diff * diff;
    }
    return s;
}

void check_compatible(const FeatureMatrix &a, const FeatureMatrix &b, const char *what);

}  // namespace detail

}  // namespace eulac
