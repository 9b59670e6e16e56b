#include "eulac/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace eulac {

void KernelSpec::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw invalid_input{ "kernel bandwidth must be positive and finite" };
    }
}

namespace detail {

void check_compatible(const FeatureMatrix &a, const FeatureMatrix &b, const char *what) {
    if (a.rows() == 0 || b.rows() == 0) {
        throw invalid_input{ std::string{ what } + ": empty dataset" };
    }
    if (a.cols() != b.cols()) {
        throw invalid_input{ std::string{ what } + ": dimension mismatch (" + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")" };
    }
}

}  // namespace detail

double eval_kernel(const KernelSpec &spec, const RowRef &x, const RowRef &y) {
    spec.validate();
    if (x.size() != y.size()) {
        throw invalid_input{ "eval_kernel: dimension mismatch" };
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw invalid_input{ "eval_kernel: non-finite input" };
    }
    const Eigen::RowVectorXd xs = x;
    const Eigen::RowVectorXd ys = y;
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    return std::exp(-detail::squared_distance(xs.data(), ys.data(), xs.size()) * inv);
}

Matrix gram(const KernelSpec &spec, const FeatureMatrix &rows, const FeatureMatrix &cols) {
    spec.validate();
    detail::check_compatible(rows, cols, "gram");
    const Eigen::Index n = rows.rows();
    const Eigen::Index m = cols.rows();
    const Eigen::Index d = rows.cols();
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix out(n, m);

#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double *x = rows.row(i).data();
        for (Eigen::Index j = 0; j < m; ++j) {
            out(i, j) = std::exp(-detail::squared_distance(x, cols.row(j).data(), d) * inv);
        }
    }
    return out;
}

Matrix gram(const KernelSpec &spec, const FeatureMatrix &points) {
    spec.validate();
    detail::check_compatible(points, points, "gram");
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix out(n, n);

#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double *x = points.row(i).data();
        out(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-detail::squared_distance(x, points.row(j).data(), d) * inv);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Matrix kernel_expansion(const KernelSpec &spec, const FeatureMatrix &queries, const FeatureMatrix &support, const Matrix &coefficients) {
    spec.validate();
    detail::check_compatible(queries, support, "kernel_expansion");
    if (coefficients.rows() != support.rows()) {
        throw invalid_input{ "kernel_expansion: coefficient rows do not match support size" };
    }
    const Eigen::Index q = queries.rows();
    const Eigen::Index n = support.rows();
    const Eigen::Index c = coefficients.cols();
    const Eigen::Index d = queries.cols();
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    // row-major copy so each support point's coefficients are contiguous
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> coef = coefficients;
    Matrix out(q, c);

#pragma omp parallel
    {
        Eigen::RowVectorXd acc(c);
#pragma omp for schedule(static)
        for (Eigen::Index j = 0; j < q; ++j) {
            acc.setZero();
            const double *x = queries.row(j).data();
            for (Eigen::Index i = 0; i < n; ++i) {
                const double k = std::exp(-detail::squared_distance(x, support.row(i).data(), d) * inv);
                const double *a = coef.row(i).data();
                for (Eigen::Index col = 0; col < c; ++col) {
                    acc[col] += k * a[col];
                }
            }
            out.row(j) = acc;
        }
    }
    return out;
}

std::vector<double> pairwise_distances(const FeatureMatrix &points) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    std::vector<double> out(static_cast<std::size_t>(n * (n - 1) / 2));

#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        // offset of pair (i, i+1) in row-major upper-triangle order
        auto pos = static_cast<std::size_t>(i * n - i * (i + 1) / 2);
        const double *x = points.row(i).data();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out[pos++] = std::sqrt(detail::squared_distance(x, points.row(j).data(), d));
        }
    }
    return out;
}

double median_heuristic(const FeatureMatrix &points) {
    if (points.rows() < 2) {
        throw invalid_input{ "median heuristic needs at least two points" };
    }
    std::vector<double> dist = pairwise_distances(points);
    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    double median = dist[mid];
    if (dist.size() % 2 == 0) {
        const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    if (!(median > 0.0)) {
        throw invalid_input{ "median heuristic: median pairwise distance is zero" };
    }
    return median;
}

std::vector<double> default_sigma_multipliers() {
    return { 1e-2, 1e-1, 1.0, 10.0 };
}

LowRankFactor incomplete_cholesky(const KernelSpec &spec, const FeatureMatrix &points, const double tolerance, const Eigen::Index max_rank) {
    spec.validate();
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    const Eigen::Index limit = std::min(n, std::max<Eigen::Index>(max_rank, 1));
    Matrix factor = Matrix::Zero(n, limit);
    Vector residual = Vector::Ones(n);  // Gaussian kernel: k(x, x) = 1
    Eigen::Index rank = 0;
    while (rank < limit) {
        Eigen::Index pivot = 0;
        const double trace = residual.sum();
        if (trace <= tolerance) {
            break;
        }
        const double top = residual.maxCoeff(&pivot);
        if (top <= 0.0) {
            break;
        }
        const double scale = std::sqrt(top);
        const double *xp = points.row(pivot).data();
        Vector column(n);
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double k = std::exp(-detail::squared_distance(points.row(i).data(), xp, d) * inv);
            column[i] = (k - factor.row(i).head(rank).dot(factor.row(pivot).head(rank))) / scale;
        }
        column[pivot] = scale;
        factor.col(rank) = column;
        residual -= column.cwiseAbs2();
        residual[pivot] = 0.0;
        residual = residual.cwiseMax(0.0);
        ++rank;
    }
    LowRankFactor out;
    out.factor = factor.leftCols(rank);
    out.residual_trace = residual.sum();
    return out;
}

}  // namespace eulac
