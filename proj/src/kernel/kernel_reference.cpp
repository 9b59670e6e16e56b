#include "eulac/kernel.hpp"

#include <cmath>

namespace eulac::reference {

Matrix gram(const KernelSpec &spec, const FeatureMatrix &rows, const FeatureMatrix &cols) {
    spec.validate();
    detail::check_compatible(rows, cols, "reference::gram");
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix out(rows.rows(), cols.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < cols.rows(); ++j) {
            out(i, j) = std::exp(-detail::squared_distance(rows.row(i).data(), cols.row(j).data(), rows.cols()) * inv);
        }
    }
    return out;
}

Matrix kernel_expansion(const KernelSpec &spec, const FeatureMatrix &queries, const FeatureMatrix &support, const Matrix &coefficients) {
    spec.validate();
    detail::check_compatible(queries, support, "reference::kernel_expansion");
    if (coefficients.rows() != support.rows()) {
        throw invalid_input{ "reference::kernel_expansion: coefficient rows do not match support size" };
    }
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    Matrix out = Matrix::Zero(queries.rows(), coefficients.cols());
    for (Eigen::Index j = 0; j < queries.rows(); ++j) {
        for (Eigen::Index i = 0; i < support.rows(); ++i) {
            const double k = std::exp(-detail::squared_distance(queries.row(j).data(), support.row(i).data(), queries.cols()) * inv);
            for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
                out(j, c) += k * coefficients(i, c);
            }
        }
    }
    return out;
}

std::vector<double> pairwise_distances(const FeatureMatrix &points) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
            out.push_back(std::sqrt(detail::squared_distance(points.row(i).data(), points.row(j).data(), points.cols())));
        }
    }
    return out;
}

}  // namespace eulac::reference
