#include "eulac/risk.hpp"
#include "eulac/solver.hpp"
#include "solver_detail.hpp"

namespace eulac {

namespace detail {

void check_objective_inputs(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup) {
    if (gram.rows() != gram.cols()) {
        throw invalid_input{ "objective: Gram matrix must be square" };
    }
    if (alpha.rows() != gram.rows() || alpha.cols() < 2) {
        throw invalid_input{ "objective: alpha is " + std::to_string(alpha.rows()) + "x" + std::to_string(alpha.cols()) + ", Gram is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) };
    }
    if (labels.empty() || static_cast<Eigen::Index>(labels.size()) > gram.rows()) {
        throw invalid_input{ "objective: labeled count must be in 1..n" };
    }
    if (setup.include_unlabeled && static_cast<Eigen::Index>(labels.size()) == gram.rows()) {
        throw invalid_input{ "objective: no unlabeled rows in the support" };
    }
    if (!(setup.theta > 0.0) || setup.theta > 1.0) {
        throw invalid_input{ "objective: theta must lie in (0, 1]" };
    }
    if (!(setup.lambda >= 0.0)) {
        throw invalid_input{ "objective: lambda must be non-negative" };
    }
}

Matrix score_derivatives(const Matrix &scores, std::span<const Label> labels, const ObjectiveSetup &setup) {
    const Eigen::Index n = scores.rows();
    const Eigen::Index K = scores.cols() - 1;
    const auto n_l = static_cast<Eigen::Index>(labels.size());
    const Eigen::Index n_u = n - n_l;
    Matrix d = Matrix::Zero(n, K + 1);
    const double w_l = setup.theta / static_cast<double>(n_l);
    for (Eigen::Index i = 0; i < n_l; ++i) {
        const Label y = labels[static_cast<std::size_t>(i)];
        if (y < 1 || y > K) {
            throw invalid_input{ "objective: label " + std::to_string(y) + " outside 1.." + std::to_string(K) };
        }
        d(i, K) += w_l;
        d(i, y - 1) -= w_l;
    }
    if (setup.include_unlabeled) {
        const double w_u = 1.0 / static_cast<double>(n_u);
        for (Eigen::Index j = n_l; j < n; ++j) {
            d(j, K) = w_u * loss_derivative(setup.loss, scores(j, K));
            for (Eigen::Index k = 0; k < K; ++k) {
                d(j, k) = -w_u * loss_derivative(setup.loss, -scores(j, k));
            }
        }
    }
    return d;
}

double objective_from_scores(const Matrix &alpha, const Matrix &scores, std::span<const Label> labels, const ObjectiveSetup &setup) {
    const auto n_l = static_cast<Eigen::Index>(labels.size());
    const Eigen::Index n_u = scores.rows() - n_l;
    double risk = 0.0;
    if (setup.include_unlabeled) {
        risk = empirical_lac_risk(scores.topRows(n_l), labels, scores.bottomRows(n_u), setup.theta, setup.loss);
    } else {
        const Eigen::Index K = scores.cols() - 1;
        double s = 0.0;
        for (Eigen::Index i = 0; i < n_l; ++i) {
            s += scores(i, K) - scores(i, labels[static_cast<std::size_t>(i)] - 1);
        }
        risk = setup.theta * s / static_cast<double>(n_l);
    }
    // alpha_c^T G alpha_c summed over columns, with G alpha already in scores
    const double penalty = alpha.cwiseProduct(scores).sum();
    return risk + setup.lambda * penalty;
}

}  // namespace detail

double objective(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup) {
    detail::check_objective_inputs(alpha, gram, labels, setup);
    const Matrix scores = gram * alpha;
    return detail::objective_from_scores(alpha, scores, labels, setup);
}

Matrix objective_gradient(const Matrix &alpha, const Matrix &gram, std::span<const Label> labels, const ObjectiveSetup &setup) {
    detail::check_objective_inputs(alpha, gram, labels, setup);
    const Matrix scores = gram * alpha;
    const Matrix d = detail::score_derivatives(scores, labels, setup);
    return gram * (d + 2.0 * setup.lambda * alpha);
}

}  // namespace eulac
