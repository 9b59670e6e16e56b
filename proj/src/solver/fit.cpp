#include "eulac/solver.hpp"
#include "solver_detail.hpp"

#include <cmath>

namespace eulac {

namespace {

constexpr double armijo_constant = 1e-4;
constexpr double backtrack_factor = 0.5;
constexpr double initial_step = 1.0;
constexpr double min_step = 1e-20;

void check_fit_inputs(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta) {
    labeled.validate(false);
    unlabeled.validate();
    kernel.validate();
    if (labeled.size() == 0) {
        throw invalid_input{ "fit: labeled dataset is empty" };
    }
    if (labeled.dimension() != unlabeled.dimension()) {
        throw invalid_input{ "fit: labeled and unlabeled dimensions differ" };
    }
    if (!(theta > 0.0) || theta > 1.0) {
        throw invalid_input{ "fit: theta must lie in (0, 1]" };
    }
}

DualModel make_model(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta, const double lambda,
                     const LossKind loss) {
    DualModel model;
    model.support = stack(labeled.features, unlabeled.features);
    model.n_labeled = labeled.size();
    model.alpha = Matrix::Zero(model.support.rows(), labeled.num_known + 1);
    model.kernel = kernel;
    model.loss = loss;
    model.theta = theta;
    model.lambda = lambda;
    model.original_labels = labeled.original_labels;
    if (model.original_labels.empty()) {
        for (int k = 1; k <= labeled.num_known; ++k) {
            model.original_labels.push_back(k);
        }
    }
    return model;
}

}  // namespace

void DualModel::validate() const {
    if (alpha.cols() < 2 || alpha.rows() != support.rows()) {
        throw invalid_input{ "model: coefficient shape does not match support" };
    }
    if (n_labeled > static_cast<std::size_t>(support.rows())) {
        throw invalid_input{ "model: labeled count exceeds support size" };
    }
    if (!alpha.allFinite() || !support.allFinite()) {
        throw invalid_input{ "model: non-finite coefficient or support value" };
    }
    if (original_labels.size() != static_cast<std::size_t>(num_known())) {
        throw invalid_input{ "model: label table size does not match class count" };
    }
    kernel.validate();
}

void FitOptions::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw invalid_input{ "fit options: lambda must be positive" };
    }
    if (max_iterations < 1) {
        throw invalid_input{ "fit options: max_iterations must be at least 1" };
    }
    if (!(gradient_tolerance > 0.0)) {
        throw invalid_input{ "fit options: gradient tolerance must be positive" };
    }
}

FitResult fit_square_closed_form(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta,
                                 const double lambda) {
    check_fit_inputs(labeled, unlabeled, kernel, theta);
    const Matrix g = gram(kernel, stack(labeled.features, unlabeled.features));
    return fit_square_closed_form(labeled, unlabeled, kernel, theta, lambda, g);
}

FitResult fit_square_closed_form(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta,
                                 const double lambda, const Matrix &g) {
    check_fit_inputs(labeled, unlabeled, kernel, theta);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw invalid_input{ "fit: lambda must be positive" };
    }
    const auto n_l = static_cast<Eigen::Index>(labeled.size());
    const auto n_u = static_cast<Eigen::Index>(unlabeled.size());
    const Eigen::Index n = n_l + n_u;
    if (g.rows() != n || g.cols() != n) {
        throw invalid_input{ "fit: Gram matrix does not match the support size" };
    }
    const int K = labeled.num_known;

    // Stationarity reduces to (P_U G / (2 n_u) + 2 lambda I) a = c per column,
    // with P_U selecting unlabeled rows. Labeled rows give a_L = c_L / (2
    // lambda); the unlabeled block is symmetric positive definite.
    const double half_inv_nu = 0.5 / static_cast<double>(n_u);
    const double w_l = theta / static_cast<double>(n_l);
    Matrix c = Matrix::Zero(n, K + 1);
    for (Eigen::Index i = 0; i < n_l; ++i) {
        c(i, labeled.labels[static_cast<std::size_t>(i)] - 1) = w_l;
        c(i, K) = -w_l;
    }
    c.bottomRows(n_u).leftCols(K).setConstant(-half_inv_nu);
    c.bottomRows(n_u).col(K).setConstant(half_inv_nu);

    Matrix alpha(n, K + 1);
    alpha.topRows(n_l) = c.topRows(n_l) / (2.0 * lambda);

    Matrix system = half_inv_nu * g.bottomRightCorner(n_u, n_u);
    system.diagonal().array() += 2.0 * lambda;
    const Matrix rhs = c.bottomRows(n_u) - half_inv_nu * g.bottomLeftCorner(n_u, n_l) * alpha.topRows(n_l);
    const Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
        throw solver_error{ "square-loss system is not positive definite (reciprocal condition estimate " + std::to_string(llt.rcond()) + ")" };
    }
    alpha.bottomRows(n_u) = llt.solve(rhs);
    if (!alpha.allFinite()) {
        throw solver_error{ "square-loss solve produced non-finite coefficients (reciprocal condition estimate " + std::to_string(llt.rcond()) + ")" };
    }

    FitResult result{ make_model(labeled, unlabeled, kernel, theta, lambda, LossKind::square), {} };
    result.model.alpha = std::move(alpha);
    const ObjectiveSetup setup{ theta, lambda, LossKind::square, true };
    result.record.gradient_norm = objective_gradient(result.model.alpha, g, labeled.labels, setup).cwiseAbs().maxCoeff();
    result.record.objective_trace.push_back(objective(result.model.alpha, g, labeled.labels, setup));
    return result;
}

FitResult fit_first_order(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta,
                          const FitOptions &options, const LossKind loss) {
    check_fit_inputs(labeled, unlabeled, kernel, theta);
    return fit_first_order(labeled, unlabeled, kernel, theta, options, loss, gram(kernel, stack(labeled.features, unlabeled.features)));
}

FitResult fit_first_order(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta,
                          const FitOptions &options, const LossKind loss, const Matrix &g) {
    check_fit_inputs(labeled, unlabeled, kernel, theta);
    options.validate();
    if (g.rows() != static_cast<Eigen::Index>(labeled.size() + unlabeled.size()) || g.cols() != g.rows()) {
        throw invalid_input{ "fit: Gram matrix does not match the support size" };
    }
    const std::span<const Label> labels = labeled.labels;
    const ObjectiveSetup setup{ theta, options.lambda, loss, true };

    FitResult result{ make_model(labeled, unlabeled, kernel, theta, options.lambda, loss), {} };
    Matrix alpha = std::move(result.model.alpha);
    Matrix scores = g * alpha;
    double value = detail::objective_from_scores(alpha, scores, labels, setup);
    result.record.objective_trace.push_back(value);
    result.record.converged = false;

    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration) {
        // The gradient in alpha is G (D + 2 lambda alpha); stepping along
        // -(D + 2 lambda alpha) is steepest descent in the RKHS norm.
        const Matrix direction = -(detail::score_derivatives(scores, labels, setup) + 2.0 * options.lambda * alpha);
        const Matrix gradient = -(g * direction);
        result.record.gradient_norm = gradient.cwiseAbs().maxCoeff();
        if (result.record.gradient_norm <= options.gradient_tolerance) {
            result.record.converged = true;
            break;
        }
        const double slope = gradient.cwiseProduct(direction).sum();
        const Matrix score_step = g * direction;
        double step = initial_step;
        bool accepted = false;
        while (step >= min_step) {
            const Matrix trial_alpha = alpha + step * direction;
            const Matrix trial_scores = scores + step * score_step;
            const double trial = detail::objective_from_scores(trial_alpha, trial_scores, labels, setup);
            if (trial <= value + armijo_constant * step * slope) {
                alpha = trial_alpha;
                scores = trial_scores;
                value = trial;
                accepted = true;
                break;
            }
            step *= backtrack_factor;
        }
        if (!accepted) {
            break;
        }
        result.record.objective_trace.push_back(value);
    }
    if (!result.record.converged && iteration == options.max_iterations) {
        // recompute the final gradient norm for the last accepted iterate
        const Matrix d = detail::score_derivatives(scores, labels, setup) + 2.0 * options.lambda * alpha;
        result.record.gradient_norm = (g * d).cwiseAbs().maxCoeff();
        result.record.converged = result.record.gradient_norm <= options.gradient_tolerance;
    }
    result.record.iterations = iteration;
    result.model.alpha = std::move(alpha);
    return result;
}

FitResult fit(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta, const FitOptions &options,
              const LossKind loss) {
    if (loss == LossKind::square) {
        options.validate();
        return fit_square_closed_form(labeled, unlabeled, kernel, theta, options.lambda);
    }
    return fit_first_order(labeled, unlabeled, kernel, theta, options, loss);
}

FitResult fit(const LabeledDataset &labeled, const UnlabeledDataset &unlabeled, const KernelSpec &kernel, const double theta, const FitOptions &options,
              const LossKind loss, const Matrix &g) {
    options.validate();
    if (loss == LossKind::square) {
        return fit_square_closed_form(labeled, unlabeled, kernel, theta, options.lambda, g);
    }
    return fit_first_order(labeled, unlabeled, kernel, theta, options, loss, g);
}

Matrix predict_scores(const DualModel &model, const FeatureMatrix &queries) {
    if (queries.cols() != model.support.cols()) {
        throw invalid_input{ "predict: query dimension " + std::to_string(queries.cols()) + " does not match model dimension " + std::to_string(model.support.cols()) };
    }
    if (queries.rows() == 0) {
        return Matrix(0, model.alpha.cols());
    }
    return kernel_expansion(model.kernel, queries, model.support, model.alpha);
}

Label predict_label(const Eigen::Ref<const Eigen::RowVectorXd> &scores) {
    if (scores.size() < 2) {
        throw invalid_input{ "predict_label: need K+1 >= 2 scores" };
    }
    if (!scores.allFinite()) {
        throw invalid_input{ "predict_label: non-finite score" };
    }
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) {
            best = k;
        }
    }
    return static_cast<Label>(best + 1);
}

std::vector<Label> predict_labels(const Matrix &scores) {
    std::vector<Label> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        out[static_cast<std::size_t>(j)] = predict_label(scores.row(j));
    }
    return out;
}

}  // namespace eulac
