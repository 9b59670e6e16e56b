#include "eulac/risk.hpp"

#include <cmath>

namespace eulac {

namespace {

void check_weights(std::span<const double> weights, const std::size_t n, const char *what) {
    if (!weights.empty() && weights.size() != n) {
        throw invalid_input{ std::string{ what } + ": weight count does not match sample count" };
    }
}

// psi(f_nc) + sum_k psi(-f_k) for one row.
double unlabeled_term(const Matrix &scores, const Eigen::Index row, const LossKind loss) {
    const Eigen::Index K = scores.cols() - 1;
    double s = loss_value(loss, scores(row, K));
    for (Eigen::Index k = 0; k < K; ++k) {
        s += loss_value(loss, -scores(row, k));
    }
    return s;
}

void check_dist_scores(const Matrix &scores, const FiniteDistribution &dist) {
    if (static_cast<std::size_t>(scores.rows()) != dist.size() || scores.cols() != dist.num_known() + 1) {
        throw invalid_input{ "score table does not match the distribution's support (" + std::to_string(scores.rows()) + "x" + std::to_string(scores.cols()) + ")" };
    }
}

}  // namespace

double empirical_lac_risk(const Matrix &labeled_scores, std::span<const Label> labels, const Matrix &unlabeled_scores, const double theta,
                          const LossKind loss, std::span<const double> labeled_weights, std::span<const double> unlabeled_weights) {
    if (!(theta > 0.0) || theta > 1.0) {
        throw invalid_input{ "empirical LAC risk: theta must lie in (0, 1]" };
    }
    if (labeled_scores.rows() == 0 || unlabeled_scores.rows() == 0) {
        throw invalid_input{ "empirical LAC risk: empty dataset" };
    }
    if (labeled_scores.cols() != unlabeled_scores.cols() || labeled_scores.cols() < 2) {
        throw invalid_input{ "empirical LAC risk: mismatched class count between score tables" };
    }
    if (static_cast<std::size_t>(labeled_scores.rows()) != labels.size()) {
        throw invalid_input{ "empirical LAC risk: label count does not match labeled scores" };
    }
    check_weights(labeled_weights, labels.size(), "empirical LAC risk");
    check_weights(unlabeled_weights, static_cast<std::size_t>(unlabeled_scores.rows()), "empirical LAC risk");

    const Eigen::Index K = labeled_scores.cols() - 1;
    double labeled_sum = 0.0;
    for (Eigen::Index i = 0; i < labeled_scores.rows(); ++i) {
        const Label y = labels[static_cast<std::size_t>(i)];
        if (y < 1 || y > K) {
            throw invalid_input{ "empirical LAC risk: labeled sample with label " + std::to_string(y) + " outside 1.." + std::to_string(K) };
        }
        const double term = labeled_scores(i, K) - labeled_scores(i, y - 1);
        labeled_sum += labeled_weights.empty() ? term : labeled_weights[static_cast<std::size_t>(i)] * term;
    }
    double unlabeled_sum = 0.0;
    for (Eigen::Index j = 0; j < unlabeled_scores.rows(); ++j) {
        const double term = unlabeled_term(unlabeled_scores, j, loss);
        unlabeled_sum += unlabeled_weights.empty() ? term : unlabeled_weights[static_cast<std::size_t>(j)] * term;
    }
    const double labeled_mean = labeled_weights.empty() ? labeled_sum / static_cast<double>(labeled_scores.rows()) : labeled_sum;
    const double unlabeled_mean = unlabeled_weights.empty() ? unlabeled_sum / static_cast<double>(unlabeled_scores.rows()) : unlabeled_sum;
    return theta * labeled_mean + unlabeled_mean;
}

double ovr_risk_from_joint(const Matrix &joint, const Matrix &scores, const LossKind loss) {
    if (joint.rows() != scores.rows() || joint.cols() != scores.cols()) {
        throw invalid_input{ "OVR risk: joint and score tables differ in shape" };
    }
    const Eigen::Index C = scores.cols();
    double total = 0.0;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        // psi(-f_k) summed over all k, then swapped for psi(f_y) per label
        double all_negative = 0.0;
        for (Eigen::Index k = 0; k < C; ++k) {
            all_negative += loss_value(loss, -scores(j, k));
        }
        for (Eigen::Index y = 0; y < C; ++y) {
            const double p = joint(j, y);
            if (p != 0.0) {
                total += p * (all_negative - loss_value(loss, -scores(j, y)) + loss_value(loss, scores(j, y)));
            }
        }
    }
    return total;
}

double exact_ovr_risk(const Matrix &scores, const FiniteDistribution &dist, const LossKind loss) {
    check_dist_scores(scores, dist);
    return ovr_risk_from_joint(dist.test_joint(), scores, loss);
}

double exact_lac_risk(const Matrix &scores, const FiniteDistribution &dist, const LossKind loss) {
    check_dist_scores(scores, dist);
    const Eigen::Index K = dist.num_known();
    const Matrix &train = dist.train_joint();
    const Vector marginal = dist.test_marginal();
    double labeled = 0.0;
    double unlabeled = 0.0;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        for (Eigen::Index k = 0; k < K; ++k) {
            labeled += train(j, k) * (scores(j, K) - scores(j, k));
        }
        unlabeled += marginal[j] * unlabeled_term(scores, j, loss);
    }
    return dist.theta() * labeled + unlabeled;
}

double exact_nonconvex_lac_risk(const Matrix &scores, const FiniteDistribution &dist, const LossKind loss) {
    check_dist_scores(scores, dist);
    const Eigen::Index K = dist.num_known();
    const Matrix &train = dist.train_joint();
    const Vector marginal = dist.test_marginal();
    double labeled = 0.0;
    double unlabeled = 0.0;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        const double f_nc = scores(j, K);
        const double nc_part = loss_value(loss, -f_nc) - loss_value(loss, f_nc);
        for (Eigen::Index k = 0; k < K; ++k) {
            const double f = scores(j, k);
            labeled += train(j, k) * (loss_value(loss, f) - loss_value(loss, -f) + nc_part);
        }
        unlabeled += marginal[j] * unlabeled_term(scores, j, loss);
    }
    return dist.theta() * labeled + unlabeled;
}

double zero_one_risk(std::span<const Label> predictions, std::span<const Label> truths) {
    if (predictions.size() != truths.size()) {
        throw invalid_input{ "zero-one risk: prediction and truth lengths differ" };
    }
    if (truths.empty()) {
        throw invalid_input{ "zero-one risk: no samples" };
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        wrong += predictions[i] != truths[i] ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(truths.size());
}

double zero_one_risk_from_joint(const Matrix &joint, std::span<const Label> predictions) {
    if (static_cast<std::size_t>(joint.rows()) != predictions.size()) {
        throw invalid_input{ "zero-one risk: prediction count does not match support" };
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        const Label g = predictions[static_cast<std::size_t>(j)];
        if (g < 1 || g > joint.cols()) {
            throw invalid_input{ "zero-one risk: prediction outside 1..K+1" };
        }
        total += joint.row(j).sum() - joint(j, g - 1);
    }
    return total;
}

double bayes_risk_from_joint(const Matrix &joint) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        total += joint.row(j).sum() - joint.row(j).maxCoeff();
    }
    return total;
}

Matrix square_loss_optimal_scores(const Matrix &joint) {
    Matrix out = Matrix::Zero(joint.rows(), joint.cols());
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        const double p = joint.row(j).sum();
        if (p > 0.0) {
            out.row(j) = 2.0 * joint.row(j) / p - Eigen::RowVectorXd::Ones(joint.cols());
        } else {
            out.row(j).setConstant(-1.0);
        }
    }
    return out;
}

double min_square_lac_risk_from_joint(const Matrix &joint) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        const double p = joint.row(j).sum();
        if (p <= 0.0) {
            continue;
        }
        double s = 0.0;
        for (Eigen::Index y = 0; y < joint.cols(); ++y) {
            const double eta = joint(j, y) / p;
            s += eta * (1.0 - eta);
        }
        total += p * s;
    }
    return total;
}

double exact_zero_one_risk(const Matrix &scores, const FiniteDistribution &dist) {
    check_dist_scores(scores, dist);
    std::vector<Label> predictions(dist.size());
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < scores.cols(); ++k) {
            if (scores(j, k) > scores(j, best)) {
                best = k;
            }
        }
        predictions[static_cast<std::size_t>(j)] = static_cast<Label>(best + 1);
    }
    return zero_one_risk_from_joint(dist.test_joint(), predictions);
}

double exact_bayes_risk(const FiniteDistribution &dist) {
    return bayes_risk_from_joint(dist.test_joint());
}

void TheoryParams::validate() const {
    const bool positive = norm_bound > 0.0 && kernel_bound > 0.0 && lipschitz > 0.0 && loss_bound >= 0.0 && n_labeled > 0.0 && n_unlabeled > 0.0 && num_known >= 1;
    if (!positive) {
        throw invalid_input{ "theory parameters must be positive" };
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw invalid_input{ "theory parameters: delta must lie in (0, 1)" };
    }
    if (!(theta > 0.0) || theta > 1.0) {
        throw invalid_input{ "theory parameters: theta must lie in (0, 1]" };
    }
}

double theorem3_bound(const TheoryParams &p) {
    p.validate();
    const double classes = p.num_known + 1.0;
    const double radius = p.norm_bound * p.kernel_bound;
    const double log_term = std::log(4.0 / p.delta);
    return 2.0 * classes * radius / std::sqrt(p.n_labeled)
           + 6.0 * radius * std::sqrt(2.0 * log_term / p.n_labeled)
           + 2.0 * classes * p.lipschitz * radius / std::sqrt(p.n_unlabeled)
           + 3.0 * classes * p.loss_bound * std::sqrt(log_term / p.n_unlabeled);
}

TheoryParams with_loss_constants(TheoryParams params, const LossKind loss) {
    const LossBounds b = loss_bounds(loss, params.norm_bound * params.kernel_bound);
    params.lipschitz = b.lipschitz;
    params.loss_bound = b.sup;
    return params;
}

}  // namespace eulac
