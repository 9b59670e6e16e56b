#pragma once

#include "eulac/data/synthetic.hpp"
#include "eulac/loss.hpp"
#include "eulac/types.hpp"

#include <span>
#include <vector>

namespace eulac {

/// Score tables hold one row per point and K+1 columns: f_1..f_K, then f_nc.

/// Empirical LAC risk:
///   theta * mean_L (f_nc(x) - f_y(x)) + mean_U (psi(f_nc(x)) + sum_k psi(-f_k(x))).
/// Optional weights replace the uniform means (each must sum to one).
[[nodiscard]] double empirical_lac_risk(const Matrix &labeled_scores, std::span<const Label> labels, const Matrix &unlabeled_scores, double theta,
                                        LossKind loss, std::span<const double> labeled_weights = {}, std::span<const double> unlabeled_weights = {});

/// sum_j sum_y joint(j, y) [psi(f_y(x_j)) + sum_{k != y} psi(-f_k(x_j))].
/// joint need not be normalized (quadrature weights are accepted).
[[nodiscard]] double ovr_risk_from_joint(const Matrix &joint, const Matrix &scores, LossKind loss);

/// Expected OVR surrogate risk over the test distribution.
[[nodiscard]] double exact_ovr_risk(const Matrix &scores, const FiniteDistribution &dist, LossKind loss);

/// Convex LAC risk: theta E_tr[f_nc - f_y] + E_te,X[psi(f_nc) + sum_k psi(-f_k)].
[[nodiscard]] double exact_lac_risk(const Matrix &scores, const FiniteDistribution &dist, LossKind loss);

/// Non-convex form: theta E_tr[psi(f_y) - psi(-f_y) + psi(-f_nc) - psi(f_nc)]
/// + E_te,X[psi(f_nc) + sum_k psi(-f_k)]; equals the OVR risk for any psi.
[[nodiscard]] double exact_nonconvex_lac_risk(const Matrix &scores, const FiniteDistribution &dist, LossKind loss);

/// Fraction of mismatching labels.
[[nodiscard]] double zero_one_risk(std::span<const Label> predictions, std::span<const Label> truths);

/// 0-1 risk of per-point predictions (1..K+1) under an (unnormalized) joint.
[[nodiscard]] double zero_one_risk_from_joint(const Matrix &joint, std::span<const Label> predictions);
/// sum_j (sum_y joint(j, y) - max_y joint(j, y)).
[[nodiscard]] double bayes_risk_from_joint(const Matrix &joint);
/// Square-loss OVR minimizer per point: f_y = 2 eta_y - 1.
[[nodiscard]] Matrix square_loss_optimal_scores(const Matrix &joint);
/// Minimal square-loss OVR (= LAC) risk: sum_j p(x_j) sum_y eta_y (1 - eta_y).
[[nodiscard]] double min_square_lac_risk_from_joint(const Matrix &joint);

[[nodiscard]] double exact_zero_one_risk(const Matrix &scores, const FiniteDistribution &dist);
[[nodiscard]] double exact_bayes_risk(const FiniteDistribution &dist);

/// Constants of the uniform deviation bound between the LAC risk and its
/// empirical estimate over a norm-bounded RKHS ball.
struct TheoryParams {
    double norm_bound = 1.0;    // Lambda
    double kernel_bound = 1.0;  // r, with k(x, x) <= r^2
    double lipschitz = 1.0;     // L of psi on [-Lambda r, Lambda r]
    double loss_bound = 1.0;    // B_psi on the same interval
    double delta = 0.05;
    double theta = 1.0;
    int num_known = 1;
    double n_labeled = 1.0;
    double n_unlabeled = 1.0;

    void validate() const;
};

/// 2(K+1) Lambda r / sqrt(n_l) + 6 Lambda r sqrt(2 log(4/delta) / n_l)
///   + 2(K+1) L Lambda r / sqrt(n_u) + 3(K+1) B sqrt(log(4/delta) / n_u).
[[nodiscard]] double theorem3_bound(const TheoryParams &params);

/// Fills lipschitz and loss_bound from the loss on [-Lambda r, Lambda r].
[[nodiscard]] TheoryParams with_loss_constants(TheoryParams params, LossKind loss);

}  // namespace eulac
