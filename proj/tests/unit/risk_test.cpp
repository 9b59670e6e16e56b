#include "eulac/data/synthetic.hpp"
#include "eulac/risk.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace eulac {
namespace {

constexpr LossKind all_losses[] = { LossKind::square, LossKind::logistic, LossKind::double_hinge };

Matrix random_scores(const Eigen::Index rows, const Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.5);
    Matrix f(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            f(i, j) = normal(rng);
        }
    }
    return f;
}

// Straight transcription of the OVR definition, independent of the library.
double brute_force_ovr(const Matrix &scores, const FiniteDistribution &dist, const LossKind loss) {
    const Matrix joint = dist.test_joint();
    double total = 0.0;
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        for (Eigen::Index y = 0; y < joint.cols(); ++y) {
            double term = 0.0;
            for (Eigen::Index k = 0; k < joint.cols(); ++k) {
                term += k == y ? loss_value(loss, scores(j, k)) : loss_value(loss, -scores(j, k));
            }
            total += joint(j, y) * term;
        }
    }
    return total;
}

TEST(EmpiricalLac, ZeroScores) {
    const Matrix zeros = Matrix::Zero(3, 2);
    const std::vector<Label> labels{ 1, 1, 1 };
    EXPECT_DOUBLE_EQ(empirical_lac_risk(zeros, labels, zeros, 0.5, LossKind::square), 0.5);
}

TEST(EmpiricalLac, HandComputedExample) {
    Matrix labeled(1, 2);
    labeled << 1.0, 0.0;
    Matrix unlabeled(1, 2);
    unlabeled << -1.0, 2.0;
    const std::vector<Label> labels{ 1 };
    EXPECT_NEAR(empirical_lac_risk(labeled, labels, unlabeled, 0.6, LossKind::square), -0.35, 1e-15);
}

TEST(EmpiricalLac, Errors) {
    const Matrix zeros = Matrix::Zero(2, 3);
    const std::vector<Label> labels{ 1, 2 };
    EXPECT_THROW((void)empirical_lac_risk(Matrix::Zero(0, 3), {}, zeros, 0.5, LossKind::square), invalid_input);
    EXPECT_THROW((void)empirical_lac_risk(zeros, labels, Matrix::Zero(0, 3), 0.5, LossKind::square), invalid_input);
    EXPECT_THROW((void)empirical_lac_risk(zeros, labels, Matrix::Zero(2, 4), 0.5, LossKind::square), invalid_input);
    EXPECT_THROW((void)empirical_lac_risk(zeros, labels, zeros, 0.0, LossKind::square), invalid_input);
}

TEST(EmpiricalLac, WeightedSupportEqualsExactRisk) {
    Rng rng{ 11 };
    for (const LossKind loss : all_losses) {
        const FiniteDistribution dist = random_finite_distribution(20, 2, 0.6, rng);
        const Matrix scores = random_scores(20, 3, rng);
        // labeled sample = support of P_tr with its probabilities as weights
        std::vector<Label> labels;
        std::vector<double> lw;
        Matrix labeled(40, 3);
        Eigen::Index row = 0;
        const double theta = dist.theta();
        for (Eigen::Index j = 0; j < 20; ++j) {
            for (int k = 1; k <= 2; ++k) {
                labeled.row(row++) = scores.row(j);
                labels.push_back(k);
                lw.push_back(dist.train_joint()(j, k - 1));
            }
        }
        const Vector marginal = dist.test_marginal();
        const std::vector<double> uw(marginal.data(), marginal.data() + marginal.size());
        EXPECT_NEAR(empirical_lac_risk(labeled, labels, scores, theta, loss, lw, uw), exact_lac_risk(scores, dist, loss), 1e-12);
    }
}

TEST(ExactOvr, Examples) {
    Rng rng{ 1 };
    const FiniteDistribution dist = random_finite_distribution(10, 2, 0.7, rng);
    EXPECT_NEAR(exact_ovr_risk(Matrix::Zero(10, 3), dist, LossKind::square), 0.75, 1e-12);

    FeatureMatrix point(1, 2);
    point << 0.0, 0.0;
    const FiniteDistribution::Atom atom{ 0, 1, 1.0 };
    const FiniteDistribution single = FiniteDistribution::from_atoms(point, std::span{ &atom, 1 }, 2, 1.0);
    Matrix margined(1, 3);
    margined << 1.0, -1.0, -1.0;
    EXPECT_NEAR(exact_ovr_risk(margined, single, LossKind::square), 0.0, 1e-15);
}

TEST(ExactOvr, MatchesBruteForce) {
    Rng rng{ 2 };
    const FiniteDistribution dist = random_finite_distribution(20, 3, 0.4, rng);
    const Matrix scores = random_scores(20, 4, rng);
    for (const LossKind loss : all_losses) {
        EXPECT_NEAR(exact_ovr_risk(scores, dist, loss), brute_force_ovr(scores, dist, loss), 1e-12);
    }
}

TEST(ExactLac, ZeroModelOneKnownClass) {
    Rng rng{ 3 };
    const FiniteDistribution dist = random_finite_distribution(15, 1, 0.35, rng);
    EXPECT_NEAR(exact_lac_risk(Matrix::Zero(15, 2), dist, LossKind::square), 0.5, 1e-12);
}

TEST(ExactLac, ConvexFormEqualsOvrRisk) {
    Rng rng{ 4 };
    std::uniform_int_distribution<int> atoms(1, 50);
    std::uniform_int_distribution<int> classes(1, 4);
    std::uniform_real_distribution<double> theta(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const LossKind loss = all_losses[trial % 3];
        const auto m = static_cast<std::size_t>(atoms(rng));
        const int k = classes(rng);
        const FiniteDistribution dist = random_finite_distribution(m, k, theta(rng), rng);
        const Matrix scores = random_scores(static_cast<Eigen::Index>(m), k + 1, rng);
        const double ovr = exact_ovr_risk(scores, dist, loss);
        EXPECT_NEAR(exact_lac_risk(scores, dist, loss), ovr, 1e-10) << trial;
        EXPECT_NEAR(exact_nonconvex_lac_risk(scores, dist, loss), ovr, 1e-10) << trial;
    }
}

TEST(EmpiricalLac, UnbiasedOverRepeatedDraws) {
    Rng rng{ 5 };
    const FiniteDistribution dist = random_finite_distribution(12, 2, 0.6, rng);
    const Matrix scores = random_scores(12, 3, rng);
    const double target = exact_ovr_risk(scores, dist, LossKind::logistic);
    constexpr int draws = 1000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < draws; ++r) {
        const auto train = dist.sample_train(50, rng);
        const auto test = dist.sample_test_points(50, rng);
        Matrix labeled(50, 3);
        std::vector<Label> labels;
        for (std::size_t i = 0; i < train.size(); ++i) {
            labeled.row(static_cast<Eigen::Index>(i)) = scores.row(static_cast<Eigen::Index>(train[i].first));
            labels.push_back(train[i].second);
        }
        Matrix unlabeled(50, 3);
        for (std::size_t i = 0; i < test.size(); ++i) {
            unlabeled.row(static_cast<Eigen::Index>(i)) = scores.row(static_cast<Eigen::Index>(test[i]));
        }
        const double value = empirical_lac_risk(labeled, labels, unlabeled, dist.theta(), LossKind::logistic);
        sum += value;
        sum_sq += value * value;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
    EXPECT_LE(std::abs(mean - target), 3.0 * se);
}

TEST(ZeroOne, Examples) {
    const std::vector<Label> a{ 1, 2, 3, 1 };
    EXPECT_EQ(zero_one_risk(a, a), 0.0);
    const std::vector<Label> b{ 2, 3, 1, 2 };
    EXPECT_EQ(zero_one_risk(a, b), 1.0);
    // K = 2, nc = 3
    const std::vector<Label> c{ 1, 3, 3, 2 };
    EXPECT_EQ(zero_one_risk(a, c), 0.5);
    EXPECT_THROW((void)zero_one_risk(a, std::vector<Label>{ 1 }), invalid_input);
}

TEST(Theorem3, FourTermFormula) {
    TheoryParams p;
    p.num_known = 2;
    p.delta = 0.05;
    p.n_labeled = 1000;
    p.n_unlabeled = 1000;
    const double l4 = std::log(4.0 / 0.05);
    const double expected = 2.0 * 3 / std::sqrt(1000.0) + 6.0 * std::sqrt(2.0 * l4 / 1000.0) + 2.0 * 3 / std::sqrt(1000.0) + 3.0 * 3 * std::sqrt(l4 / 1000.0);
    EXPECT_NEAR(theorem3_bound(p), expected, 1e-12);
    EXPECT_NEAR(theorem3_bound(p), 1.5369, 5e-5);
}

TEST(Theorem3, VanishesAndDecreasesInUnlabeledSize) {
    TheoryParams p;
    p.num_known = 3;
    p.n_labeled = 1e16;
    p.n_unlabeled = 1e16;
    EXPECT_LT(theorem3_bound(p), 1e-6);
    p.n_labeled = 500;
    double previous = std::numeric_limits<double>::infinity();
    for (const double n : { 100.0, 1000.0, 10000.0 }) {
        p.n_unlabeled = n;
        const double value = theorem3_bound(p);
        EXPECT_LT(value, previous);
        previous = value;
    }
}

TEST(Theorem3, LossConstantsFollowTheNormBall) {
    TheoryParams p;
    p.norm_bound = 2.0;
    p.kernel_bound = 1.0;
    const TheoryParams filled = with_loss_constants(p, LossKind::square);
    EXPECT_DOUBLE_EQ(filled.loss_bound, loss_value(LossKind::square, -2.0));
    EXPECT_DOUBLE_EQ(filled.lipschitz, 1.5);
}

TEST(Theorem2, SquareLossTransferOnFiniteSupport) {
    Rng rng{ 6 };
    for (int trial = 0; trial < 50; ++trial) {
        const FiniteDistribution dist = random_finite_distribution(25, 2, 0.3 + 0.01 * trial, rng);
        const Matrix joint = dist.test_joint();
        const Matrix optimal = square_loss_optimal_scores(joint);
        const double min_lac = min_square_lac_risk_from_joint(joint);
        EXPECT_NEAR(exact_lac_risk(optimal, dist, LossKind::square), min_lac, 1e-10);
        const Matrix scores = trial == 0 ? Matrix::Zero(25, 3) : Matrix(optimal + 0.1 * trial * random_scores(25, 3, rng));
        const double excess01 = exact_zero_one_risk(scores, dist) - exact_bayes_risk(dist);
        const double lac_excess = exact_lac_risk(scores, dist, LossKind::square) - min_lac;
        EXPECT_GE(lac_excess, -1e-10);
        EXPECT_LE(excess01, std::sqrt(2.0 * std::max(lac_excess, 0.0)) + 1e-8) << trial;
    }
}

TEST(BayesFromJoint, MatchesOptimalPredictions) {
    Matrix joint(2, 3);
    joint << 0.1, 0.2, 0.05,
             0.3, 0.1, 0.25;
    EXPECT_NEAR(bayes_risk_from_joint(joint), 0.15 + 0.35, 1e-15);
    const std::vector<Label> predictions{ 2, 1 };
    EXPECT_NEAR(zero_one_risk_from_joint(joint, predictions), 0.5, 1e-15);
}

}  // namespace
}  // namespace eulac
