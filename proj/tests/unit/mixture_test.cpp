#include "support.hpp"

#include "eulac/evalbench/metrics.hpp"
#include "eulac/mixture.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace eulac {
namespace {

Matrix random_matrix(const Eigen::Index rows, const Eigen::Index cols, const unsigned seed) {
    std::mt19937_64 rng{ seed };
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

// Plain projected gradient on the simplex, run long enough to be an oracle.
double projected_gradient_distance(const Matrix &z, const Vector &target, const double scale) {
    const Eigen::Index n = z.rows();
    Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const Matrix a = scale * z.transpose();
    const double step = 1.0 / (a.transpose() * a).eigenvalues().real().maxCoeff();
    for (int it = 0; it < 200000; ++it) {
        const Vector residual = a * w - target;
        w = project_to_simplex(w - step * (a.transpose() * residual));
    }
    return (a * w - target).norm();
}

TEST(Simplex, ProjectionProperties) {
    Vector v(4);
    v << 0.2, 0.3, 0.1, 0.4;
    EXPECT_LT((project_to_simplex(v) - v).norm(), 1e-15);
    v << 5.0, -1.0, 0.0, 0.0;
    const Vector p = project_to_simplex(v);
    EXPECT_NEAR(p[0], 1.0, 1e-15);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
    EXPECT_GE(project_to_simplex(random_matrix(30, 1, 2).col(0)).minCoeff(), 0.0);
}

TEST(HullDistance, MatchesProjectedGradientOracle) {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Matrix z = random_matrix(25, 4, seed);
        const Vector target = 2.0 * random_matrix(4, 1, seed + 100).col(0);
        const double scale = 0.3 + 0.15 * seed;
        Vector weights;
        const double wolfe = hull_distance(z, target, scale, weights, 3000, 1e-12);
        EXPECT_NEAR(wolfe, projected_gradient_distance(z, target, scale), 1e-5) << seed;
        EXPECT_NEAR(weights.sum(), 1.0, 1e-10);
        EXPECT_GE(weights.minCoeff(), -1e-12);
    }
}

TEST(HullDistance, InteriorPointHasZeroDistance) {
    const Matrix z = random_matrix(20, 2, 9);
    const Vector target = z.colwise().mean().transpose();
    Vector weights;
    EXPECT_LT(hull_distance(z, target, 1.0, weights, 3000, 1e-14), 1e-6);
}

TEST(HullDistance, WarmStartGivesSameAnswer) {
    const Matrix z = random_matrix(40, 5, 3);
    const Vector target = 3.0 * random_matrix(5, 1, 4).col(0);
    Vector cold;
    const double a = hull_distance(z, target, 0.8, cold, 3000, 1e-12);
    Vector warm = Vector::Constant(40, 1.0 / 40.0);
    const double b = hull_distance(z, target, 0.8, warm, 3000, 1e-12);
    EXPECT_NEAR(a, b, 1e-8);
}

TEST(ThetaOverride, Cases) {
    EXPECT_EQ(theta_override(0.7).theta, 0.7);
    EXPECT_EQ(theta_override(1.0).theta, 1.0);
    EXPECT_TRUE(theta_override(0.7).curve.empty());
    EXPECT_THROW((void)theta_override(0.0), invalid_input);
    EXPECT_THROW((void)theta_override(1.2), invalid_input);
}

TEST(EstimateTheta, NoNoveltyGivesHighEstimate) {
    const ShiftSplit split = sample_synthetic(testing::plane_spec(1.0, 3), 1000, 1000, 0);
    const KernelSpec kernel = mixture_kernel(split.labeled.features, split.unlabeled.features);
    const ThetaEstimate estimate = estimate_theta(split.labeled.features, split.unlabeled.features, kernel);
    EXPECT_GE(estimate.theta, 0.9);
    EXPECT_LE(estimate.theta, 1.0);
}

TEST(EstimateTheta, CurveShapeAndDeterminism) {
    const ShiftSplit split = sample_synthetic(testing::plane_spec(0.5, 4, 6.0), 400, 400, 0);
    const KernelSpec kernel = mixture_kernel(split.labeled.features, split.unlabeled.features);
    const ThetaEstimate a = estimate_theta(split.labeled.features, split.unlabeled.features, kernel);
    const ThetaEstimate b = estimate_theta(split.labeled.features, split.unlabeled.features, kernel);
    EXPECT_EQ(a.theta, b.theta);
    ASSERT_EQ(a.curve.size(), 64U);
    EXPECT_DOUBLE_EQ(a.curve.front().candidate, 1.0);
    EXPECT_NEAR(a.curve.back().candidate, 20.0, 1e-12);
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
        EXPECT_EQ(a.curve[i].distance, b.curve[i].distance);
        EXPECT_GE(a.curve[i].distance, 0.0);
    }
    EXPECT_GT(a.theta, 0.0);
    EXPECT_LE(a.theta, 1.0);
    EXPECT_NEAR(a.theta, 0.5, 0.1);
}

TEST(EstimateTheta, NonIncreasingInNovelShare) {
    // Replace a growing share q of U with far-away novel points.
    const std::vector<double> shares{ 0.0, 0.25, 0.5, 0.75 };
    std::vector<double> mean_estimate(shares.size(), 0.0);
    for (Seed seed = 0; seed < 5; ++seed) {
        const ShiftSplit split = sample_synthetic(testing::plane_spec(1.0, 40 + seed), 300, 300, 0);
        SyntheticSpec far = testing::plane_spec(0.5, 80 + seed);
        far.novel = testing::gaussian({ 0.0, 12.0 });
        const FeatureMatrix novel = sample_synthetic(far, 0, 0, 2000).test.features;
        std::vector<Eigen::Index> novel_rows;
        const ShiftSplit novel_split = sample_synthetic(far, 0, 0, 2000);
        for (std::size_t i = 0; i < novel_split.test.size(); ++i) {
            if (novel_split.test.labels[i] == 3) {
                novel_rows.push_back(static_cast<Eigen::Index>(i));
            }
        }
        for (std::size_t s = 0; s < shares.size(); ++s) {
            FeatureMatrix u = split.unlabeled.features;
            const auto replaced = static_cast<Eigen::Index>(shares[s] * 300);
            for (Eigen::Index i = 0; i < replaced; ++i) {
                u.row(i) = novel.row(novel_rows.at(static_cast<std::size_t>(i)));
            }
            const KernelSpec kernel = mixture_kernel(split.labeled.features, u);
            mean_estimate[s] += estimate_theta(split.labeled.features, u, kernel).theta / 5.0;
        }
    }
    EXPECT_LE(spearman(shares, mean_estimate), 0.0);
}

}  // namespace
}  // namespace eulac
