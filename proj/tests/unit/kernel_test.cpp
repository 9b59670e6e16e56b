#include "eulac/kernel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eulac {
namespace {

FeatureMatrix random_points(const Eigen::Index n, const Eigen::Index d, const unsigned seed) {
    std::mt19937_64 rng{ seed };
    std::normal_distribution<double> normal;
    FeatureMatrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            x(i, j) = normal(rng);
        }
    }
    return x;
}

Eigen::RowVectorXd row(std::initializer_list<double> values) {
    Eigen::RowVectorXd r(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const double v : values) {
        r[i++] = v;
    }
    return r;
}

TEST(Kernel, Examples) {
    const KernelSpec unit{ 1.0 };
    EXPECT_EQ(eval_kernel(unit, row({ 0.3, -1.0 }), row({ 0.3, -1.0 })), 1.0);
    EXPECT_NEAR(eval_kernel(unit, row({ 0.0, 0.0 }), row({ 1.0, 0.0 })), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(eval_kernel(KernelSpec{ 1e8 }, row({ 0.0, 0.0 }), row({ 3.0, 4.0 })), 1.0, 1e-12);
}

TEST(Kernel, RejectsBadBandwidth) {
    EXPECT_THROW(KernelSpec{ 0.0 }.validate(), invalid_input);
    EXPECT_THROW(KernelSpec{ -1.0 }.validate(), invalid_input);
    EXPECT_THROW(KernelSpec{ std::nan("") }.validate(), invalid_input);
}

TEST(Kernel, RangeIsUnitInterval) {
    const FeatureMatrix x = random_points(30, 3, 1);
    const Matrix g = gram(KernelSpec{ 0.7 }, x, x);
    EXPECT_GT(g.minCoeff(), 0.0);
    EXPECT_LE(g.maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        EXPECT_EQ(g(i, i), 1.0);
    }
}

TEST(Gram, ThreePointLine) {
    FeatureMatrix x(3, 1);
    x << 0.0, 1.0, 3.0;
    const Matrix g = gram(KernelSpec{ 1.0 }, x);
    EXPECT_NEAR(g(0, 1), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(g(0, 2), std::exp(-4.5), 1e-15);
    EXPECT_NEAR(g(1, 2), std::exp(-2.0), 1e-15);
    EXPECT_TRUE(g.isApprox(g.transpose(), 0.0));
}

TEST(Gram, PositiveSemidefinite) {
    for (unsigned seed = 0; seed < 10; ++seed) {
        const FeatureMatrix x = random_points(50, 2, seed);
        const Matrix g = gram(KernelSpec{ 0.3 + 0.2 * seed }, x);
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(Gram, PermutationEquivariant) {
    const FeatureMatrix x = random_points(25, 3, 4);
    std::vector<Eigen::Index> perm(25);
    std::iota(perm.begin(), perm.end(), Eigen::Index{ 0 });
    std::shuffle(perm.begin(), perm.end(), std::mt19937{ 9 });
    FeatureMatrix shuffled(25, 3);
    for (Eigen::Index i = 0; i < 25; ++i) {
        shuffled.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    }
    const Matrix g = gram(KernelSpec{ 1.3 }, x);
    const Matrix h = gram(KernelSpec{ 1.3 }, shuffled);
    for (Eigen::Index i = 0; i < 25; ++i) {
        for (Eigen::Index j = 0; j < 25; ++j) {
            EXPECT_EQ(h(i, j), g(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]));
        }
    }
}

TEST(Gram, ParallelMatchesReferenceBitForBit) {
    const FeatureMatrix a = random_points(120, 5, 2);
    const FeatureMatrix b = random_points(70, 5, 3);
    const KernelSpec spec{ 1.7 };
    EXPECT_TRUE(gram(spec, a, b) == reference::gram(spec, a, b));
    EXPECT_TRUE(gram(spec, a) == reference::gram(spec, a, a));

    Matrix coefficients = Matrix::Random(70, 4);
    EXPECT_TRUE(kernel_expansion(spec, a, b, coefficients) == reference::kernel_expansion(spec, a, b, coefficients));
    EXPECT_EQ(pairwise_distances(a), reference::pairwise_distances(a));
}

TEST(Gram, ExpansionMatchesExplicitProduct) {
    const FeatureMatrix a = random_points(40, 2, 5);
    const FeatureMatrix b = random_points(30, 2, 6);
    const Matrix coefficients = Matrix::Random(30, 3);
    const Matrix expected = reference::gram(KernelSpec{ 0.9 }, a, b) * coefficients;
    EXPECT_LT((kernel_expansion(KernelSpec{ 0.9 }, a, b, coefficients) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gram, DimensionMismatchThrows) {
    EXPECT_THROW((void)gram(KernelSpec{}, random_points(3, 2, 0), random_points(3, 3, 0)), invalid_input);
}

TEST(Median, Examples) {
    FeatureMatrix line(3, 1);
    line << 0.0, 1.0, 3.0;
    EXPECT_DOUBLE_EQ(median_heuristic(line), 2.0);

    FeatureMatrix pair(2, 2);
    pair << 0.0, 0.0, 3.0, 4.0;
    EXPECT_DOUBLE_EQ(median_heuristic(pair), 5.0);

    // {0, 0, 2, 2}: distances {0, 2, 2, 2, 2, 0} -> sorted 0 0 2 2 2 2, median 2
    FeatureMatrix dup(4, 1);
    dup << 0.0, 0.0, 2.0, 2.0;
    EXPECT_DOUBLE_EQ(median_heuristic(dup), 2.0);

    // {0, 0, 0, 1}: distances 0 0 0 1 1 1 -> mean of middle values 0.5
    FeatureMatrix mostly_zero(4, 1);
    mostly_zero << 0.0, 0.0, 0.0, 1.0;
    EXPECT_DOUBLE_EQ(median_heuristic(mostly_zero), 0.5);
}

TEST(Median, DegenerateInputsThrow) {
    EXPECT_THROW((void)median_heuristic(FeatureMatrix::Zero(1, 2)), invalid_input);
    EXPECT_THROW((void)median_heuristic(FeatureMatrix::Zero(5, 2)), invalid_input);
}

TEST(IncompleteCholesky, ReproducesGram) {
    const FeatureMatrix x = random_points(80, 2, 7);
    const KernelSpec spec{ 1.0 };
    const LowRankFactor low = incomplete_cholesky(spec, x, 1e-10, 80);
    const Matrix g = gram(spec, x);
    EXPECT_LT((low.factor * low.factor.transpose() - g).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(low.residual_trace, 1e-10);
}

TEST(IncompleteCholesky, RespectsRankCap) {
    const FeatureMatrix x = random_points(60, 3, 8);
    const LowRankFactor low = incomplete_cholesky(KernelSpec{ 0.2 }, x, 0.0, 10);
    EXPECT_EQ(low.factor.cols(), 10);
    EXPECT_GT(low.residual_trace, 0.0);
}

TEST(SigmaGrid, DecadeSteps) {
    EXPECT_EQ(default_sigma_multipliers(), (std::vector<double>{ 1e-2, 1e-1, 1.0, 10.0 }));
}

}  // namespace
}  // namespace eulac
