#pragma once

#include "eulac/data/dataset.hpp"
#include "eulac/data/sampling.hpp"

#include <vector>

namespace eulac {

struct GaussianComponent {
    double weight = 1.0;
    Vector mean;
    Matrix covariance;
};

struct GaussianMixture {
    std::vector<GaussianComponent> components;
};

/// Class-shift generator: P_te = theta * P_tr + (1 - theta) * P_new.
struct SyntheticSpec {
    int dimension = 2;
    double theta = 1.0;
    std::vector<double> known_priors;
    std::vector<GaussianMixture> known;
    GaussianMixture novel;
    Seed seed = 0;

    [[nodiscard]] int num_known() const noexcept { return static_cast<int>(known.size()); }

    /// Throws invalid_input on a non-positive-definite covariance, priors that
    /// do not sum to one, theta outside (0, 1] or shape mismatches.
    void validate() const;
};

/// Densities of a validated SyntheticSpec with cached factorizations.
class ClassShiftModel {
  public:
    explicit ClassShiftModel(SyntheticSpec spec);

    [[nodiscard]] const SyntheticSpec &spec() const noexcept { return spec_; }
    [[nodiscard]] int num_known() const noexcept { return spec_.num_known(); }

    /// p_k(x), the class-conditional density of known class k (1-based).
    [[nodiscard]] double known_density(int k, const Eigen::Ref<const Vector> &x) const;
    [[nodiscard]] double novel_density(const Eigen::Ref<const Vector> &x) const;

    /// Joint test density p_te(x, y) for y = 1..K followed by y = nc.
    [[nodiscard]] Vector test_joint(const Eigen::Ref<const Vector> &x) const;

    /// Axis-aligned box holding at least 1 - 1e-6 of every component's mass.
    [[nodiscard]] std::pair<Vector, Vector> bounding_box() const;

    [[nodiscard]] Vector sample_known(int k, Rng &rng) const;
    [[nodiscard]] Vector sample_novel(Rng &rng) const;
    /// Draws a training label from the known-class prior.
    [[nodiscard]] Label sample_known_label(Rng &rng) const;

  private:
    struct Prepared {
        double weight;
        Vector mean;
        Matrix chol;  // lower factor
        double log_norm;
    };
    using PreparedMixture = std::vector<Prepared>;

    [[nodiscard]] static PreparedMixture prepare(const GaussianMixture &mixture, int dimension);
    [[nodiscard]] static double density(const PreparedMixture &mixture, const Eigen::Ref<const Vector> &x);
    [[nodiscard]] static Vector sample(const PreparedMixture &mixture, Rng &rng);

    SyntheticSpec spec_;
    std::vector<PreparedMixture> known_;
    PreparedMixture novel_;
};

/// Labeled set from P_tr; unlabeled and test sets from P_te. Deterministic in
/// spec.seed. Test samples from P_new carry label K+1.
[[nodiscard]] ShiftSplit sample_synthetic(const SyntheticSpec &spec, std::size_t n_labeled, std::size_t n_unlabeled, std::size_t n_test);

/// Midpoint grid over the bounding box, resolution cells per axis (d <= 2).
struct QuadratureGrid {
    FeatureMatrix points;
    double cell_volume = 0.0;
};
[[nodiscard]] QuadratureGrid make_quadrature_grid(const ClassShiftModel &model, int resolution);

/// Bayes 0-1 risk of the test distribution over classes {1..K, nc}, by
/// midpoint quadrature. Requires d <= 2 and resolution >= 2.
[[nodiscard]] double bayes_risk_oracle(const SyntheticSpec &spec, int resolution);

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo Bayes risk, E_x[1 - max_y P(y | x)], for any dimension.
[[nodiscard]] MonteCarloEstimate bayes_risk_monte_carlo(const SyntheticSpec &spec, std::size_t samples, Seed seed);

/// Finite-support joint distribution under the class shift condition.
class FiniteDistribution {
  public:
    /// train_joint(j, k-1) = P_tr(x_j, k); novel_marginal(j) = P_new(x_j).
    FiniteDistribution(FeatureMatrix points, Matrix train_joint, Vector novel_marginal, double theta);

    struct Atom {
        std::size_t point;
        Label label;  // 1..K or K+1
        double probability;
    };
    /// Builds from joint test-distribution atoms; checks that known-label mass
    /// sums to theta and nc mass to 1 - theta.
    [[nodiscard]] static FiniteDistribution from_atoms(FeatureMatrix points, std::span<const Atom> atoms, int num_known, double theta);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    [[nodiscard]] int num_known() const noexcept { return static_cast<int>(train_joint_.cols()); }
    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] const FeatureMatrix &points() const noexcept { return points_; }
    [[nodiscard]] const Matrix &train_joint() const noexcept { return train_joint_; }
    [[nodiscard]] const Vector &novel_marginal() const noexcept { return novel_marginal_; }

    /// m x (K+1) joint test probabilities, nc last.
    [[nodiscard]] Matrix test_joint() const;
    [[nodiscard]] Vector test_marginal() const;
    [[nodiscard]] std::vector<Atom> atoms() const;

    /// (point, label) pairs from P_tr.
    [[nodiscard]] std::vector<std::pair<std::size_t, Label>> sample_train(std::size_t n, Rng &rng) const;
    /// Point indices from the test marginal.
    [[nodiscard]] std::vector<std::size_t> sample_test_points(std::size_t n, Rng &rng) const;

  private:
    FeatureMatrix points_;
    Matrix train_joint_;
    Vector novel_marginal_;
    double theta_;
};

/// Random class-shift distribution over `atoms` points in the plane; some
/// points carry known and new mass at once.
[[nodiscard]] FiniteDistribution random_finite_distribution(std::size_t atoms, int num_known, double theta, Rng &rng);

}  // namespace eulac
