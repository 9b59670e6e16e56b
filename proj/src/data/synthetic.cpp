#include "eulac/data/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace eulac {

namespace {

constexpr double box_half_width_sigmas = 5.5;

void validate_mixture(const GaussianMixture &mixture, const int dimension, const std::string &name) {
    if (mixture.components.empty()) {
        throw invalid_input{ name + ": mixture has no components" };
    }
    double total = 0.0;
    for (const auto &c : mixture.components) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            throw invalid_input{ name + ": component weights must be positive" };
        }
        total += c.weight;
        if (c.mean.size() != dimension || c.covariance.rows() != dimension || c.covariance.cols() != dimension) {
            throw invalid_input{ name + ": component shape does not match dimension " + std::to_string(dimension) };
        }
        if (!c.mean.allFinite() || !c.covariance.allFinite()) {
            throw invalid_input{ name + ": non-finite component parameter" };
        }
        if (!c.covariance.isApprox(c.covariance.transpose(), 1e-12)) {
            throw invalid_input{ name + ": covariance is not symmetric" };
        }
        Eigen::LLT<Matrix> llt(c.covariance);
        if (llt.info() != Eigen::Success) {
            throw invalid_input{ name + ": covariance is not positive definite" };
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw invalid_input{ name + ": component weights sum to " + std::to_string(total) + ", expected 1" };
    }
}

std::size_t sample_index(std::span<const double> weights, Rng &rng) {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return pick(rng);
}

}  // namespace

void SyntheticSpec::validate() const {
    if (dimension < 1) {
        throw invalid_input{ "synthetic spec: dimension must be at least 1" };
    }
    if (!(theta > 0.0) || theta > 1.0) {
        throw invalid_input{ "synthetic spec: theta must lie in (0, 1], got " + std::to_string(theta) };
    }
    if (known.empty()) {
        throw invalid_input{ "synthetic spec: at least one known class is required" };
    }
    if (known_priors.size() != known.size()) {
        throw invalid_input{ "synthetic spec: one prior per known class is required" };
    }
    double total = 0.0;
    for (const double p : known_priors) {
        if (!(p > 0.0)) {
            throw invalid_input{ "synthetic spec: class priors must be positive" };
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw invalid_input{ "synthetic spec: class priors sum to " + std::to_string(total) + ", expected 1" };
    }
    for (std::size_t k = 0; k < known.size(); ++k) {
        validate_mixture(known[k], dimension, "known class " + std::to_string(k + 1));
    }
    if (theta < 1.0 || !novel.components.empty()) {
        validate_mixture(novel, dimension, "new class");
    }
}

ClassShiftModel::ClassShiftModel(SyntheticSpec spec) : spec_{ std::move(spec) } {
    spec_.validate();
    for (const auto &mixture : spec_.known) {
        known_.push_back(prepare(mixture, spec_.dimension));
    }
    if (!spec_.novel.components.empty()) {
        novel_ = prepare(spec_.novel, spec_.dimension);
    }
}

ClassShiftModel::PreparedMixture ClassShiftModel::prepare(const GaussianMixture &mixture, const int dimension) {
    PreparedMixture out;
    for (const auto &c : mixture.components) {
        Eigen::LLT<Matrix> llt(c.covariance);
        Matrix chol = llt.matrixL();
        const double log_det = 2.0 * chol.diagonal().array().log().sum();
        const double log_norm = -0.5 * (dimension * std::log(2.0 * std::numbers::pi) + log_det);
        out.push_back({ c.weight, c.mean, std::move(chol), log_norm });
    }
    return out;
}

double ClassShiftModel::density(const PreparedMixture &mixture, const Eigen::Ref<const Vector> &x) {
    double total = 0.0;
    for (const auto &c : mixture) {
        const Vector z = c.chol.triangularView<Eigen::Lower>().solve(x - c.mean);
        total += c.weight * std::exp(c.log_norm - 0.5 * z.squaredNorm());
    }
    return total;
}

Vector ClassShiftModel::sample(const PreparedMixture &mixture, Rng &rng) {
    std::vector<double> weights;
    for (const auto &c : mixture) {
        weights.push_back(c.weight);
    }
    const auto &c = mixture[sample_index(weights, rng)];
    std::normal_distribution<double> normal{ 0.0, 1.0 };
    Vector z(c.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = normal(rng);
    }
    return c.mean + c.chol * z;
}

double ClassShiftModel::known_density(const int k, const Eigen::Ref<const Vector> &x) const {
    return density(known_.at(static_cast<std::size_t>(k - 1)), x);
}

double ClassShiftModel::novel_density(const Eigen::Ref<const Vector> &x) const {
    return novel_.empty() ? 0.0 : density(novel_, x);
}

Vector ClassShiftModel::test_joint(const Eigen::Ref<const Vector> &x) const {
    const int K = num_known();
    Vector out(K + 1);
    for (int k = 1; k <= K; ++k) {
        out[k - 1] = spec_.theta * spec_.known_priors[static_cast<std::size_t>(k - 1)] * known_density(k, x);
    }
    out[K] = spec_.theta < 1.0 ? (1.0 - spec_.theta) * novel_density(x) : 0.0;
    return out;
}

std::pair<Vector, Vector> ClassShiftModel::bounding_box() const {
    const int d = spec_.dimension;
    Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
    Vector hi = Vector::Constant(d, -std::numeric_limits<double>::infinity());
    auto extend = [&](const GaussianMixture &mixture) {
        for (const auto &c : mixture.components) {
            for (int i = 0; i < d; ++i) {
                const double half = box_half_width_sigmas * std::sqrt(c.covariance(i, i));
                lo[i] = std::min(lo[i], c.mean[i] - half);
                hi[i] = std::max(hi[i], c.mean[i] + half);
            }
        }
    };
    for (const auto &mixture : spec_.known) {
        extend(mixture);
    }
    if (spec_.theta < 1.0) {
        extend(spec_.novel);
    }
    return { lo, hi };
}

Vector ClassShiftModel::sample_known(const int k, Rng &rng) const {
    return sample(known_.at(static_cast<std::size_t>(k - 1)), rng);
}

Vector ClassShiftModel::sample_novel(Rng &rng) const {
    if (novel_.empty()) {
        throw invalid_input{ "synthetic spec has no new-class mixture" };
    }
    return sample(novel_, rng);
}

Label ClassShiftModel::sample_known_label(Rng &rng) const {
    return static_cast<Label>(sample_index(spec_.known_priors, rng) + 1);
}

ShiftSplit sample_synthetic(const SyntheticSpec &spec, const std::size_t n_labeled, const std::size_t n_unlabeled, const std::size_t n_test) {
    const ClassShiftModel model{ spec };
    const int K = model.num_known();
    const int d = spec.dimension;
    Rng rng{ spec.seed };
    std::uniform_real_distribution<double> unit{ 0.0, 1.0 };

    std::vector<int> identity(static_cast<std::size_t>(K));
    std::iota(identity.begin(), identity.end(), 1);

    auto make = [&](const std::size_t n) {
        LabeledDataset out;
        out.features.resize(static_cast<Eigen::Index>(n), d);
        out.labels.resize(n);
        out.num_known = K;
        out.original_labels = identity;
        return out;
    };

    ShiftSplit split;
    split.labeled = make(n_labeled);
    for (std::size_t i = 0; i < n_labeled; ++i) {
        const Label y = model.sample_known_label(rng);
        split.labeled.labels[i] = y;
        split.labeled.features.row(static_cast<Eigen::Index>(i)) = model.sample_known(y, rng).transpose();
    }

    auto draw_test = [&](LabeledDataset &out) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            Label y = 0;
            Vector x;
            if (unit(rng) < spec.theta) {
                y = model.sample_known_label(rng);
                x = model.sample_known(y, rng);
            } else {
                y = new_class_label(K);
                x = model.sample_novel(rng);
            }
            out.labels[i] = y;
            out.features.row(static_cast<Eigen::Index>(i)) = x.transpose();
        }
    };
    LabeledDataset unlabeled = make(n_unlabeled);
    draw_test(unlabeled);
    split.unlabeled = strip_labels(unlabeled);
    split.test = make(n_test);
    draw_test(split.test);
    return split;
}

QuadratureGrid make_quadrature_grid(const ClassShiftModel &model, const int resolution) {
    const int d = model.spec().dimension;
    if (d > 2) {
        throw invalid_input{ "quadrature needs dimension <= 2, got " + std::to_string(d) };
    }
    if (resolution < 2) {
        throw invalid_input{ "quadrature resolution must be at least 2" };
    }
    const auto [lo, hi] = model.bounding_box();
    const Vector step = (hi - lo) / static_cast<double>(resolution);
    QuadratureGrid grid;
    grid.cell_volume = step.prod();
    const Eigen::Index count = d == 1 ? resolution : static_cast<Eigen::Index>(resolution) * resolution;
    grid.points.resize(count, d);
    for (Eigen::Index p = 0; p < count; ++p) {
        const Eigen::Index i = p % resolution;
        grid.points(p, 0) = lo[0] + (static_cast<double>(i) + 0.5) * step[0];
        if (d == 2) {
            const Eigen::Index j = p / resolution;
            grid.points(p, 1) = lo[1] + (static_cast<double>(j) + 0.5) * step[1];
        }
    }
    return grid;
}

double bayes_risk_oracle(const SyntheticSpec &spec, const int resolution) {
    const ClassShiftModel model{ spec };
    const QuadratureGrid grid = make_quadrature_grid(model, resolution);
    const Eigen::Index count = grid.points.rows();
    std::vector<double> cell(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < count; ++p) {
        const Vector joint = model.test_joint(grid.points.row(p).transpose());
        cell[static_cast<std::size_t>(p)] = joint.sum() - joint.maxCoeff();
    }
    // serial accumulation keeps the result independent of the thread count
    double total = 0.0;
    for (const double v : cell) {
        total += v;
    }
    return std::clamp(total * grid.cell_volume, 0.0, 1.0);
}

MonteCarloEstimate bayes_risk_monte_carlo(const SyntheticSpec &spec, const std::size_t samples, const Seed seed) {
    if (samples < 2) {
        throw invalid_input{ "Monte-Carlo Bayes risk needs at least 2 samples" };
    }
    const ClassShiftModel model{ spec };
    Rng rng{ seed };
    std::uniform_real_distribution<double> unit{ 0.0, 1.0 };
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        Vector x;
        if (unit(rng) < spec.theta) {
            x = model.sample_known(model.sample_known_label(rng), rng);
        } else {
            x = model.sample_novel(rng);
        }
        const Vector joint = model.test_joint(x);
        const double v = 1.0 - joint.maxCoeff() / joint.sum();
        sum += v;
        sum_sq += v * v;
    }
    const auto n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return { mean, std::sqrt(var / n) };
}

FiniteDistribution::FiniteDistribution(FeatureMatrix points, Matrix train_joint, Vector novel_marginal, const double theta)
    : points_{ std::move(points) }, train_joint_{ std::move(train_joint) }, novel_marginal_{ std::move(novel_marginal) }, theta_{ theta } {
    if (!(theta_ > 0.0) || theta_ > 1.0) {
        throw invalid_input{ "finite distribution: theta must lie in (0, 1]" };
    }
    if (train_joint_.rows() != points_.rows() || novel_marginal_.size() != points_.rows() || train_joint_.cols() < 1) {
        throw invalid_input{ "finite distribution: support/probability shape mismatch" };
    }
    if ((train_joint_.array() < 0.0).any() || (novel_marginal_.array() < 0.0).any()) {
        throw invalid_input{ "finite distribution: negative probability" };
    }
    if (std::abs(train_joint_.sum() - 1.0) > 1e-12) {
        throw invalid_input{ "finite distribution: training probabilities do not sum to 1" };
    }
    if (theta_ < 1.0 && std::abs(novel_marginal_.sum() - 1.0) > 1e-12) {
        throw invalid_input{ "finite distribution: new-class probabilities do not sum to 1" };
    }
}

FiniteDistribution FiniteDistribution::from_atoms(FeatureMatrix points, std::span<const Atom> atoms, const int num_known, const double theta) {
    if (!(theta > 0.0) || theta > 1.0) {
        throw invalid_input{ "finite distribution: theta must lie in (0, 1]" };
    }
    const Eigen::Index m = points.rows();
    Matrix train = Matrix::Zero(m, num_known);
    Vector novel = Vector::Zero(m);
    double known_mass = 0.0;
    double new_mass = 0.0;
    for (const Atom &a : atoms) {
        if (a.point >= static_cast<std::size_t>(m) || a.label < 1 || a.label > num_known + 1 || a.probability < 0.0) {
            throw invalid_input{ "finite distribution: invalid atom" };
        }
        const auto j = static_cast<Eigen::Index>(a.point);
        if (a.label == new_class_label(num_known)) {
            novel[j] += a.probability;
            new_mass += a.probability;
        } else {
            train(j, a.label - 1) += a.probability;
            known_mass += a.probability;
        }
    }
    if (std::abs(known_mass - theta) > 1e-12 || std::abs(new_mass - (1.0 - theta)) > 1e-12) {
        throw invalid_input{ "finite distribution: class shift decomposition violated (known mass " + std::to_string(known_mass) + ", theta " + std::to_string(theta) + ")" };
    }
    train /= theta;
    if (theta < 1.0) {
        novel /= (1.0 - theta);
    }
    return FiniteDistribution{ std::move(points), std::move(train), std::move(novel), theta };
}

Matrix FiniteDistribution::test_joint() const {
    const int K = num_known();
    Matrix out(points_.rows(), K + 1);
    out.leftCols(K) = theta_ * train_joint_;
    out.col(K) = (1.0 - theta_) * novel_marginal_;
    return out;
}

Vector FiniteDistribution::test_marginal() const {
    return theta_ * train_joint_.rowwise().sum() + (1.0 - theta_) * novel_marginal_;
}

std::vector<FiniteDistribution::Atom> FiniteDistribution::atoms() const {
    const Matrix joint = test_joint();
    std::vector<Atom> out;
    for (Eigen::Index j = 0; j < joint.rows(); ++j) {
        for (Eigen::Index y = 0; y < joint.cols(); ++y) {
            if (joint(j, y) > 0.0) {
                out.push_back({ static_cast<std::size_t>(j), static_cast<Label>(y + 1), joint(j, y) });
            }
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, Label>> FiniteDistribution::sample_train(const std::size_t n, Rng &rng) const {
    const Eigen::Index K = train_joint_.cols();
    std::vector<double> weights(static_cast<std::size_t>(train_joint_.size()));
    for (Eigen::Index j = 0; j < train_joint_.rows(); ++j) {
        for (Eigen::Index k = 0; k < K; ++k) {
            weights[static_cast<std::size_t>(j * K + k)] = train_joint_(j, k);
        }
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<std::pair<std::size_t, Label>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cell = pick(rng);
        out.emplace_back(cell / static_cast<std::size_t>(K), static_cast<Label>(cell % static_cast<std::size_t>(K) + 1));
    }
    return out;
}

std::vector<std::size_t> FiniteDistribution::sample_test_points(const std::size_t n, Rng &rng) const {
    const Vector marginal = test_marginal();
    std::discrete_distribution<std::size_t> pick(marginal.data(), marginal.data() + marginal.size());
    std::vector<std::size_t> out(n);
    for (auto &j : out) {
        j = pick(rng);
    }
    return out;
}

FiniteDistribution random_finite_distribution(const std::size_t atoms, const int num_known, const double theta, Rng &rng) {
    if (atoms < 1 || num_known < 1) {
        throw invalid_input{ "random finite distribution needs at least one atom and one class" };
    }
    const auto m = static_cast<Eigen::Index>(atoms);
    std::uniform_real_distribution<double> unit{ 0.0, 1.0 };
    std::normal_distribution<double> normal{ 0.0, 1.0 };
    FeatureMatrix points(m, 2);
    for (Eigen::Index j = 0; j < m; ++j) {
        points(j, 0) = normal(rng);
        points(j, 1) = normal(rng);
    }
    // Sparse-ish random masses: each cell is active with probability 1/2.
    Matrix train = Matrix::Zero(m, num_known);
    Vector novel = Vector::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (int k = 0; k < num_known; ++k) {
            if (unit(rng) < 0.5) {
                train(j, k) = unit(rng);
            }
        }
        if (unit(rng) < 0.5) {
            novel[j] = unit(rng);
        }
    }
    if (train.sum() == 0.0) {
        train(0, 0) = 1.0;
    }
    if (novel.sum() == 0.0) {
        novel[m - 1] = 1.0;
    }
    train /= train.sum();
    novel /= novel.sum();
    return FiniteDistribution{ std::move(points), std::move(train), std::move(novel), theta };
}

}  // namespace eulac
