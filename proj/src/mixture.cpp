#include "eulac/mixture.hpp"

#include "eulac/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eulac {

Vector project_to_simplex(const Vector &v) {
    const Eigen::Index n = v.size();
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    double cumulative = 0.0;
    double shift = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        cumulative += sorted[static_cast<std::size_t>(i)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) {
            shift = candidate;
        }
    }
    return (v.array() - shift).cwiseMax(0.0);
}

// Wolfe's minimum-norm-point algorithm on the atoms p_i = scale * z_i - target.
// The active set never exceeds rank + 1 atoms, so every affine solve is small.
double hull_distance(const Matrix &factor, const Vector &target, const double scale, Vector &weights, const int max_iterations, const double gap_tolerance) {
    const Eigen::Index n = factor.rows();
    if (n == 0) {
        throw invalid_input{ "hull_distance: no atoms" };
    }
    if (weights.size() != n) {
        weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
    }
    if (scale == 0.0) {
        return target.norm();
    }
    auto atom = [&](const Eigen::Index i) -> Vector { return scale * factor.row(i).transpose() - target; };

    std::vector<Eigen::Index> active;
    std::vector<double> lambda;
    {
        const Vector w = project_to_simplex(weights);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w[i] > 1e-12) {
                active.push_back(i);
                lambda.push_back(w[i]);
            }
        }
        const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
        for (double &l : lambda) {
            l /= total;
        }
        // too many atoms to be affinely independent: restart from the best single atom
        if (active.size() > static_cast<std::size_t>(factor.cols()) + 1) {
            const Vector norms = ((scale * factor).rowwise() - target.transpose()).rowwise().squaredNorm();
            Eigen::Index best = 0;
            norms.minCoeff(&best);
            active = { best };
            lambda = { 1.0 };
        }
    }
    auto current_point = [&]() {
        Vector x = Vector::Zero(target.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
            x += lambda[a] * atom(active[a]);
        }
        return x;
    };

    Vector x = current_point();
    bool fresh = true;  // run the minor cycle before the first optimality test
    for (int it = 0; it < max_iterations; ++it) {
        if (!fresh) {
            const Vector products = scale * (factor * x) - Vector::Constant(n, x.dot(target));
            Eigen::Index j = 0;
            const double lowest = products.minCoeff(&j);
            if (x.squaredNorm() - lowest <= gap_tolerance || std::find(active.begin(), active.end(), j) != active.end()) {
                break;
            }
            active.push_back(j);
            lambda.push_back(0.0);
        }
        fresh = false;

        // minor cycle: move towards the affine minimizer, dropping atoms that hit zero
        while (true) {
            const auto s = static_cast<Eigen::Index>(active.size());
            Matrix atoms(target.size(), s);
            for (Eigen::Index a = 0; a < s; ++a) {
                atoms.col(a) = atom(active[static_cast<std::size_t>(a)]);
            }
            // lifting each atom by a unit coordinate turns the affine constraint into a ridge
            Matrix lifted = atoms.transpose() * atoms;
            lifted.array() += 1.0;
            lifted.diagonal().array() += 1e-12;
            const Vector solved = lifted.ldlt().solve(Vector::Ones(s));
            const Vector mu = solved / solved.sum();
            if ((mu.array() > 0.0).all()) {
                lambda.assign(mu.data(), mu.data() + s);
                break;
            }
            double step = 1.0;
            for (Eigen::Index a = 0; a < s; ++a) {
                const double l = lambda[static_cast<std::size_t>(a)];
                if (mu[a] <= 0.0 && l - mu[a] > 0.0) {
                    step = std::min(step, l / (l - mu[a]));
                }
            }
            std::vector<Eigen::Index> kept;
            std::vector<double> kept_lambda;
            for (Eigen::Index a = 0; a < s; ++a) {
                const double l = lambda[static_cast<std::size_t>(a)];
                const double moved = l + step * (mu[a] - l);
                if (moved > 1e-14) {
                    kept.push_back(active[static_cast<std::size_t>(a)]);
                    kept_lambda.push_back(moved);
                }
            }
            if (kept.empty()) {
                // numerical corner: keep the heaviest previous atom
                const auto heaviest = std::max_element(lambda.begin(), lambda.end()) - lambda.begin();
                kept = { active[static_cast<std::size_t>(heaviest)] };
                kept_lambda = { 1.0 };
            }
            const double total = std::accumulate(kept_lambda.begin(), kept_lambda.end(), 0.0);
            for (double &l : kept_lambda) {
                l /= total;
            }
            active = std::move(kept);
            lambda = std::move(kept_lambda);
        }
        x = current_point();
    }

    weights.setZero();
    for (std::size_t a = 0; a < active.size(); ++a) {
        weights[active[a]] = lambda[a];
    }
    return x.norm();
}

KernelSpec mixture_kernel(const FeatureMatrix &labeled, const FeatureMatrix &unlabeled) {
    return KernelSpec{ median_heuristic(stack(labeled, unlabeled)) };
}

ThetaEstimate estimate_theta(const FeatureMatrix &labeled, const FeatureMatrix &unlabeled, const KernelSpec &kernel, const MixtureOptions &options) {
    if (labeled.rows() == 0 || unlabeled.rows() == 0) {
        throw invalid_input{ "theta estimation: empty dataset" };
    }
    if (labeled.cols() != unlabeled.cols()) {
        throw invalid_input{ "theta estimation: labeled and unlabeled dimensions differ" };
    }
    kernel.validate();
    if (options.grid_points < 2 || !(options.max_candidate > 1.0) || !(options.tau > 0.0)) {
        throw invalid_input{ "theta estimation: invalid options" };
    }

    const Eigen::Index n_l = labeled.rows();
    const Eigen::Index n_u = unlabeled.rows();
    const FeatureMatrix points = stack(labeled, unlabeled);
    const Eigen::Index total = points.rows();
    const LowRankFactor low_rank = incomplete_cholesky(kernel, points, options.rank_tolerance * static_cast<double>(total), options.max_rank);
    const Matrix &z = low_rank.factor;
    if (z.cols() <= 1 && total > 1) {
        throw invalid_input{ "theta estimation: degenerate kernel (all Gram entries are numerically 1)" };
    }

    const Vector mean_l = z.topRows(n_l).colwise().mean().transpose();
    const Vector mean_u = z.bottomRows(n_u).colwise().mean().transpose();

    const int count = options.grid_points;
    std::vector<double> candidates(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        candidates[static_cast<std::size_t>(i)] = std::exp(std::log(options.max_candidate) * i / (count - 1));
    }

    // warm start at the unlabeled mean, the exact optimum as 1/c -> 0
    Vector weights = Vector::Zero(total);
    weights.tail(n_u).setConstant(1.0 / static_cast<double>(n_u));

    std::vector<double> distances(static_cast<std::size_t>(count));
    for (int i = count - 1; i >= 0; --i) {
        const double t = 1.0 / candidates[static_cast<std::size_t>(i)];
        const Vector target = mean_u - t * mean_l;
        distances[static_cast<std::size_t>(i)] = hull_distance(z, target, 1.0 - t, weights, options.max_qp_iterations, options.qp_gap_tolerance);
    }

    ThetaEstimate estimate;
    for (int i = 0; i < count; ++i) {
        estimate.curve.push_back({ candidates[static_cast<std::size_t>(i)], distances[static_cast<std::size_t>(i)] });
    }
    estimate.slope_threshold = options.tau * (1.0 / std::sqrt(static_cast<double>(n_l)) + 1.0 / std::sqrt(static_cast<double>(n_u)));

    // Walk from c = 1 upwards; the first segment whose slope in t = 1/c falls
    // to the threshold marks the kink at t = theta.
    estimate.fallback = true;
    estimate.theta = 1.0;
    for (int i = 1; i < count; ++i) {
        const double t_hi = 1.0 / candidates[static_cast<std::size_t>(i - 1)];
        const double t_lo = 1.0 / candidates[static_cast<std::size_t>(i)];
        const double slope = (distances[static_cast<std::size_t>(i - 1)] - distances[static_cast<std::size_t>(i)]) / (t_hi - t_lo);
        if (slope <= estimate.slope_threshold) {
            estimate.theta = t_hi;
            estimate.fallback = false;
            break;
        }
    }
    estimate.theta = std::clamp(estimate.theta, 1e-3, 1.0);
    return estimate;
}

ThetaEstimate theta_override(const double value) {
    if (!(value > 0.0) || value > 1.0 || !std::isfinite(value)) {
        throw invalid_input{ "theta must lie in (0, 1], got " + std::to_string(value) };
    }
    ThetaEstimate estimate;
    estimate.theta = value;
    return estimate;
}

}  // namespace eulac
