// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Pass criterion numbers as arguments to run a subset.

#include "commands.hpp"

#include "eulac/data/config.hpp"
#include "eulac/data/synthetic.hpp"
#include "eulac/evalbench/baseline.hpp"
#include "eulac/evalbench/harness.hpp"
#include "eulac/evalbench/metrics.hpp"
#include "eulac/loss.hpp"
#include "eulac/mixture.hpp"
#include "eulac/modelsel.hpp"
#include "eulac/risk.hpp"
#include "eulac/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace eulac;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer), format, args...);
    return buffer;
}

SyntheticSpec task_spec() { return load_synthetic_spec(cli::default_spec_path()); }

// well separated new class for the theta criterion
SyntheticSpec separated_spec(const double theta, const Seed seed) {
    SyntheticSpec spec = task_spec();
    spec.novel.components[0].mean << 0.0, 4.0;
    spec.theta = theta;
    spec.seed = seed;
    return spec;
}

Outcome risk_equivalence() {
    Rng rng{ 101 };
    std::uniform_int_distribution<int> atoms{ 2, 50 };
    std::uniform_int_distribution<int> classes{ 1, 4 };
    std::uniform_real_distribution<double> theta{ 0.05, 1.0 };
    std::normal_distribution<double> score{ 0.0, 2.0 };
    const LossKind losses[] = { LossKind::square, LossKind::logistic, LossKind::double_hinge };
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const FiniteDistribution dist = random_finite_distribution(static_cast<std::size_t>(atoms(rng)), classes(rng), theta(rng), rng);
        Matrix scores(static_cast<Eigen::Index>(dist.size()), dist.num_known() + 1);
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            scores.data()[i] = score(rng);
        }
        const LossKind loss = losses[trial % 3];
        const double ovr = exact_ovr_risk(scores, dist, loss);
        worst = std::max({ worst, std::abs(ovr - exact_lac_risk(scores, dist, loss)), std::abs(ovr - exact_nonconvex_lac_risk(scores, dist, loss)) });
    }
    return { worst <= 1e-10, fmt("max |R_ovr - R_lac| over 100 triples = %.3g (limit 1e-10)", worst) };
}

Outcome surrogate_condition() {
    double worst = 0.0;
    for (const LossKind loss : { LossKind::square, LossKind::logistic, LossKind::double_hinge }) {
        for (int i = 0; i <= 2000; ++i) {
            const double z = -10.0 + 0.01 * i;
            worst = std::max(worst, std::abs(loss_value(loss, z) - loss_value(loss, -z) + z));
        }
    }
    return { worst <= 1e-12, fmt("max |psi(z) - psi(-z) + z| = %.3g (limit 1e-12)", worst) };
}

Outcome unbiasedness() {
    Rng rng{ 202 };
    const FiniteDistribution dist = random_finite_distribution(20, 3, 0.6, rng);
    std::normal_distribution<double> score{ 0.0, 1.5 };
    Matrix scores(static_cast<Eigen::Index>(dist.size()), 4);
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        scores.data()[i] = score(rng);
    }
    const double truth = exact_ovr_risk(scores, dist, LossKind::square);
    const int draws = 1000;
    const std::size_t n = 50;
    std::vector<double> values;
    for (int d = 0; d < draws; ++d) {
        const auto train = dist.sample_train(n, rng);
        const auto test = dist.sample_test_points(n, rng);
        Matrix l_scores(static_cast<Eigen::Index>(n), 4);
        Matrix u_scores(static_cast<Eigen::Index>(n), 4);
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n; ++i) {
            l_scores.row(static_cast<Eigen::Index>(i)) = scores.row(static_cast<Eigen::Index>(train[i].first));
            labels.push_back(train[i].second);
            u_scores.row(static_cast<Eigen::Index>(i)) = scores.row(static_cast<Eigen::Index>(test[i]));
        }
        values.push_back(empirical_lac_risk(l_scores, labels, u_scores, dist.theta(), LossKind::square));
    }
    double mean = 0.0;
    for (const double v : values) {
        mean += v / draws;
    }
    double var = 0.0;
    for (const double v : values) {
        var += (v - mean) * (v - mean) / (draws - 1);
    }
    const double se = std::sqrt(var / draws);
    return { std::abs(mean - truth) <= 3.0 * se, fmt("mean %.5f vs exact %.5f, |diff| = %.2f SE (limit 3)", mean, truth, std::abs(mean - truth) / se) };
}

Outcome solver_optimality() {
    SyntheticSpec spec = task_spec();
    spec.seed = 404;
    const ShiftSplit split = sample_synthetic(spec, 20, 40, 0);
    const KernelSpec kernel{ median_heuristic(stack(split.labeled.features, split.unlabeled.features)) };
    const double theta = 0.7;
    const double lambda = 1e-2;
    const Matrix g = gram(kernel, stack(split.labeled.features, split.unlabeled.features));

    const FitResult closed = fit_square_closed_form(split.labeled, split.unlabeled, kernel, theta, lambda);
    FitOptions options;
    options.lambda = lambda;
    options.max_iterations = 200000;
    options.gradient_tolerance = 1e-9;
    const FitResult iterative = fit_first_order(split.labeled, split.unlabeled, kernel, theta, options, LossKind::square);
    const ObjectiveSetup square{ theta, lambda, LossKind::square, true };
    const double gap = std::abs(objective(closed.model.alpha, g, split.labeled.labels, square) - objective(iterative.model.alpha, g, split.labeled.labels, square));

    Rng rng{ 405 };
    std::normal_distribution<double> normal{ 0.0, 1.0 };
    double worst_fd = 0.0;
    // the double hinge has kinks, so only the smooth losses are differenced
    for (int point = 0; point < 100; ++point) {
        const ObjectiveSetup setup{ theta, lambda, point % 2 == 0 ? LossKind::square : LossKind::logistic, true };
        Matrix alpha(g.rows(), 3);
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            alpha.data()[i] = 0.3 * normal(rng);
        }
        const Matrix analytic = objective_gradient(alpha, g, split.labeled.labels, setup);
        Matrix numeric(alpha.rows(), alpha.cols());
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            Matrix plus = alpha;
            Matrix minus = alpha;
            plus.data()[i] += h;
            minus.data()[i] -= h;
            numeric.data()[i] = (objective(plus, g, split.labeled.labels, setup) - objective(minus, g, split.labeled.labels, setup)) / (2.0 * h);
        }
        worst_fd = std::max(worst_fd, (numeric - analytic).cwiseAbs().maxCoeff() / analytic.cwiseAbs().maxCoeff());
    }
    const bool pass = closed.record.gradient_norm <= 1e-8 && gap <= 1e-6 && worst_fd <= 1e-4;
    return { pass, fmt("closed-form gradient %.2g (limit 1e-8), first-order objective gap %.2g (limit 1e-6), finite-difference rel. error %.2g (limit 1e-4)",
                       closed.record.gradient_norm, gap, worst_fd) };
}

struct TaskRun {
    double zero_one = 0.0;
    double f1 = 0.0;
    double baseline_f1 = 0.0;
    double theta_hat = 0.0;
};

// Criterion-5 task: theta estimated from (L, U), hyperparameters by CV.
std::vector<TaskRun> &task_runs() {
    static std::vector<TaskRun> runs = [] {
        std::vector<TaskRun> out;
        for (Seed seed = 1; seed <= 5; ++seed) {
            SyntheticSpec spec = task_spec();
            spec.seed = seed;
            const ShiftSplit split = sample_synthetic(spec, 500, 1000, 10000);
            const ThetaEstimate estimate =
                estimate_theta(split.labeled.features, split.unlabeled.features, mixture_kernel(split.labeled.features, split.unlabeled.features));
            const Selection selection = fit_with_selection(split.labeled, split.unlabeled, estimate.theta, HyperGrid{}, seed);
            const std::vector<Label> predicted = predict_labels(predict_scores(selection.fit.model, split.test.features));
            const ConfusionMatrix cm = confusion_matrix(split.test.labels, predicted, 2);
            const BaselineSelection baseline = fit_ovr_reject_with_selection(split.labeled, HyperGrid{}, seed);
            const ConfusionMatrix bcm = confusion_matrix(split.test.labels, ovr_reject_predict(baseline.model, split.test.features), 2);
            out.push_back({ 1.0 - accuracy(cm), macro_f1(cm), macro_f1(bcm), estimate.theta });
        }
        return out;
    }();
    return runs;
}

Outcome consistency() {
    const double bayes = bayes_risk_oracle(task_spec(), 400);
    double mean = 0.0;
    std::string thetas;
    for (const TaskRun &run : task_runs()) {
        mean += run.zero_one / 5.0;
        thetas += fmt(" %.3f", run.theta_hat);
    }
    return { std::abs(mean - bayes) <= 0.05, fmt("mean test 0-1 risk %.4f vs Bayes risk %.4f, gap %.4f (limit 0.05); theta_hat:%s", mean, bayes, mean - bayes, thetas.c_str()) };
}

Outcome theorem2() {
    const SyntheticSpec spec = task_spec();
    const ClassShiftModel density{ spec };
    const int classes = spec.num_known() + 1;
    // 2 eta - 1 from the true joint, optionally perturbed by a smooth bump
    auto bayes_scorer = [&](const double amplitude, const double frequency) -> Scorer {
        return [&density, classes, amplitude, frequency](const FeatureMatrix &x) {
            Matrix scores(x.rows(), classes);
            for (Eigen::Index j = 0; j < x.rows(); ++j) {
                const Vector joint = density.test_joint(x.row(j).transpose());
                const double total = joint.sum();
                for (int c = 0; c < classes; ++c) {
                    const double eta = total > 0.0 ? joint[c] / total : 1.0 / classes;
                    scores(j, c) = 2.0 * eta - 1.0 + amplitude * std::sin(frequency * x(j, 0) + c) * std::cos(frequency * x(j, 1));
                }
            }
            return scores;
        };
    };
    std::vector<std::pair<std::string, Theorem2Result>> results;
    Theorem2Options options;
    options.seed = 606;
    results.emplace_back("zero", run_theorem2_check(spec, [&](const FeatureMatrix &x) { return Matrix::Zero(x.rows(), classes).eval(); }, options));
    results.emplace_back("bayes", run_theorem2_check(spec, bayes_scorer(0.0, 0.0), options));
    results.emplace_back("bayes+0.1", run_theorem2_check(spec, bayes_scorer(0.1, 1.0), options));
    results.emplace_back("bayes+0.3", run_theorem2_check(spec, bayes_scorer(0.3, 2.0), options));
    results.emplace_back("bayes+0.6", run_theorem2_check(spec, bayes_scorer(0.6, 0.5), options));
    const double lambdas[] = { 1e-3, 1e-2, 1e-1, 1.0, 10.0 };
    for (int i = 0; i < 5; ++i) {
        SyntheticSpec seeded = spec;
        seeded.seed = 610 + static_cast<Seed>(i);
        const ShiftSplit split = sample_synthetic(seeded, 300, 600, 0);
        const KernelSpec kernel{ median_heuristic(stack(split.labeled.features, split.unlabeled.features)) };
        const FitResult fitted = fit_square_closed_form(split.labeled, split.unlabeled, kernel, spec.theta, lambdas[i]);
        results.emplace_back(fmt("fit(lambda=%g)", lambdas[i]), run_theorem2_check(spec, fitted.model, options));
    }
    bool pass = true;
    std::string detail;
    for (const auto &[name, r] : results) {
        pass = pass && r.holds;
        detail += fmt(" %s %.3f<=%.3f", name.c_str(), r.lhs, r.rhs + 3.0 * r.zero_one_standard_error);
    }
    return { pass, "lhs <= rhs + 3 SE on 10 models:" + detail };
}

Outcome unlabeled_scaling() {
    ScalingOptions options;
    options.n_test = 5000;
    std::vector<Seed> seeds;
    for (Seed s = 1; s <= 10; ++s) {
        seeds.push_back(s);
    }
    const SyntheticSpec spec = task_spec();
    const ExperimentReport report = run_unlabeled_scaling(spec, options, seeds);
    TheoryParams params;
    params.theta = spec.theta;
    params.num_known = spec.num_known();
    params.n_labeled = 500;
    params = with_loss_constants(params, LossKind::square);
    bool decreasing = true;
    double previous = INFINITY;
    std::string curve;
    for (const std::size_t n : options.sizes) {
        params.n_unlabeled = static_cast<double>(n);
        const double bound = theorem3_bound(params);
        decreasing = decreasing && bound < previous;
        previous = bound;
    }
    for (const AggregateRow &row : report.rows) {
        curve += fmt(" %g:%.4f", row.x, row.macro_f1_mean);
    }
    const double rho = report.spearman.value_or(0.0);
    return { rho > 0.0 && decreasing, fmt("Spearman(n_u, mean macro-F1) = %.3f (need > 0), bound strictly decreasing: %s; F1:%s", rho, decreasing ? "yes" : "no", curve.c_str()) };
}

Outcome theta_estimation() {
    bool pass = true;
    std::string detail;
    for (const double theta : { 0.5, 0.7, 0.9 }) {
        double error = 0.0;
        for (Seed seed = 1; seed <= 3; ++seed) {
            const ShiftSplit split = sample_synthetic(separated_spec(theta, seed), 1000, 1000, 0);
            const ThetaEstimate estimate =
                estimate_theta(split.labeled.features, split.unlabeled.features, mixture_kernel(split.labeled.features, split.unlabeled.features));
            error += std::abs(estimate.theta - theta) / 3.0;
        }
        pass = pass && error <= 0.1;
        detail += fmt(" theta=%.1f: %.3f", theta, error);
    }
    return { pass, "mean |theta_hat - theta| over 3 seeds (limit 0.1):" + detail };
}

Outcome baseline_dominance() {
    double eulac = 0.0;
    double baseline = 0.0;
    for (const TaskRun &run : task_runs()) {
        eulac += run.f1 / 5.0;
        baseline += run.baseline_f1 / 5.0;
    }
    return { eulac - baseline >= 0.05, fmt("EULAC macro-F1 %.4f vs OVR-reject %.4f, margin %.4f (limit 0.05)", eulac, baseline, eulac - baseline) };
}

std::string slurp(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    return { std::istreambuf_iterator<char>{ in }, std::istreambuf_iterator<char>{} };
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "eulac_acceptance_determinism";
    std::filesystem::remove_all(root);
    std::ostringstream log;
    for (const char *run : { "a", "b" }) {
        cli::GenConfig gen;
        gen.out = root / run;
        gen.seed = 77;
        gen.n_labeled = 200;
        gen.n_unlabeled = 300;
        gen.n_test = 300;
        cli::cmd_gen(gen, log);
    }
    std::vector<std::string> mismatched;
    for (const char *file : { "labeled.libsvm", "unlabeled.csv", "test.libsvm", "manifest.json" }) {
        if (slurp(root / "a" / file) != slurp(root / "b" / file)) {
            mismatched.push_back(file);
        }
    }
    for (const char *run : { "fit_a", "fit_b" }) {
        cli::TrainConfig fit;
        fit.labeled = root / "a" / "labeled.libsvm";
        fit.unlabeled = root / "a" / "unlabeled.csv";
        fit.out = root / run;
        fit.seed = 77;
        cli::cmd_fit(fit, log);
    }
    for (const char *file : { "model.txt", "cv_report.json" }) {
        if (slurp(root / "fit_a" / file) != slurp(root / "fit_b" / file) || slurp(root / "fit_a" / file).empty()) {
            mismatched.push_back(file);
        }
    }
    std::filesystem::remove_all(root);
    std::string detail = mismatched.empty() ? "gen and fit artifacts byte-identical across reruns" : "differing artifacts:";
    for (const std::string &f : mismatched) {
        detail += " " + f;
    }
    return { mismatched.empty(), detail };
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        { "risk equivalence (exact OVR = LAC risks)", risk_equivalence },
        { "surrogate condition psi(z) - psi(-z) = -z", surrogate_condition },
        { "unbiasedness of the empirical LAC risk", unbiasedness },
        { "solver optimality", solver_optimality },
        { "consistency at desk scale", consistency },
        { "excess-risk transfer (square loss)", theorem2 },
        { "unlabeled scaling", unlabeled_scaling },
        { "theta estimation", theta_estimation },
        { "baseline dominance", baseline_dominance },
        { "determinism", determinism },
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(number)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception &e) {
            outcome = { false, std::string{ "exception: " } + e.what() };
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s: %s - %s [%.1fs]\n", number, outcome.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
