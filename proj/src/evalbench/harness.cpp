#include "eulac/evalbench/harness.hpp"

#include "eulac/evalbench/baseline.hpp"
#include "eulac/evalbench/metrics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

namespace eulac {

namespace {

std::pair<double, double> mean_std(const std::vector<double> &values) {
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) {
        return { mean, 0.0 };
    }
    double spread = 0.0;
    for (const double v : values) {
        spread += (v - mean) * (v - mean);
    }
    return { mean, std::sqrt(spread / (n - 1.0)) };
}

void fill_spearman(ExperimentReport &report) {
    if (report.rows.size() < 2) {
        report.spearman.reset();
        return;
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const AggregateRow &row : report.rows) {
        x.push_back(row.x);
        y.push_back(row.macro_f1_mean);
    }
    report.spearman = spearman(x, y);
}

nlohmann::json grid_json(const HyperGrid &grid) {
    return { { "sigma_multipliers", grid.sigma_multipliers }, { "lambda_candidates", grid.lambda_candidates }, { "loss", to_string(grid.loss) }, { "folds", grid.folds } };
}

nlohmann::json evaluation_json(const EvaluationOptions &options) {
    return { { "grid", grid_json(options.grid) }, { "with_baseline", options.with_baseline }, { "estimate_theta", options.estimate_theta } };
}

}  // namespace

std::vector<AggregateRow> aggregate(std::span<const RunRecord> runs) {
    std::vector<double> xs;
    for (const RunRecord &run : runs) {
        if (std::find(xs.begin(), xs.end(), run.x) == xs.end()) {
            xs.push_back(run.x);
        }
    }
    std::vector<AggregateRow> rows;
    for (const double x : xs) {
        std::vector<double> f1;
        std::vector<double> acc;
        std::vector<double> base;
        for (const RunRecord &run : runs) {
            if (run.x != x) {
                continue;
            }
            f1.push_back(run.macro_f1);
            acc.push_back(run.accuracy);
            if (run.baseline_macro_f1) {
                base.push_back(*run.baseline_macro_f1);
            }
        }
        AggregateRow row;
        row.x = x;
        row.n = f1.size();
        std::tie(row.macro_f1_mean, row.macro_f1_std) = mean_std(f1);
        std::tie(row.accuracy_mean, row.accuracy_std) = mean_std(acc);
        if (!base.empty()) {
            row.baseline_macro_f1_mean = mean_std(base).first;
        }
        rows.push_back(row);
    }
    return rows;
}

RunRecord evaluate_split(const ShiftSplit &split, const double true_theta, const EvaluationOptions &options, const Seed seed) {
    RunRecord run;
    run.seed = seed;
    run.theta = options.estimate_theta ? estimate_theta(split.labeled.features, split.unlabeled.features,
                                                        mixture_kernel(split.labeled.features, split.unlabeled.features), options.mixture)
                                             .theta
                                       : true_theta;
    const Selection selection = fit_with_selection(split.labeled, split.unlabeled, run.theta, options.grid, seed);
    const DualModel &model = selection.fit.model;
    run.sigma = model.kernel.sigma;
    run.lambda = model.lambda;

    const Matrix test_scores = predict_scores(model, split.test.features);
    const std::vector<Label> predictions = predict_labels(test_scores);
    const ConfusionMatrix cm = confusion_matrix(split.test.labels, predictions, split.test.num_known);
    run.accuracy = accuracy(cm);
    run.macro_f1 = macro_f1(cm);
    run.zero_one_risk = 1.0 - run.accuracy;
    run.lac_risk = empirical_lac_risk(predict_scores(model, split.labeled.features), split.labeled.labels, test_scores, run.theta, model.loss);

    if (options.with_baseline) {
        const BaselineSelection baseline = fit_ovr_reject_with_selection(split.labeled, options.grid, seed);
        const ConfusionMatrix bcm = confusion_matrix(split.test.labels, ovr_reject_predict(baseline.model, split.test.features), split.test.num_known);
        run.baseline_accuracy = accuracy(bcm);
        run.baseline_macro_f1 = macro_f1(bcm);
    }
    return run;
}

ExperimentReport run_unlabeled_scaling(const SyntheticSpec &spec, const ScalingOptions &options, std::span<const Seed> seeds) {
    if (options.sizes.empty() || seeds.empty()) {
        throw invalid_input{ "unlabeled scaling: sizes and seeds must be nonempty" };
    }
    for (std::size_t i = 1; i < options.sizes.size(); ++i) {
        if (options.sizes[i] <= options.sizes[i - 1]) {
            throw invalid_input{ "unlabeled scaling: sizes must be increasing" };
        }
    }
    ExperimentReport report;
    report.name = "unlabeled-scaling";
    report.config = { { "n_labeled", options.n_labeled }, { "sizes", options.sizes }, { "n_test", options.n_test }, { "seeds", std::vector<Seed>(seeds.begin(), seeds.end()) },
                      { "theta", spec.theta }, { "evaluation", evaluation_json(options.evaluation) } };

    const std::size_t largest = options.sizes.back();
    for (const Seed seed : seeds) {
        SyntheticSpec seeded = spec;
        seeded.seed = seed;
        const ShiftSplit full = sample_synthetic(seeded, options.n_labeled, largest, options.n_test);
        for (const std::size_t size : options.sizes) {
            std::vector<std::size_t> prefix(size);
            std::iota(prefix.begin(), prefix.end(), std::size_t{ 0 });
            ShiftSplit split{ full.labeled, select(full.unlabeled, prefix), full.test };
            RunRecord run = evaluate_split(split, spec.theta, options.evaluation, seed);
            run.x = static_cast<double>(size);
            report.runs.push_back(run);
        }
    }
    // runs are stored seed-major; aggregate groups by size
    report.rows = aggregate(report.runs);
    if (options.theory) {
        for (AggregateRow &row : report.rows) {
            TheoryParams params = *options.theory;
            params.n_unlabeled = row.x;
            row.bound = theorem3_bound(params);
        }
    }
    fill_spearman(report);
    return report;
}

ExperimentReport run_theta_sweep(const SyntheticSpec &spec, const ThetaSweepOptions &options, std::span<const Seed> seeds) {
    if (options.ratios.empty() || seeds.empty()) {
        throw invalid_input{ "theta sweep: ratios and seeds must be nonempty" };
    }
    for (const double r : options.ratios) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw invalid_input{ "theta sweep: new-class ratio " + std::to_string(r) + " outside [0, 1)" };
        }
    }
    ExperimentReport report;
    report.name = "theta-sweep";
    report.config = { { "ratios", options.ratios },       { "n_labeled", options.n_labeled },
                      { "n_unlabeled", options.n_unlabeled }, { "n_test", options.n_test },
                      { "seeds", std::vector<Seed>(seeds.begin(), seeds.end()) }, { "evaluation", evaluation_json(options.evaluation) } };
    for (const double ratio : options.ratios) {
        for (const Seed seed : seeds) {
            SyntheticSpec seeded = spec;
            seeded.seed = seed;
            seeded.theta = 1.0 - ratio;
            const ShiftSplit split = sample_synthetic(seeded, options.n_labeled, options.n_unlabeled, options.n_test);
            RunRecord run = evaluate_split(split, seeded.theta, options.evaluation, seed);
            run.x = ratio;
            report.runs.push_back(run);
        }
    }
    report.rows = aggregate(report.runs);
    fill_spearman(report);
    return report;
}

Theorem2Result run_theorem2_check(const SyntheticSpec &spec, const Scorer &scorer, const Theorem2Options &options) {
    spec.validate();
    if (spec.dimension > 2) {
        throw invalid_input{ "theorem 2 check needs dimension <= 2, got " + std::to_string(spec.dimension) };
    }
    if (options.test_samples < 2) {
        throw invalid_input{ "theorem 2 check needs at least two test samples" };
    }
    const ClassShiftModel density{ spec };
    const QuadratureGrid grid = make_quadrature_grid(density, options.resolution);
    Matrix joint(grid.points.rows(), spec.num_known() + 1);
    for (Eigen::Index j = 0; j < grid.points.rows(); ++j) {
        joint.row(j) = grid.cell_volume * density.test_joint(grid.points.row(j).transpose()).transpose();
    }

    Theorem2Result result;
    result.bayes_risk = bayes_risk_from_joint(joint);
    result.lac_risk = ovr_risk_from_joint(joint, scorer(grid.points), LossKind::square);
    result.min_lac_risk = min_square_lac_risk_from_joint(joint);

    SyntheticSpec seeded = spec;
    seeded.seed = options.seed;
    const ShiftSplit sample = sample_synthetic(seeded, 0, 0, options.test_samples);
    const std::vector<Label> predictions = predict_labels(scorer(sample.test.features));
    result.zero_one_risk = zero_one_risk(predictions, sample.test.labels);
    const auto n = static_cast<double>(options.test_samples);
    result.zero_one_standard_error = std::sqrt(std::max(result.zero_one_risk * (1.0 - result.zero_one_risk), 1.0 / n) / n);

    result.lhs = result.zero_one_risk - result.bayes_risk;
    result.rhs = std::sqrt(2.0 * std::max(result.lac_risk - result.min_lac_risk, 0.0));
    result.holds = result.lhs <= result.rhs + 3.0 * result.zero_one_standard_error;
    return result;
}

Theorem2Result run_theorem2_check(const SyntheticSpec &spec, const DualModel &model, const Theorem2Options &options) {
    if (model.loss != LossKind::square) {
        throw invalid_input{ "theorem 2 check applies to square-loss models, got " + to_string(model.loss) };
    }
    if (model.num_known() != spec.num_known()) {
        throw invalid_input{ "theorem 2 check: model and spec disagree on the class count" };
    }
    return run_theorem2_check(spec, [&](const FeatureMatrix &x) { return predict_scores(model, x); }, options);
}

void to_json(nlohmann::json &out, const RunRecord &run) {
    out = { { "x", run.x },
            { "seed", run.seed },
            { "theta", run.theta },
            { "sigma", run.sigma },
            { "lambda", run.lambda },
            { "accuracy", run.accuracy },
            { "macro_f1", run.macro_f1 },
            { "zero_one_risk", run.zero_one_risk },
            { "lac_risk", run.lac_risk } };
    if (run.baseline_macro_f1) {
        out["baseline_accuracy"] = *run.baseline_accuracy;
        out["baseline_macro_f1"] = *run.baseline_macro_f1;
    }
}

void to_json(nlohmann::json &out, const AggregateRow &row) {
    out = { { "x", row.x },
            { "n", row.n },
            { "macro_f1_mean", row.macro_f1_mean },
            { "macro_f1_std", row.macro_f1_std },
            { "accuracy_mean", row.accuracy_mean },
            { "accuracy_std", row.accuracy_std } };
    if (row.baseline_macro_f1_mean) {
        out["baseline_macro_f1_mean"] = *row.baseline_macro_f1_mean;
    }
    if (row.bound) {
        out["theorem3_bound"] = *row.bound;
    }
}

void to_json(nlohmann::json &out, const ExperimentReport &report) {
    out = { { "experiment", report.name }, { "config", report.config }, { "runs", report.runs }, { "aggregates", report.rows } };
    out["spearman"] = report.spearman ? nlohmann::json(*report.spearman) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json &out, const Theorem2Result &result) {
    out = { { "zero_one_risk", result.zero_one_risk },
            { "zero_one_standard_error", result.zero_one_standard_error },
            { "bayes_risk", result.bayes_risk },
            { "lac_risk", result.lac_risk },
            { "min_lac_risk", result.min_lac_risk },
            { "lhs", result.lhs },
            { "rhs", result.rhs },
            { "holds", result.holds } };
}

void write_plot_csv(std::ostream &out, const ExperimentReport &report, const std::string &metric) {
    if (metric != "macro_f1" && metric != "accuracy") {
        throw invalid_input{ "unknown plot metric '" + metric + "'" };
    }
    const bool f1 = metric == "macro_f1";
    out << "x,mean,std,n\n";
    for (const AggregateRow &row : report.rows) {
        const nlohmann::json x = row.x;
        const nlohmann::json mean = f1 ? row.macro_f1_mean : row.accuracy_mean;
        const nlohmann::json spread = f1 ? row.macro_f1_std : row.accuracy_std;
        out << x.dump() << ',' << mean.dump() << ',' << spread.dump() << ',' << row.n << '\n';
    }
}

}  // namespace eulac
