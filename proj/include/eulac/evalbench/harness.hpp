#pragma once

#include "eulac/data/sampling.hpp"
#include "eulac/data/synthetic.hpp"
#include "eulac/mixture.hpp"
#include "eulac/modelsel.hpp"
#include "eulac/risk.hpp"
#include "eulac/solver.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eulac {

/// One (x, seed) run. x is the swept quantity (n_u, theta, ...).
struct RunRecord {
    double x = 0.0;
    Seed seed = 0;
    double theta = 1.0;  // value handed to the learner
    double sigma = 0.0;
    double lambda = 0.0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double zero_one_risk = 0.0;
    /// Empirical LAC risk with the test points as the unlabeled sample.
    double lac_risk = 0.0;
    std::optional<double> baseline_accuracy;
    std::optional<double> baseline_macro_f1;
};

struct AggregateRow {
    double x = 0.0;
    std::size_t n = 0;
    double macro_f1_mean = 0.0;
    double macro_f1_std = 0.0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    std::optional<double> baseline_macro_f1_mean;
    std::optional<double> bound;
};

struct ExperimentReport {
    std::string name;
    nlohmann::json config;
    std::vector<RunRecord> runs;
    std::vector<AggregateRow> rows;
    /// Spearman(x, mean macro-F1); absent with fewer than two rows.
    std::optional<double> spearman;
};

/// Groups runs by x in order of first appearance; std is the sample standard
/// deviation (0 for a single run).
[[nodiscard]] std::vector<AggregateRow> aggregate(std::span<const RunRecord> runs);

struct EvaluationOptions {
    HyperGrid grid;
    bool with_baseline = false;
    /// Estimate theta from (L, U) instead of using the generator's value.
    bool estimate_theta = false;
    MixtureOptions mixture;
};

/// CV-selected EULAC fit on (labeled, unlabeled), scored on the test split.
[[nodiscard]] RunRecord evaluate_split(const ShiftSplit &split, double true_theta, const EvaluationOptions &options, Seed seed);

struct ScalingOptions {
    std::size_t n_labeled = 500;
    std::vector<std::size_t> sizes{ 250, 500, 750, 1000, 1250, 1500 };
    std::size_t n_test = 2000;
    EvaluationOptions evaluation;
    /// When set, each row also carries theorem3_bound at that n_u.
    std::optional<TheoryParams> theory;
};

/// For each seed the largest sample is drawn once and smaller unlabeled sets
/// are its prefixes, so sizes differ only in the unlabeled data.
[[nodiscard]] ExperimentReport run_unlabeled_scaling(const SyntheticSpec &spec, const ScalingOptions &options, std::span<const Seed> seeds);

struct ThetaSweepOptions {
    /// New-class ratios; theta = 1 - ratio.
    std::vector<double> ratios{ 0.0, 0.2, 0.6, 0.8 };
    std::size_t n_labeled = 500;
    std::size_t n_unlabeled = 1000;
    std::size_t n_test = 2000;
    EvaluationOptions evaluation;
};

[[nodiscard]] ExperimentReport run_theta_sweep(const SyntheticSpec &spec, const ThetaSweepOptions &options, std::span<const Seed> seeds);

using Scorer = std::function<Matrix(const FeatureMatrix &)>;

struct Theorem2Options {
    int resolution = 200;
    std::size_t test_samples = 20000;
    Seed seed = 0;
};

struct Theorem2Result {
    double zero_one_risk = 0.0;
    double zero_one_standard_error = 0.0;
    double bayes_risk = 0.0;
    double lac_risk = 0.0;
    double min_lac_risk = 0.0;
    double lhs = 0.0;  // zero_one_risk - bayes_risk
    double rhs = 0.0;  // sqrt(2 (lac_risk - min_lac_risk))
    bool holds = false;  // lhs <= rhs + 3 standard errors
};

/// Square-loss excess-risk transfer check on a d <= 2 spec. The 0-1 risk is
/// a Monte-Carlo estimate; every other term is quadrature.
[[nodiscard]] Theorem2Result run_theorem2_check(const SyntheticSpec &spec, const Scorer &scorer, const Theorem2Options &options);
[[nodiscard]] Theorem2Result run_theorem2_check(const SyntheticSpec &spec, const DualModel &model, const Theorem2Options &options);

void to_json(nlohmann::json &out, const RunRecord &run);
void to_json(nlohmann::json &out, const AggregateRow &row);
void to_json(nlohmann::json &out, const ExperimentReport &report);
void to_json(nlohmann::json &out, const Theorem2Result &result);

/// Plot data, header `x,mean,std,n`; metric is "macro_f1" or "accuracy".
void write_plot_csv(std::ostream &out, const ExperimentReport &report, const std::string &metric = "macro_f1");

}  // namespace eulac
