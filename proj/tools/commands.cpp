#include "commands.hpp"

#include "eulac/data/config.hpp"
#include "eulac/data/io.hpp"
#include "eulac/data/synthetic.hpp"
#include "eulac/evalbench/harness.hpp"
#include "eulac/evalbench/metrics.hpp"
#include "eulac/mixture.hpp"
#include "eulac/modelsel.hpp"
#include "eulac/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#ifndef EULAC_DATA_DIR
#define EULAC_DATA_DIR "data"
#endif

namespace eulac::cli {

namespace {

using nlohmann::json;

void ensure_directory(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw error{ "cannot create output directory '" + dir.string() + "'" };
    }
}

void write_json(const std::filesystem::path &path, const json &doc) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ "cannot open '" + path.string() + "' for writing" };
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw error{ "failed writing '" + path.string() + "'" };
    }
}

template <typename Write>
void write_text(const std::filesystem::path &path, Write &&write) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ "cannot open '" + path.string() + "' for writing" };
    }
    write(out);
    if (!out) {
        throw error{ "failed writing '" + path.string() + "'" };
    }
}

void require_file(const std::filesystem::path &path, const std::string &what) {
    if (path.empty()) {
        throw invalid_input{ what + " file not given" };
    }
    if (!std::filesystem::is_regular_file(path)) {
        throw error{ what + " file '" + path.string() + "' does not exist" };
    }
}

std::string spec_text(const SyntheticSpec &spec) {
    std::ostringstream text;
    write_synthetic_spec(text, spec);
    return text.str();
}

HyperGrid make_grid(const LossKind loss, const std::vector<double> &lambdas, const std::vector<double> &sigma_mults, const std::size_t folds) {
    HyperGrid grid;
    grid.loss = loss;
    grid.folds = folds;
    if (!lambdas.empty()) {
        grid.lambda_candidates = lambdas;
    }
    if (!sigma_mults.empty()) {
        grid.sigma_multipliers = sigma_mults;
    }
    grid.validate();
    return grid;
}

json train_config_json(const TrainConfig &config) {
    return { { "labeled", config.labeled.string() },
             { "unlabeled", config.unlabeled.string() },
             { "seed", config.seed },
             { "theta", config.theta ? json(*config.theta) : json(nullptr) },
             { "theta_threshold", config.theta_threshold },
             { "loss", to_string(config.loss) },
             { "lambdas", config.lambdas },
             { "sigma_mults", config.sigma_mults },
             { "folds", config.folds } };
}

json theta_json(const ThetaEstimate &estimate) {
    json curve = json::array();
    for (const DistancePoint &p : estimate.curve) {
        curve.push_back({ { "candidate", p.candidate }, { "distance", p.distance } });
    }
    return { { "theta", estimate.theta }, { "estimated", !estimate.curve.empty() }, { "fallback", estimate.fallback },
             { "slope_threshold", estimate.slope_threshold }, { "curve", curve } };
}

struct TrainingData {
    LabeledDataset labeled;
    UnlabeledDataset unlabeled;
};

TrainingData load_training(const TrainConfig &config) {
    require_file(config.labeled, "labeled");
    require_file(config.unlabeled, "unlabeled");
    UnlabeledDataset unlabeled = load_csv_features(config.unlabeled);
    // trailing zero features are omitted in LIBSVM rows, so size by the CSV
    const RawLabeledData raw = read_libsvm(config.labeled, unlabeled.dimension());
    if (std::find(raw.labels.begin(), raw.labels.end(), 0) != raw.labels.end()) {
        throw invalid_input{ "labeled file '" + config.labeled.string() + "' contains label 0, which is reserved for the new class" };
    }
    TrainingData data{ remap_labels(raw.features, raw.labels), std::move(unlabeled) };
    if (data.labeled.dimension() != data.unlabeled.dimension()) {
        throw invalid_input{ "labeled data has dimension " + std::to_string(data.labeled.dimension()) + " but unlabeled data has " +
                             std::to_string(data.unlabeled.dimension()) };
    }
    return data;
}

ThetaEstimate theta_for(const TrainConfig &config, const TrainingData &data, std::ostream &log) {
    if (config.theta) {
        return theta_override(*config.theta);
    }
    MixtureOptions options;
    options.tau = config.theta_threshold;
    ThetaEstimate estimate =
        estimate_theta(data.labeled.features, data.unlabeled.features, mixture_kernel(data.labeled.features, data.unlabeled.features), options);
    if (estimate.fallback) {
        log << "warning: distance curve never flattened; using theta = 1 (no new class detected)\n";
    }
    log << "theta estimate: " << estimate.theta << '\n';
    return estimate;
}

std::vector<Seed> seed_range(const Seed first, const std::size_t count) {
    std::vector<Seed> seeds(count);
    std::iota(seeds.begin(), seeds.end(), first);
    return seeds;
}

}  // namespace

std::filesystem::path default_spec_path() { return std::filesystem::path{ EULAC_DATA_DIR } / "synthetic_2d.cfg"; }

int cmd_gen(const GenConfig &config, std::ostream &log) {
    const std::filesystem::path spec_path = config.spec.empty() ? default_spec_path() : config.spec;
    require_file(spec_path, "synthetic spec");
    SyntheticSpec spec = load_synthetic_spec(spec_path);
    spec.seed = config.seed;
    if (config.theta) {
        spec.theta = *config.theta;
    }
    spec.validate();
    ensure_directory(config.out);

    const ShiftSplit split = sample_synthetic(spec, config.n_labeled, config.n_unlabeled, config.n_test);
    write_libsvm(config.out / "labeled.libsvm", split.labeled);
    write_csv_features(config.out / "unlabeled.csv", split.unlabeled);
    write_libsvm(config.out / "test.libsvm", split.test);

    json manifest = { { "command", "gen" },
                      { "spec", spec_text(spec) },
                      { "seed", config.seed },
                      { "theta", spec.theta },
                      { "n_labeled", config.n_labeled },
                      { "n_unlabeled", config.n_unlabeled },
                      { "n_test", config.n_test },
                      { "files", { { "labeled", "labeled.libsvm" }, { "unlabeled", "unlabeled.csv" }, { "test", "test.libsvm" } } },
                      { "new_class_label", 0 } };
    if (spec.dimension <= 2) {
        manifest["bayes_risk"] = bayes_risk_oracle(spec, config.resolution);
        manifest["bayes_resolution"] = config.resolution;
    } else {
        manifest["bayes_risk"] = nullptr;
    }
    write_json(config.out / "manifest.json", manifest);
    log << "wrote " << split.labeled.size() << " labeled, " << split.unlabeled.size() << " unlabeled and " << split.test.size() << " test samples to "
        << config.out.string() << '\n';
    return exit_ok;
}

int cmd_theta(const TrainConfig &config, std::ostream &log) {
    const TrainingData data = load_training(config);
    ensure_directory(config.out);
    const ThetaEstimate estimate = theta_for(config, data, log);
    json doc = theta_json(estimate);
    doc["command"] = "theta";
    doc["config"] = train_config_json(config);
    write_json(config.out / "theta.json", doc);
    return exit_ok;
}

int cmd_cv(const TrainConfig &config, std::ostream &log) {
    const TrainingData data = load_training(config);
    ensure_directory(config.out);
    const ThetaEstimate estimate = theta_for(config, data, log);
    const HyperGrid grid = make_grid(config.loss, config.lambdas, config.sigma_mults, config.folds);
    const CvReport report = cross_validate(data.labeled, data.unlabeled, estimate.theta, grid, config.seed);
    write_json(config.out / "cv_report.json", { { "command", "cv" }, { "config", train_config_json(config) }, { "theta", theta_json(estimate) }, { "cv", report } });
    log << "selected sigma = " << report.best().sigma << ", lambda = " << report.best().lambda << " (mean validation risk " << report.best().mean_risk << ")\n";
    const bool converged = std::all_of(report.cells.begin(), report.cells.end(), [](const CvCell &c) { return c.converged; });
    if (!converged) {
        log << "warning: some cross-validation fits did not converge\n";
        return exit_warning;
    }
    return exit_ok;
}

int cmd_fit(const TrainConfig &config, std::ostream &log) {
    const TrainingData data = load_training(config);
    ensure_directory(config.out);
    const ThetaEstimate estimate = theta_for(config, data, log);
    const HyperGrid grid = make_grid(config.loss, config.lambdas, config.sigma_mults, config.folds);
    const Selection selection = fit_with_selection(data.labeled, data.unlabeled, estimate.theta, grid, config.seed);
    save_model(config.out / "model.txt", selection.fit.model);
    const ConvergenceRecord &record = selection.fit.record;
    write_json(config.out / "cv_report.json",
               { { "command", "fit" },
                 { "config", train_config_json(config) },
                 { "theta", theta_json(estimate) },
                 { "cv", selection.report },
                 { "final_fit", { { "iterations", record.iterations }, { "gradient_norm", record.gradient_norm }, { "converged", record.converged } } } });
    log << "model written to " << (config.out / "model.txt").string() << '\n';
    if (!record.converged) {
        log << "warning: final fit stopped before reaching the gradient tolerance (gradient max-norm " << record.gradient_norm << ")\n";
        return exit_warning;
    }
    return exit_ok;
}

int cmd_eval(const EvalConfig &config, std::ostream &log) {
    require_file(config.model, "model");
    require_file(config.test, "test");
    const DualModel model = load_model(config.model);
    const RawLabeledData raw = read_libsvm(config.test, model.support.cols());
    if (raw.features.cols() != model.support.cols()) {
        throw invalid_input{ "test data has dimension " + std::to_string(raw.features.cols()) + " but the model expects " + std::to_string(model.support.cols()) };
    }
    // file label 0 and labels the model never saw are the new class
    const int K = model.num_known();
    std::vector<Label> truths;
    std::size_t known_hits = 0;
    std::size_t unseen = 0;
    for (const int label : raw.labels) {
        const auto it = std::find(model.original_labels.begin(), model.original_labels.end(), label);
        if (label != 0 && it != model.original_labels.end()) {
            truths.push_back(static_cast<Label>(it - model.original_labels.begin()) + 1);
            ++known_hits;
        } else {
            unseen += label != 0 ? 1 : 0;
            truths.push_back(new_class_label(K));
        }
    }
    if (known_hits == 0 && unseen > 0) {
        throw invalid_input{ "test labels share no class with the model's label set" };
    }
    if (unseen > 0) {
        log << "note: " << unseen << " test samples carry labels unknown to the model and count as the new class\n";
    }
    const std::vector<Label> predictions = predict_labels(predict_scores(model, raw.features));
    const ConfusionMatrix cm = confusion_matrix(truths, predictions, K);

    json labels = json::array();
    for (const int label : model.original_labels) {
        labels.push_back(label);
    }
    labels.push_back("nc");
    json matrix = json::array();
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) {
            row.push_back(cm.counts(r, c));
        }
        matrix.push_back(row);
    }
    const double acc = accuracy(cm);
    const double f1 = macro_f1(cm);
    ensure_directory(config.out);
    write_json(config.out / "metrics.json", { { "command", "eval" },
                                              { "config", { { "model", config.model.string() }, { "test", config.test.string() } } },
                                              { "n", cm.total() },
                                              { "accuracy", acc },
                                              { "macro_f1", f1 },
                                              { "zero_one_risk", 1.0 - acc },
                                              { "labels", labels },
                                              { "confusion_matrix", matrix } });
    log << "accuracy " << acc << ", macro-F1 " << f1 << " on " << cm.total() << " samples\n";
    return exit_ok;
}

int cmd_bench(const BenchConfig &config, std::ostream &log) {
    const std::filesystem::path spec_path = config.spec.empty() ? default_spec_path() : config.spec;
    require_file(spec_path, "synthetic spec");
    const SyntheticSpec spec = load_synthetic_spec(spec_path);
    if (config.runs == 0) {
        throw invalid_input{ "bench needs at least one run" };
    }
    ensure_directory(config.out);
    const std::vector<Seed> seeds = seed_range(config.seed, config.runs);
    EvaluationOptions evaluation;
    evaluation.grid = make_grid(config.loss, config.lambdas, config.sigma_mults, config.folds);
    evaluation.with_baseline = config.with_baseline;

    if (config.harness == "scaling") {
        ScalingOptions options;
        options.evaluation = evaluation;
        TheoryParams theory;
        theory.theta = spec.theta;
        theory.num_known = spec.num_known();
        theory.n_labeled = static_cast<double>(options.n_labeled);
        options.theory = with_loss_constants(theory, config.loss);
        const ExperimentReport report = run_unlabeled_scaling(spec, options, seeds);
        write_json(config.out / "scaling.json", report);
        write_text(config.out / "scaling.csv", [&](std::ostream &out) { write_plot_csv(out, report); });
        log << "scaling: " << report.rows.size() << " rows";
        if (report.spearman) {
            log << ", Spearman(n_u, macro-F1) = " << *report.spearman;
        }
        log << '\n';
        return exit_ok;
    }
    if (config.harness == "theta-sweep") {
        ThetaSweepOptions options;
        options.evaluation = evaluation;
        const ExperimentReport report = run_theta_sweep(spec, options, seeds);
        write_json(config.out / "theta_sweep.json", report);
        write_text(config.out / "theta_sweep.csv", [&](std::ostream &out) { write_plot_csv(out, report, "macro_f1"); });
        write_text(config.out / "theta_sweep_accuracy.csv", [&](std::ostream &out) { write_plot_csv(out, report, "accuracy"); });
        log << "theta-sweep: " << report.rows.size() << " rows\n";
        return exit_ok;
    }
    if (config.harness == "theorem2") {
        if (config.loss != LossKind::square) {
            throw invalid_input{ "theorem2 harness needs --loss square" };
        }
        json runs = json::array();
        bool all_hold = true;
        for (const Seed seed : seeds) {
            SyntheticSpec seeded = spec;
            seeded.seed = seed;
            const ShiftSplit split = sample_synthetic(seeded, 500, 1000, 0);
            const Selection selection = fit_with_selection(split.labeled, split.unlabeled, spec.theta, evaluation.grid, seed);
            Theorem2Options options;
            options.seed = seed + 1000003;
            const Theorem2Result fitted = run_theorem2_check(spec, selection.fit.model, options);
            const Theorem2Result zero = run_theorem2_check(
                spec, [&](const FeatureMatrix &x) { return Matrix::Zero(x.rows(), spec.num_known() + 1).eval(); }, options);
            all_hold = all_hold && fitted.holds && zero.holds;
            runs.push_back({ { "seed", seed }, { "fitted", fitted }, { "zero_model", zero } });
            log << "theorem2 seed " << seed << ": lhs " << fitted.lhs << (fitted.holds ? " <= " : " > ") << "rhs " << fitted.rhs << " + 3 se ("
                << (fitted.holds ? "holds" : "violated") << ")\n";
        }
        write_json(config.out / "theorem2.json", { { "experiment", "theorem2" },
                                                   { "config", { { "spec", spec_text(spec) }, { "seeds", seeds } } },
                                                   { "runs", runs },
                                                   { "holds", all_hold } });
        log << "theorem2 verdict: " << (all_hold ? "lhs <= rhs on every run" : "violated") << '\n';
        return all_hold ? exit_ok : exit_failure;
    }
    throw invalid_input{ "unknown bench harness '" + config.harness + "' (expected scaling, theta-sweep or theorem2)" };
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{ "Learning with augmented classes from labeled and unlabeled data", "eulac" };
    app.require_subcommand(1);

    Seed seed = 0;
    std::filesystem::path out_dir = ".";
    std::string loss_name = "square";
    std::optional<double> theta;
    std::vector<double> lambdas;
    std::vector<double> sigma_mults;
    std::size_t folds = 5;
    double theta_threshold = 3.0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    };
    auto add_training = [&](CLI::App *sub) {
        sub->add_option("--loss", loss_name, "square, logistic or double-hinge")->capture_default_str();
        sub->add_option("--lambda", lambdas, "Regularization candidates (comma separated)")->delimiter(',');
        sub->add_option("--sigma-mult", sigma_mults, "Bandwidth multipliers of the median distance (comma separated)")->delimiter(',');
        sub->add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
    };

    GenConfig gen;
    CLI::App *gen_cmd = app.add_subcommand("gen", "Sample labeled, unlabeled and test files from a synthetic spec");
    add_common(gen_cmd);
    gen_cmd->add_option("--spec", gen.spec, "Synthetic spec file (default: bundled 2-D spec)");
    gen_cmd->add_option("--theta", theta, "Override the spec's theta");
    gen_cmd->add_option("--n-labeled", gen.n_labeled)->capture_default_str();
    gen_cmd->add_option("--n-unlabeled", gen.n_unlabeled)->capture_default_str();
    gen_cmd->add_option("--n-test", gen.n_test)->capture_default_str();

    TrainConfig train;
    std::vector<CLI::App *> train_cmds;
    for (const auto &[name, about] : std::vector<std::pair<std::string, std::string>>{
             { "fit", "Estimate theta, cross-validate and fit a model" },
             { "cv", "Cross-validate the hyperparameter grid" },
             { "theta", "Estimate the known-class share of the unlabeled data" } }) {
        CLI::App *sub = app.add_subcommand(name, about);
        add_common(sub);
        sub->add_option("--labeled", train.labeled, "Labeled LIBSVM file")->required();
        sub->add_option("--unlabeled", train.unlabeled, "Unlabeled CSV file")->required();
        sub->add_option("--theta", theta, "Known theta; skips estimation");
        sub->add_option("--theta-threshold", theta_threshold, "Slope threshold constant of the theta estimator")->capture_default_str();
        if (name != "theta") {
            add_training(sub);
        }
        train_cmds.push_back(sub);
    }

    EvalConfig eval;
    CLI::App *eval_cmd = app.add_subcommand("eval", "Score a model on a labeled test file (label 0 = new class)");
    eval_cmd->add_option("--model", eval.model)->required();
    eval_cmd->add_option("--test", eval.test)->required();
    eval_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

    BenchConfig bench;
    CLI::App *bench_cmd = app.add_subcommand("bench", "Run an experiment harness");
    add_common(bench_cmd);
    add_training(bench_cmd);
    bench_cmd->add_option("harness", bench.harness, "scaling, theta-sweep or theorem2")->required()->check(CLI::IsMember({ "scaling", "theta-sweep", "theorem2" }));
    bench_cmd->add_option("--spec", bench.spec, "Synthetic spec file (default: bundled 2-D spec)");
    bench_cmd->add_option("--runs", bench.runs, "Number of seeds, counting up from --seed")->capture_default_str();
    bench_cmd->add_flag("--baseline", bench.with_baseline, "Also score the OVR-reject baseline");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }

    try {
        const LossKind loss = parse_loss(loss_name);
        if (gen_cmd->parsed()) {
            gen.seed = seed;
            gen.out = out_dir;
            gen.theta = theta;
            return cmd_gen(gen, out);
        }
        for (CLI::App *sub : train_cmds) {
            if (!sub->parsed()) {
                continue;
            }
            train.seed = seed;
            train.out = out_dir;
            train.theta = theta;
            train.theta_threshold = theta_threshold;
            train.loss = loss;
            train.lambdas = lambdas;
            train.sigma_mults = sigma_mults;
            train.folds = folds;
            if (sub->get_name() == "fit") {
                return cmd_fit(train, out);
            }
            if (sub->get_name() == "cv") {
                return cmd_cv(train, out);
            }
            return cmd_theta(train, out);
        }
        if (eval_cmd->parsed()) {
            eval.out = out_dir;
            return cmd_eval(eval, out);
        }
        bench.seed = seed;
        bench.out = out_dir;
        bench.loss = loss;
        bench.lambdas = lambdas;
        bench.sigma_mults = sigma_mults;
        bench.folds = folds;
        return cmd_bench(bench, out);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace eulac::cli
