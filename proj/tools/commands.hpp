#pragma once

#include "eulac/loss.hpp"
#include "eulac/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eulac::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_warning = 2;

struct GenConfig {
    std::filesystem::path spec;
    std::filesystem::path out = ".";
    Seed seed = 0;
    std::optional<double> theta;  // overrides the spec
    std::size_t n_labeled = 500;
    std::size_t n_unlabeled = 1000;
    std::size_t n_test = 2000;
    int resolution = 400;  // Bayes-risk quadrature cells per axis
};

/// Shared by fit and cv.
struct TrainConfig {
    std::filesystem::path labeled;
    std::filesystem::path unlabeled;
    std::filesystem::path out = ".";
    Seed seed = 0;
    std::optional<double> theta;
    double theta_threshold = 3.0;
    LossKind loss = LossKind::square;
    std::vector<double> lambdas;      // empty: default grid
    std::vector<double> sigma_mults;  // empty: default grid
    std::size_t folds = 5;
};

struct EvalConfig {
    std::filesystem::path model;
    std::filesystem::path test;
    std::filesystem::path out = ".";
};

struct BenchConfig {
    std::string harness;  // scaling | theta-sweep | theorem2
    std::filesystem::path spec;
    std::filesystem::path out = ".";
    Seed seed = 0;
    std::size_t runs = 5;  // seeds seed, seed+1, ...
    LossKind loss = LossKind::square;
    std::vector<double> lambdas;
    std::vector<double> sigma_mults;
    std::size_t folds = 5;
    bool with_baseline = false;
};

/// Each command writes its artifacts under `out`, logs to `log` and returns
/// an exit code. Errors propagate as exceptions.
int cmd_gen(const GenConfig &config, std::ostream &log);
int cmd_fit(const TrainConfig &config, std::ostream &log);
int cmd_cv(const TrainConfig &config, std::ostream &log);
int cmd_theta(const TrainConfig &config, std::ostream &log);
int cmd_eval(const EvalConfig &config, std::ostream &log);
int cmd_bench(const BenchConfig &config, std::ostream &log);

/// Parses argv-style arguments (without the program name), runs the command
/// and maps exceptions to exit code 1 with a message on `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Location of the bundled 2-D spec.
std::filesystem::path default_spec_path();

}  // namespace eulac::cli
