#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eulac {

/// Dense row-major feature storage: one sample per row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Internal class labels are contiguous 1..K; the augmented (new) class is K+1.
using Label = int;

[[nodiscard]] constexpr Label new_class_label(int num_known) noexcept { return num_known + 1; }

using Seed = std::uint64_t;

/// Base class for every error raised by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class invalid_input : public error {
  public:
    using error::error;
};

/// A text input (LIBSVM, CSV, config, model file) could not be parsed.
class parse_error : public error {
  public:
    parse_error(const std::string &source, std::size_t line, const std::string &what)
        : error(source + ":" + std::to_string(line) + ": " + what), line_{line} {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// The optimizer could not produce a usable solution.
class solver_error : public error {
  public:
    using error::error;
};

}  // namespace eulac
