#pragma once

#include "eulac/data/dataset.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eulac {

/// Features plus the labels exactly as they appear in the file.
struct RawLabeledData {
    FeatureMatrix features;
    std::vector<int> labels;
};

/// Parses `<label> <index>:<value> ...` lines with 1-based strictly increasing
/// indices. The dimension is the largest index seen, or min_dimension if that
/// is larger. Blank lines are skipped.
[[nodiscard]] RawLabeledData parse_libsvm(std::istream &in, const std::string &source, Eigen::Index min_dimension = 0);
[[nodiscard]] RawLabeledData read_libsvm(const std::filesystem::path &path, Eigen::Index min_dimension = 0);

/// LIBSVM file with labels remapped to 1..K.
[[nodiscard]] LabeledDataset load_libsvm(const std::filesystem::path &path);

/// Numeric CSV without header; label_column selects the (integer) label.
[[nodiscard]] RawLabeledData parse_csv(std::istream &in, const std::string &source, std::size_t label_column);
[[nodiscard]] LabeledDataset load_csv(const std::filesystem::path &path, std::size_t label_column);

/// Features-only CSV, used for unlabeled data.
[[nodiscard]] UnlabeledDataset parse_csv_features(std::istream &in, const std::string &source);
[[nodiscard]] UnlabeledDataset load_csv_features(const std::filesystem::path &path);

/// Writes original labels; samples of the augmented class are written with
/// new_class_token. Zero-valued features are omitted. Values use the shortest
/// representation that parses back to the same double.
void write_libsvm(std::ostream &out, const LabeledDataset &data, int new_class_token = 0);
void write_libsvm(const std::filesystem::path &path, const LabeledDataset &data, int new_class_token = 0);

void write_csv(std::ostream &out, const LabeledDataset &data, std::size_t label_column = 0);
void write_csv_features(std::ostream &out, const UnlabeledDataset &data);
void write_csv_features(const std::filesystem::path &path, const UnlabeledDataset &data);

/// Shortest round-trip decimal representation of a double.
[[nodiscard]] std::string format_double(double value);

}  // namespace eulac
