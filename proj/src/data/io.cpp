#include "eulac/data/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace eulac {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(s.substr(start, pos - start));
        }
    }
    return tokens;
}

bool parse_double(std::string_view token, double &value) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc{} && ptr == token.data() + token.size() && std::isfinite(value);
}

bool parse_int(std::string_view token, long long &value) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc{} && ptr == token.data() + token.size()) {
        return true;
    }
    // integral values written as reals, e.g. "3.0"
    double real = 0.0;
    if (parse_double(token, real) && real == std::floor(real) && std::abs(real) < 1e15) {
        value = static_cast<long long>(real);
        return true;
    }
    return false;
}

int parse_label(std::string_view token, const std::string &source, std::size_t line) {
    long long label = 0;
    if (!parse_int(token, label) || label < std::numeric_limits<int>::min() || label > std::numeric_limits<int>::max()) {
        throw parse_error{ source, line, "non-numeric or non-integer label '" + std::string{ token } + "'" };
    }
    return static_cast<int>(label);
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ "cannot open '" + path.string() + "' for reading" };
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ "cannot open '" + path.string() + "' for writing" };
    }
    return out;
}

struct CsvTable {
    std::vector<std::vector<double>> rows;
};

CsvTable parse_csv_table(std::istream &in, const std::string &source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) {
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = text.find(',', start);
            const std::string_view cell = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            double value = 0.0;
            if (!parse_double(cell, value)) {
                throw parse_error{ source, line_no, "row " + std::to_string(line_no) + ": non-numeric cell '" + std::string{ cell } + "'" };
            }
            row.push_back(value);
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw parse_error{ source, line_no, "ragged row: expected " + std::to_string(width) + " cells, got " + std::to_string(row.size()) };
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) {
        throw parse_error{ source, line_no, "empty CSV input" };
    }
    return table;
}

}  // namespace

RawLabeledData parse_libsvm(std::istream &in, const std::string &source, const Eigen::Index min_dimension) {
    struct Entry {
        std::size_t row;
        long long index;
        double value;
    };
    std::vector<Entry> entries;
    std::vector<int> labels;
    long long dimension = min_dimension;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = trim(line);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) {
            text = trim(text.substr(0, hash));
        }
        if (text.empty()) {
            continue;
        }
        const auto tokens = split_whitespace(text);
        const int label = parse_label(tokens.front(), source, line_no);
        long long previous = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto colon = tokens[t].find(':');
            if (colon == std::string_view::npos) {
                throw parse_error{ source, line_no, "expected index:value, got '" + std::string{ tokens[t] } + "'" };
            }
            long long index = 0;
            double value = 0.0;
            if (!parse_int(tokens[t].substr(0, colon), index) || !parse_double(tokens[t].substr(colon + 1), value)) {
                throw parse_error{ source, line_no, "non-numeric token '" + std::string{ tokens[t] } + "'" };
            }
            if (index < 1) {
                throw parse_error{ source, line_no, "feature indices are 1-based, got " + std::to_string(index) };
            }
            if (index <= previous) {
                throw parse_error{ source, line_no, "feature indices must be strictly increasing" };
            }
            previous = index;
            dimension = std::max(dimension, index);
            entries.push_back({ labels.size(), index, value });
        }
        labels.push_back(label);
    }
    if (labels.empty()) {
        throw parse_error{ source, line_no, "empty LIBSVM input" };
    }

    RawLabeledData out;
    out.features = FeatureMatrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(std::max<long long>(dimension, 1)));
    for (const Entry &e : entries) {
        out.features(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.index - 1)) = e.value;
    }
    out.labels = std::move(labels);
    return out;
}

RawLabeledData read_libsvm(const std::filesystem::path &path, const Eigen::Index min_dimension) {
    auto in = open_input(path);
    return parse_libsvm(in, path.string(), min_dimension);
}

LabeledDataset load_libsvm(const std::filesystem::path &path) {
    RawLabeledData raw = read_libsvm(path);
    return remap_labels(std::move(raw.features), raw.labels);
}

RawLabeledData parse_csv(std::istream &in, const std::string &source, const std::size_t label_column) {
    const CsvTable table = parse_csv_table(in, source);
    const std::size_t width = table.rows.front().size();
    if (label_column >= width) {
        throw invalid_input{ source + ": label column " + std::to_string(label_column) + " out of range for " + std::to_string(width) + " columns" };
    }
    if (width < 2) {
        throw invalid_input{ source + ": CSV needs a label column and at least one feature column" };
    }
    RawLabeledData out;
    out.features.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width - 1));
    out.labels.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        const double label = row[label_column];
        if (label != std::floor(label)) {
            throw parse_error{ source, r + 1, "label cell is not an integer" };
        }
        out.labels.push_back(static_cast<int>(label));
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (j != label_column) {
                out.features(static_cast<Eigen::Index>(r), c++) = row[j];
            }
        }
    }
    return out;
}

LabeledDataset load_csv(const std::filesystem::path &path, const std::size_t label_column) {
    auto in = open_input(path);
    RawLabeledData raw = parse_csv(in, path.string(), label_column);
    return remap_labels(std::move(raw.features), raw.labels);
}

UnlabeledDataset parse_csv_features(std::istream &in, const std::string &source) {
    const CsvTable table = parse_csv_table(in, source);
    UnlabeledDataset out;
    out.features.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.rows.front().size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t j = 0; j < table.rows[r].size(); ++j) {
            out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = table.rows[r][j];
        }
    }
    return out;
}

UnlabeledDataset load_csv_features(const std::filesystem::path &path) {
    auto in = open_input(path);
    return parse_csv_features(in, path.string());
}

std::string format_double(const double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

void write_libsvm(std::ostream &out, const LabeledDataset &data, const int new_class_token) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Label y = data.labels[i];
        const int written = y == data.new_class() ? new_class_token : data.original_labels.at(static_cast<std::size_t>(y - 1));
        out << written;
        const auto row = data.features.row(static_cast<Eigen::Index>(i));
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            if (row[j] != 0.0) {
                out << ' ' << (j + 1) << ':' << format_double(row[j]);
            }
        }
        out << '\n';
    }
}

void write_libsvm(const std::filesystem::path &path, const LabeledDataset &data, const int new_class_token) {
    auto out = open_output(path);
    write_libsvm(out, data, new_class_token);
}

void write_csv(std::ostream &out, const LabeledDataset &data, const std::size_t label_column) {
    const auto width = static_cast<std::size_t>(data.dimension()) + 1;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Eigen::Index feature = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (j > 0) {
                out << ',';
            }
            if (j == label_column) {
                out << data.original_labels.at(static_cast<std::size_t>(data.labels[i] - 1));
            } else {
                out << format_double(data.features(static_cast<Eigen::Index>(i), feature++));
            }
        }
        out << '\n';
    }
}

void write_csv_features(std::ostream &out, const UnlabeledDataset &data) {
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(data.features(i, j));
        }
        out << '\n';
    }
}

void write_csv_features(const std::filesystem::path &path, const UnlabeledDataset &data) {
    auto out = open_output(path);
    write_csv_features(out, data);
}

}  // namespace eulac
