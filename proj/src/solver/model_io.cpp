#include "eulac/solver.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace eulac {

namespace {

constexpr const char *model_magic = "eulac-model";
constexpr int model_version = 1;

std::string hex(const double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%a", value);
    return buffer;
}

class LineReader {
  public:
    LineReader(std::istream &in, std::string source) : in_{ in }, source_{ std::move(source) } {}

    std::istringstream next() {
        std::string line;
        if (!std::getline(in_, line)) {
            throw parse_error{ source_, line_, "unexpected end of model file" };
        }
        ++line_;
        return std::istringstream{ line };
    }

    /// Reads `key <rest>` and checks the key.
    std::istringstream expect(const std::string &key) {
        auto line = next();
        std::string word;
        line >> word;
        if (word != key) {
            fail("expected '" + key + "', got '" + word + "'");
        }
        return line;
    }

    double read_double(std::istream &line) {
        std::string token;
        if (!(line >> token)) {
            fail("missing number");
        }
        char *end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            fail("malformed number '" + token + "'");
        }
        return value;
    }

    template <typename T>
    T read_integer(std::istream &line) {
        long long value = 0;
        if (!(line >> value)) {
            fail("missing integer");
        }
        return static_cast<T>(value);
    }

    [[noreturn]] void fail(const std::string &what) const { throw parse_error{ source_, line_, what }; }

  private:
    std::istream &in_;
    std::string source_;
    std::size_t line_ = 0;
};

}  // namespace

void save_model(std::ostream &out, const DualModel &model) {
    model.validate();
    out << model_magic << ' ' << model_version << '\n';
    out << "loss " << to_string(model.loss) << '\n';
    out << "sigma " << hex(model.kernel.sigma) << '\n';
    out << "theta " << hex(model.theta) << '\n';
    out << "lambda " << hex(model.lambda) << '\n';
    out << "labels";
    for (const int label : model.original_labels) {
        out << ' ' << label;
    }
    out << '\n';
    out << "support " << model.support.rows() << ' ' << model.support.cols() << ' ' << model.n_labeled << '\n';
    for (Eigen::Index i = 0; i < model.support.rows(); ++i) {
        for (Eigen::Index j = 0; j < model.support.cols(); ++j) {
            out << (j > 0 ? " " : "") << hex(model.support(i, j));
        }
        out << '\n';
    }
    out << "alpha " << model.alpha.rows() << ' ' << model.alpha.cols() << '\n';
    for (Eigen::Index i = 0; i < model.alpha.rows(); ++i) {
        for (Eigen::Index j = 0; j < model.alpha.cols(); ++j) {
            out << (j > 0 ? " " : "") << hex(model.alpha(i, j));
        }
        out << '\n';
    }
    out << "end\n";
}

void save_model(const std::filesystem::path &path, const DualModel &model) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ "cannot open '" + path.string() + "' for writing" };
    }
    save_model(out, model);
}

DualModel load_model(std::istream &in, const std::string &source) {
    LineReader reader{ in, source };
    DualModel model;
    {
        auto line = reader.expect(model_magic);
        if (reader.read_integer<int>(line) != model_version) {
            reader.fail("unsupported model version");
        }
    }
    {
        auto line = reader.expect("loss");
        std::string name;
        line >> name;
        model.loss = parse_loss(name);
    }
    {
        auto line = reader.expect("sigma");
        model.kernel.sigma = reader.read_double(line);
    }
    {
        auto line = reader.expect("theta");
        model.theta = reader.read_double(line);
    }
    {
        auto line = reader.expect("lambda");
        model.lambda = reader.read_double(line);
    }
    {
        auto line = reader.expect("labels");
        int label = 0;
        while (line >> label) {
            model.original_labels.push_back(label);
        }
    }
    {
        auto line = reader.expect("support");
        const auto rows = reader.read_integer<Eigen::Index>(line);
        const auto cols = reader.read_integer<Eigen::Index>(line);
        model.n_labeled = reader.read_integer<std::size_t>(line);
        if (rows < 1 || cols < 1) {
            reader.fail("invalid support shape");
        }
        model.support.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            auto row = reader.next();
            for (Eigen::Index j = 0; j < cols; ++j) {
                model.support(i, j) = reader.read_double(row);
            }
        }
    }
    {
        auto line = reader.expect("alpha");
        const auto rows = reader.read_integer<Eigen::Index>(line);
        const auto cols = reader.read_integer<Eigen::Index>(line);
        if (rows != model.support.rows() || cols < 2) {
            reader.fail("invalid alpha shape");
        }
        model.alpha.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            auto row = reader.next();
            for (Eigen::Index j = 0; j < cols; ++j) {
                model.alpha(i, j) = reader.read_double(row);
            }
        }
    }
    reader.expect("end");
    model.validate();
    return model;
}

DualModel load_model(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ "cannot open '" + path.string() + "' for reading" };
    }
    return load_model(in, path.string());
}

}  // namespace eulac
