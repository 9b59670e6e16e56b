#include "eulac/data/config.hpp"

#include "eulac/data/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace eulac {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string &text, const std::string &source, const std::size_t line) {
    std::vector<double> out;
    std::istringstream in{ text };
    std::string token;
    while (in >> token) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
            throw parse_error{ source, line, "expected a number, got '" + token + "'" };
        }
        out.push_back(value);
    }
    return out;
}

double parse_number(const KeyValueEntry &e, const std::string &source) {
    const auto values = parse_numbers(e.value, source, e.line);
    if (values.size() != 1) {
        throw parse_error{ source, e.line, "key '" + e.key + "' expects a single number" };
    }
    return values.front();
}

GaussianComponent parse_component(const KeyValueEntry &e, const int dimension, const std::string &source) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in{ e.value };
    while (std::getline(in, part, ';')) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw parse_error{ source, e.line, "component expects 'weight ; mean ; covariance'" };
    }
    const auto weight = parse_numbers(parts[0], source, e.line);
    const auto mean = parse_numbers(parts[1], source, e.line);
    const auto cov = parse_numbers(parts[2], source, e.line);
    const auto d = static_cast<std::size_t>(dimension);
    if (weight.size() != 1 || mean.size() != d || cov.size() != d * d) {
        throw parse_error{ source, e.line, "component shape does not match dimension " + std::to_string(dimension) };
    }
    GaussianComponent c;
    c.weight = weight.front();
    c.mean = Eigen::Map<const Vector>(mean.data(), dimension);
    c.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(cov.data(), dimension, dimension);
    return c;
}

std::string join(const Eigen::Ref<const Vector> &v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += format_double(v[i]);
    }
    return out;
}

void write_component(std::ostream &out, const std::string &key, const GaussianComponent &c) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cov = c.covariance;
    out << key << " = " << format_double(c.weight) << " ; " << join(c.mean) << " ; "
        << join(Eigen::Map<const Vector>(cov.data(), cov.size())) << '\n';
}

}  // namespace

std::vector<KeyValueEntry> parse_key_values(std::istream &in, const std::string &source) {
    std::vector<KeyValueEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string text = trim(line);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw parse_error{ source, line_no, "expected 'key = value'" };
        }
        KeyValueEntry e{ trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line_no };
        if (e.key.empty()) {
            throw parse_error{ source, line_no, "empty key" };
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

SyntheticSpec parse_synthetic_spec(std::istream &in, const std::string &source) {
    const auto entries = parse_key_values(in, source);
    SyntheticSpec spec;
    bool have_dimension = false;
    bool have_theta = false;
    // dimension must be known before components are parsed
    for (const auto &e : entries) {
        if (e.key == "dimension") {
            const double d = parse_number(e, source);
            if (d < 1 || d != std::floor(d)) {
                throw parse_error{ source, e.line, "dimension must be a positive integer" };
            }
            spec.dimension = static_cast<int>(d);
            have_dimension = true;
        }
    }
    if (!have_dimension) {
        throw parse_error{ source, 0, "missing 'dimension'" };
    }

    std::map<int, double> priors;
    std::map<int, GaussianMixture> known;
    for (const auto &e : entries) {
        if (e.key == "dimension") {
            continue;
        }
        if (e.key == "theta") {
            spec.theta = parse_number(e, source);
            have_theta = true;
        } else if (e.key == "seed") {
            const double s = parse_number(e, source);
            if (s < 0 || s != std::floor(s)) {
                throw parse_error{ source, e.line, "seed must be a non-negative integer" };
            }
            spec.seed = static_cast<Seed>(s);
        } else if (e.key == "new.component") {
            spec.novel.components.push_back(parse_component(e, spec.dimension, source));
        } else if (e.key.starts_with("class.")) {
            const auto dot = e.key.find('.', 6);
            if (dot == std::string::npos) {
                throw parse_error{ source, e.line, "expected class.<k>.prior or class.<k>.component" };
            }
            int k = 0;
            const std::string index = e.key.substr(6, dot - 6);
            const auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), k);
            if (ec != std::errc{} || ptr != index.data() + index.size() || k < 1) {
                throw parse_error{ source, e.line, "class index must be a positive integer" };
            }
            const std::string field = e.key.substr(dot + 1);
            if (field == "prior") {
                priors[k] = parse_number(e, source);
            } else if (field == "component") {
                known[k].components.push_back(parse_component(e, spec.dimension, source));
            } else {
                throw parse_error{ source, e.line, "unknown class field '" + field + "'" };
            }
        } else {
            throw parse_error{ source, e.line, "unknown key '" + e.key + "'" };
        }
    }
    if (!have_theta) {
        throw parse_error{ source, 0, "missing 'theta'" };
    }
    int expected = 1;
    for (const auto &[k, mixture] : known) {
        if (k != expected++) {
            throw parse_error{ source, 0, "known classes must be numbered 1..K without gaps" };
        }
        if (!priors.contains(k)) {
            throw parse_error{ source, 0, "class " + std::to_string(k) + " has no prior" };
        }
        spec.known.push_back(mixture);
        spec.known_priors.push_back(priors.at(k));
    }
    if (priors.size() != known.size()) {
        throw parse_error{ source, 0, "prior given for a class without components" };
    }
    spec.validate();
    return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ "cannot open '" + path.string() + "' for reading" };
    }
    return parse_synthetic_spec(in, path.string());
}

void write_synthetic_spec(std::ostream &out, const SyntheticSpec &spec) {
    out << "dimension = " << spec.dimension << '\n';
    out << "theta = " << format_double(spec.theta) << '\n';
    out << "seed = " << spec.seed << '\n';
    for (std::size_t k = 0; k < spec.known.size(); ++k) {
        const std::string prefix = "class." + std::to_string(k + 1);
        out << prefix << ".prior = " << format_double(spec.known_priors[k]) << '\n';
        for (const auto &c : spec.known[k].components) {
            write_component(out, prefix + ".component", c);
        }
    }
    for (const auto &c : spec.novel.components) {
        write_component(out, "new.component", c);
    }
}

ClassConfiguration parse_class_configuration(std::istream &in, const std::string &source) {
    ClassConfiguration config;
    auto to_ints = [&](const KeyValueEntry &e) {
        std::vector<int> out;
        for (const double v : parse_numbers(e.value, source, e.line)) {
            if (v != std::floor(v)) {
                throw parse_error{ source, e.line, "class ids must be integers" };
            }
            out.push_back(static_cast<int>(v));
        }
        return out;
    };
    for (const auto &e : parse_key_values(in, source)) {
        if (e.key == "known") {
            config.known_labels = to_ints(e);
        } else if (e.key == "new") {
            config.new_labels = to_ints(e);
        } else if (e.key == "seed") {
            config.seed = static_cast<Seed>(parse_number(e, source));
        } else {
            throw parse_error{ source, e.line, "unknown key '" + e.key + "'" };
        }
    }
    return config;
}

ClassConfiguration load_class_configuration(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ "cannot open '" + path.string() + "' for reading" };
    }
    return parse_class_configuration(in, path.string());
}

}  // namespace eulac
