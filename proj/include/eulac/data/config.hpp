#pragma once

#include "eulac/data/sampling.hpp"
#include "eulac/data/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eulac {

/// `key = value` lines; `#` starts a comment; keys may repeat.
struct KeyValueEntry {
    std::string key;
    std::string value;
    std::size_t line;
};
[[nodiscard]] std::vector<KeyValueEntry> parse_key_values(std::istream &in, const std::string &source);

/// Synthetic spec text:
///
///     dimension = 2
///     theta = 0.7
///     seed = 3                       # optional
///     class.1.prior = 0.5
///     class.1.component = 1.0 ; -2 0 ; 1 0 0 1   # weight ; mean ; row-major covariance
///     new.component = 1.0 ; 0 3 ; 1 0 0 1
///
/// Known classes must be numbered 1..K without gaps.
[[nodiscard]] SyntheticSpec parse_synthetic_spec(std::istream &in, const std::string &source);
[[nodiscard]] SyntheticSpec load_synthetic_spec(const std::filesystem::path &path);
void write_synthetic_spec(std::ostream &out, const SyntheticSpec &spec);

/// Class configuration text: `known = 1 2 3`, `new = 4 5`, `seed = 0`.
[[nodiscard]] ClassConfiguration parse_class_configuration(std::istream &in, const std::string &source);
[[nodiscard]] ClassConfiguration load_class_configuration(const std::filesystem::path &path);

}  // namespace eulac
