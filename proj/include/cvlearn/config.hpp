#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cvlearn/errors.hpp"

namespace cvlearn {

/// Values in experiment configs: scalars or flat lists.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>,
                                 std::vector<std::string>>;

/// Parsed sectioned key-value file:
///   kind = "sweep"            # top-level keys live in section ""
///   [learn]
///   dist = "heterodyne"
///   T = [250, 1000, 4000]
struct ExperimentConfig {
  std::map<std::string, std::map<std::string, ConfigValue>> sections;

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string text(const std::string& section, const std::string& key) const;
  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  /// Canonical serialization (sorted sections and keys) used for hashing.
  std::string canonical() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Rejects unknown sections/keys for the declared kind.
void validate_config_schema(const ExperimentConfig& cfg);

}  // namespace cvlearn
