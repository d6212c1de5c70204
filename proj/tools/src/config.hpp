#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "surropt/pipeline.hpp"

namespace surropt::cli {

inline constexpr int kConfigSchemaVersion = 1;

/// Line numbers (1-based) of every value in a JSON text, keyed by JSON pointer.
std::map<std::string, int> json_value_lines(std::string_view text);

/// Parses a config document. Errors are ConfigError with "line N: field: ..." text.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Effective config with every default spelled out. Keys are sorted, so the
/// dump is canonical.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical effective-config dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace surropt::cli
