#pragma once

#include "ldp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ldp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads a chain spec from a JSON config. Unknown keys are errors.
/// Recognized keys: model ("symmetric_walk" | "curie_weiss"), dimension,
/// beta, field_amplitude, field_frequency, epsilon, horizon, phi0.
ChainSpec load_model_config(const std::string& path,
                            std::optional<double> epsilon_override = std::nullopt);

ChainSpec load_model_config_text(const std::string& json_text,
                                 std::optional<double> epsilon_override = std::nullopt);

/// FNV-1a hash of the raw config bytes, for provenance headers.
std::uint64_t file_hash(const std::string& path);

} // namespace ldp
