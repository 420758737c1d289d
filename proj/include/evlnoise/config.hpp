#pragma once

#include <string>
#include <string_view>

#include "evlnoise/experiments.hpp"

namespace evlnoise {

/// A parsed experiment file together with the exact text it came from.
struct ConfigFile {
  ExperimentConfig config;
  std::string output_dir = "out";
  std::string text;
};

/// Parses the key = value format documented in the README. Unknown sections
/// or keys, malformed values and failed validation all raise ConfigError.
ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::string& path);

}  // namespace evlnoise
