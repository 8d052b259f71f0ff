#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clonewright/detector.hpp"

namespace clonewright::tools {

inline constexpr const char *kConfigFile = ".clonewright.toml";
inline constexpr const char *kPortVariable = "CLONEWRIGHT_PORT";
inline constexpr int kDefaultPort = 8470;

struct Config {
  Thresholds thresholds;
  int port = kDefaultPort;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and bad
/// values are reported in `warnings` and otherwise ignored.
Config parse_config(const std::string &text, std::vector<std::string> &warnings);

/// Reads `.clonewright.toml` from `dir` when present.
Config load_config(const std::filesystem::path &dir,
                   std::vector<std::string> &warnings);

/// Command-line flag, then the environment variable, then the config file.
int resolve_port(const Config &config, std::optional<int> flag);

} // namespace clonewright::tools
