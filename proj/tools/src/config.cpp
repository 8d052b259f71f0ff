#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace clonewright::tools {

namespace {

std::string trim(std::string s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return s;
}

template <typename T> bool parse_number(const std::string &s, T &out) {
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(s, &used));
      return used == s.size();
    } catch (const std::exception &) {
      return false;
    }
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  }
}

} // namespace

Config parse_config(const std::string &text, std::vector<std::string> &warnings) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty() || trim(line).front() == '[')
      continue;
    auto eq = line.find('=');
    std::string where = std::string(kConfigFile) + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      warnings.push_back(where + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    for (auto &ch : key)
      if (ch == '-')
        ch = '_';
    bool ok = true;
    if (key == "min_len")
      ok = parse_number(value, c.thresholds.min_len);
    else if (key == "min_toks")
      ok = parse_number(value, c.thresholds.min_toks);
    else if (key == "min_freq")
      ok = parse_number(value, c.thresholds.min_freq);
    else if (key == "max_new_params")
      ok = parse_number(value, c.thresholds.max_new_params);
    else if (key == "sim")
      ok = parse_number(value, c.thresholds.min_similarity);
    else if (key == "port")
      ok = parse_number(value, c.port);
    else {
      warnings.push_back(where + ": unknown key " + key);
      continue;
    }
    if (!ok)
      warnings.push_back(where + ": bad value for " + key + ": " + value);
  }
  return c;
}

Config load_config(const std::filesystem::path &dir,
                   std::vector<std::string> &warnings) {
  std::ifstream in(dir / kConfigFile);
  if (!in)
    return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), warnings);
}

int resolve_port(const Config &config, std::optional<int> flag) {
  if (flag)
    return *flag;
  if (const char *env = std::getenv(kPortVariable)) {
    int port = 0;
    std::string s(env);
    if (parse_number(s, port) && port > 0 && port < 65536)
      return port;
  }
  return config.port;
}

} // namespace clonewright::tools
