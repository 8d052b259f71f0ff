#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clonewright/project.hpp"

#ifndef CLONEWRIGHT_TEST_DATA
#error "CLONEWRIGHT_TEST_DATA must point at tests/data"
#endif

namespace clonewright::testing {

inline std::filesystem::path data_path(const std::string &rel) {
  return std::filesystem::path(CLONEWRIGHT_TEST_DATA) / rel;
}

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path &p, const std::string &text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Loads a corpus directory with paths relative to it (`pingpong.mel`).
inline std::vector<SourceFile> load_corpus(const std::string &name) {
  auto dir = data_path(name);
  std::vector<SourceFile> out;
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".mel")
      out.push_back({std::filesystem::relative(e.path(), dir).string(),
                     read_file(e.path())});
  std::sort(out.begin(), out.end(),
            [](const SourceFile &a, const SourceFile &b) { return a.path < b.path; });
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("clonewright-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &rel) const { return path_ / rel; }

  void populate(const std::vector<SourceFile> &files) const {
    for (const auto &f : files)
      write_file(path_ / f.path, f.text);
  }

private:
  std::filesystem::path path_;
};

/// Runs of whitespace collapse to one space; leading/trailing space dropped.
inline std::string squash(const std::string &s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space)
      out += ' ';
    space = false;
    out += c;
  }
  return out;
}

} // namespace clonewright::testing
