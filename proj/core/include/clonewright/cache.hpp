#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonewright/detector.hpp"
#include "clonewright/project.hpp"

namespace clonewright {

/// Incremental detection state: parsed files by content digest plus pair
/// and class verification results keyed by the digests they depend on.
class CloneCache {
public:
  static constexpr std::string_view kFormat = "clonewright-cache/1";

  /// Returns the parsed file for `src`, parsing only on a digest miss.
  /// Throws MelError when the file does not parse.
  std::shared_ptr<const ParsedFile> parsed(const SourceFile &src, FileId id);

  /// build_project() through the file layer.
  Project build(const std::vector<SourceFile> &sources);

  std::optional<PairStats> pair(const std::string &key);
  void store_pair(const std::string &key, const PairStats &stats);

  /// Outer optional: cache hit; inner: the anti-unification outcome.
  std::optional<std::optional<AuResult>> group(const std::string &key);
  void store_group(const std::string &key, const std::optional<AuResult> &r);

  /// Drops entries that depend on files not in `p`.
  void prune(const Project &p);

  void save(const std::filesystem::path &path) const;
  /// Loads a cache file. A missing file leaves the cache empty and returns
  /// true; an unreadable, corrupt or foreign-format file is discarded with a
  /// warning and returns false.
  bool load(const std::filesystem::path &path, std::string *warning = nullptr);

  struct Stats {
    std::size_t parses = 0;
    std::size_t file_hits = 0;
    std::size_t pair_hits = 0;
    std::size_t pair_misses = 0;
    std::size_t group_hits = 0;
    std::size_t group_misses = 0;
  };
  const Stats &stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  std::size_t file_entries() const { return files_.size(); }
  std::size_t pair_entries() const { return pairs_.size(); }

private:
  std::map<std::string, std::shared_ptr<const ParsedFile>> files_; // digest
  std::map<std::string, PairStats> pairs_;
  std::map<std::string, std::optional<AuResult>> groups_;
  Stats stats_;
};

/// Cache key of a site: content digest of its file plus its coordinates.
std::string site_key(const Project &p, const SiteRef &s);

/// Default cache location for a project root.
std::filesystem::path default_cache_path(const std::filesystem::path &root);

} // namespace clonewright
