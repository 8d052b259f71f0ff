#include "clonewright/cache.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "serial.hpp"

namespace clonewright {

using serial::json;

namespace {

std::string file_key(const std::string &digest, const std::string &path) {
  return digest + "@" + path;
}

// Every digest a pair or group key depends on.
std::vector<std::string> key_digests(const std::string &key) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    std::size_t bar = key.find('|', pos);
    std::string part =
        key.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    out.push_back(part.substr(0, part.find('#')));
    if (bar == std::string::npos)
      break;
    pos = bar + 1;
  }
  return out;
}

} // namespace

std::string site_key(const Project &p, const SiteRef &s) {
  return p.file(s.file).digest + "#" + std::to_string(s.function) + "." +
         std::to_string(s.clause) + "." + std::to_string(s.start) + "." +
         std::to_string(s.length);
}

std::filesystem::path default_cache_path(const std::filesystem::path &root) {
  return root / ".clonewright" / "cache";
}

std::shared_ptr<const ParsedFile> CloneCache::parsed(const SourceFile &src,
                                                     FileId id) {
  std::string key = file_key(content_digest(src.text), src.path);
  auto it = files_.find(key);
  if (it != files_.end()) {
    ++stats_.file_hits;
    const ParsedFile &f = *it->second;
    if (f.ast.file == id)
      return it->second;
    auto tokens = f.tokens;
    auto ast = f.ast;
    serial::restamp(tokens, ast, id);
    auto moved = assemble_file(f.path, f.text, std::move(tokens), std::move(ast));
    it->second = moved;
    return moved;
  }
  ++stats_.parses;
  auto pf = parse_file(src, id);
  files_[key] = pf;
  return pf;
}

Project CloneCache::build(const std::vector<SourceFile> &sources) {
  Project p;
  for (const auto &src : sources) {
    try {
      p.files.push_back(parsed(src, static_cast<FileId>(p.files.size())));
    } catch (const MelError &e) {
      p.errors.push_back({src.path, e.what(), e.span()});
    }
  }
  return p;
}

std::optional<PairStats> CloneCache::pair(const std::string &key) {
  auto it = pairs_.find(key);
  if (it == pairs_.end()) {
    ++stats_.pair_misses;
    return std::nullopt;
  }
  ++stats_.pair_hits;
  return it->second;
}

void CloneCache::store_pair(const std::string &key, const PairStats &stats) {
  pairs_[key] = stats;
}

std::optional<std::optional<AuResult>>
CloneCache::group(const std::string &key) {
  auto it = groups_.find(key);
  if (it == groups_.end()) {
    ++stats_.group_misses;
    return std::nullopt;
  }
  ++stats_.group_hits;
  return it->second;
}

void CloneCache::store_group(const std::string &key,
                             const std::optional<AuResult> &r) {
  groups_[key] = r;
}

void CloneCache::prune(const Project &p) {
  std::set<std::string> live;
  std::set<std::string> live_files;
  for (const auto &f : p.files) {
    live.insert(f->digest);
    live_files.insert(file_key(f->digest, f->path));
  }
  for (auto it = files_.begin(); it != files_.end();)
    it = live_files.count(it->first) ? std::next(it) : files_.erase(it);
  auto stale = [&](const std::string &key) {
    for (const auto &d : key_digests(key))
      if (!live.count(d))
        return true;
    return false;
  };
  for (auto it = pairs_.begin(); it != pairs_.end();)
    it = stale(it->first) ? pairs_.erase(it) : std::next(it);
  for (auto it = groups_.begin(); it != groups_.end();)
    it = stale(it->first) ? groups_.erase(it) : std::next(it);
}

void CloneCache::save(const std::filesystem::path &path) const {
  json files = json::array();
  for (const auto &[key, f] : files_)
    files.push_back(serial::parsed_to_json(*f));
  json pairs = json::object();
  for (const auto &[key, s] : pairs_)
    pairs[key] = json::array({s.unified, s.new_params, s.similarity});
  json groups = json::object();
  for (const auto &[key, r] : groups_)
    groups[key] = r ? serial::au_to_json(*r) : json();
  json doc = {{"format", kFormat},
              {"files", std::move(files)},
              {"pairs", std::move(pairs)},
              {"groups", std::move(groups)}};

  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write cache file " + tmp.string());
    out << doc.dump();
    if (!out)
      throw std::runtime_error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

bool CloneCache::load(const std::filesystem::path &path, std::string *warning) {
  files_.clear();
  pairs_.clear();
  groups_.clear();
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    return true;
  auto fail = [&](const std::string &why) {
    files_.clear();
    pairs_.clear();
    groups_.clear();
    if (warning)
      *warning = "discarding cache " + path.string() + ": " + why;
    return false;
  };
  try {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      return fail("unreadable");
    std::ostringstream ss;
    ss << in.rdbuf();
    json doc = json::parse(ss.str());
    if (!doc.is_object() || doc.value("format", std::string()) != kFormat)
      return fail("unknown format");
    for (const auto &f : doc.at("files")) {
      auto pf = serial::parsed_from_json(f, 0);
      if (!pf->bindings.ok())
        return fail("invalid file entry");
      files_[file_key(pf->digest, pf->path)] = pf;
    }
    for (const auto &[key, v] : doc.at("pairs").items())
      pairs_[key] = {v.at(0).get<bool>(), v.at(1).get<std::size_t>(),
                     v.at(2).get<double>()};
    for (const auto &[key, v] : doc.at("groups").items())
      groups_[key] = v.is_null() ? std::nullopt
                                 : std::optional<AuResult>(serial::au_from_json(v));
  } catch (const std::exception &e) {
    return fail(e.what());
  }
  return true;
}

} // namespace clonewright
