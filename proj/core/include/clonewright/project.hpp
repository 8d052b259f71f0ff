#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clonewright/ast.hpp"
#include "clonewright/bindings.hpp"
#include "clonewright/lexer.hpp"
#include "clonewright/normalize.hpp"

namespace clonewright {

struct SourceFile {
  std::string path;
  std::string text;
};

/// Everything derived from one source file. Immutable once built, shared
/// between project snapshots and the incremental cache.
struct ParsedFile {
  std::string path;
  std::string text;
  std::string digest;
  std::vector<Token> tokens;
  ModuleAst ast;
  BindingInfo bindings;
  NormalizedFile norm;

  /// Number of tokens inside [begin_offset, end_offset).
  std::size_t token_count(std::size_t begin_offset,
                          std::size_t end_offset) const;
};

struct FileError {
  std::string path;
  std::string message;
  std::optional<Span> span;
};

/// Content digest used for cache validation (FNV-1a 64, hex).
std::string content_digest(std::string_view bytes);

/// Parses and annotates one file. Throws MelError on lexical, syntax or
/// binding errors.
std::shared_ptr<const ParsedFile> parse_file(const SourceFile &src, FileId id);

/// Completes a file from already parsed tokens and AST (binding analysis
/// and normalization only).
std::shared_ptr<const ParsedFile> assemble_file(std::string path,
                                                std::string text,
                                                std::vector<Token> tokens,
                                                ModuleAst ast);

struct Project {
  std::vector<std::shared_ptr<const ParsedFile>> files;
  std::vector<FileError> errors;

  const ParsedFile &file(FileId id) const { return *files.at(id); }
  std::optional<FileId> find_path(std::string_view path) const;
  std::optional<FileId> find_module(std::string_view module) const;
};

/// Builds a project; files that fail to parse are reported in `errors` and
/// left out. File ids follow the order of `sources`.
Project build_project(const std::vector<SourceFile> &sources);

/// Expands directories to their `*.mel` files (recursively, sorted) and
/// reads every file. Unreadable paths are reported through `errors`.
std::vector<SourceFile> read_sources(const std::vector<std::string> &paths,
                                     std::vector<FileError> *errors = nullptr);

/// A run of consecutive top-level expressions in one function clause body.
struct SiteRef {
  FileId file = 0;
  std::uint32_t function = 0;
  std::uint32_t clause = 0;
  std::uint32_t start = 0;
  std::uint32_t length = 0;

  std::uint32_t end() const { return start + length; }
  bool same_body(const SiteRef &o) const {
    return file == o.file && function == o.function && clause == o.clause;
  }
  bool overlaps(const SiteRef &o) const {
    return same_body(o) && start < o.end() && o.start < end();
  }
  bool contains(const SiteRef &o) const {
    return same_body(o) && start <= o.start && o.end() <= end();
  }
  friend bool operator==(const SiteRef &, const SiteRef &) = default;
  friend auto operator<=>(const SiteRef &, const SiteRef &) = default;
};

const Expr &site_clause(const Project &p, const SiteRef &s);
std::span<const Expr> site_body(const Project &p, const SiteRef &s);
Span site_span(const Project &p, const SiteRef &s);
std::size_t site_tokens(const Project &p, const SiteRef &s);
/// Source lines intersecting the site.
std::size_t site_loc(const Project &p, const SiteRef &s);
std::string site_location(const Project &p, const SiteRef &s);

/// Resolved callee of a call node, used to compare calls across modules.
struct CallTarget {
  std::string module;
  std::string name;
  std::size_t arity = 0;
  friend bool operator==(const CallTarget &, const CallTarget &) = default;
};

/// Local calls to functions defined in `module` resolve to it; other local
/// calls resolve to builtins in `erlang`.
CallTarget resolve_call(const ModuleAst &module, const Expr &call);

} // namespace clonewright
