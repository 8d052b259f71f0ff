#include "clonewright/project.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "clonewright/parser.hpp"

namespace clonewright {

std::size_t ParsedFile::token_count(std::size_t begin_offset,
                                    std::size_t end_offset) const {
  auto lo = std::lower_bound(tokens.begin(), tokens.end(), begin_offset,
                             [](const Token &t, std::size_t off) {
                               return t.span.begin_offset < off;
                             });
  auto hi = std::lower_bound(lo, tokens.end(), end_offset,
                             [](const Token &t, std::size_t off) {
                               return t.span.begin_offset < off;
                             });
  return static_cast<std::size_t>(hi - lo);
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const ParsedFile> parse_file(const SourceFile &src, FileId id) {
  auto tokens = tokenize(src.text, id);
  auto ast = parse(tokens, id);
  return assemble_file(src.path, src.text, std::move(tokens), std::move(ast));
}

std::shared_ptr<const ParsedFile> assemble_file(std::string path,
                                                std::string text,
                                                std::vector<Token> tokens,
                                                ModuleAst ast) {
  auto pf = std::make_shared<ParsedFile>();
  pf->path = std::move(path);
  pf->text = std::move(text);
  pf->digest = content_digest(pf->text);
  pf->tokens = std::move(tokens);
  pf->ast = std::move(ast);
  pf->bindings = annotate_bindings(pf->ast);
  if (!pf->bindings.ok()) {
    const auto &e = pf->bindings.errors.front();
    throw MelError(e.message, e.span);
  }
  pf->norm = normalize(pf->tokens, pf->ast);
  return pf;
}

std::optional<FileId> Project::find_path(std::string_view path) const {
  for (FileId i = 0; i < files.size(); ++i)
    if (files[i]->path == path)
      return i;
  return std::nullopt;
}

std::optional<FileId> Project::find_module(std::string_view module) const {
  for (FileId i = 0; i < files.size(); ++i)
    if (files[i]->ast.name == module)
      return i;
  return std::nullopt;
}

Project build_project(const std::vector<SourceFile> &sources) {
  Project p;
  for (const auto &src : sources) {
    try {
      p.files.push_back(parse_file(src, static_cast<FileId>(p.files.size())));
    } catch (const MelError &e) {
      p.errors.push_back({src.path, e.what(), e.span()});
    }
  }
  return p;
}

std::vector<SourceFile> read_sources(const std::vector<std::string> &paths,
                                     std::vector<FileError> *errors) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto &p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<std::string> found;
      for (auto it = fs::recursive_directory_iterator(p, ec);
           it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec)
          break;
        if (it->is_regular_file() && it->path().extension() == ".mel")
          found.push_back(it->path().lexically_normal().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<SourceFile> out;
  for (const auto &f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) {
      if (errors)
        errors->push_back({f, "cannot read file", std::nullopt});
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back({f, ss.str()});
  }
  return out;
}

const Expr &site_clause(const Project &p, const SiteRef &s) {
  return p.file(s.file).ast.functions.at(s.function).clauses.at(s.clause);
}

std::span<const Expr> site_body(const Project &p, const SiteRef &s) {
  return site_clause(p, s).body().subspan(s.start, s.length);
}

Span site_span(const Project &p, const SiteRef &s) {
  auto body = site_body(p, s);
  const Span &a = body.front().span;
  const Span &b = body.back().span;
  return Span{a.file, a.begin, b.end, a.begin_offset, b.end_offset};
}

std::size_t site_tokens(const Project &p, const SiteRef &s) {
  const ParsedFile &f = p.file(s.file);
  std::size_t n = 0;
  for (const Expr &e : site_body(p, s))
    n += f.token_count(e.span.begin_offset, e.span.end_offset);
  return n;
}

std::size_t site_loc(const Project &p, const SiteRef &s) {
  Span sp = site_span(p, s);
  return static_cast<std::size_t>(sp.end.line - sp.begin.line + 1);
}

std::string site_location(const Project &p, const SiteRef &s) {
  return p.file(s.file).path + ":" + format_span(site_span(p, s));
}

CallTarget resolve_call(const ModuleAst &module, const Expr &call) {
  std::size_t arity = call.args().size();
  if (call.kind == ExprKind::RemoteCall)
    return {call.module, call.text, arity};
  if (module.find(call.text, arity))
    return {module.name, call.text, arity};
  return {"erlang", call.text, arity};
}

} // namespace clonewright
