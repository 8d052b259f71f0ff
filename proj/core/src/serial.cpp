#include "serial.hpp"

namespace clonewright::serial {

json span_to_json(const Span &s) {
  return json::array({s.begin.line, s.begin.col, s.end.line, s.end.col,
                      s.begin_offset, s.end_offset});
}

Span span_from_json(const json &j, FileId file) {
  Span s;
  s.file = file;
  s.begin = {j.at(0).get<int>(), j.at(1).get<int>()};
  s.end = {j.at(2).get<int>(), j.at(3).get<int>()};
  s.begin_offset = j.at(4).get<std::size_t>();
  s.end_offset = j.at(5).get<std::size_t>();
  return s;
}

json expr_to_json(const Expr &e) {
  json j = {{"k", static_cast<int>(e.kind)}, {"s", span_to_json(e.span)}};
  if (!e.text.empty())
    j["t"] = e.text;
  if (!e.module.empty())
    j["m"] = e.module;
  if (e.pattern_count)
    j["p"] = e.pattern_count;
  if (!e.children.empty()) {
    json c = json::array();
    for (const auto &ch : e.children)
      c.push_back(expr_to_json(ch));
    j["c"] = std::move(c);
  }
  return j;
}

Expr expr_from_json(const json &j, FileId file) {
  Expr e;
  int kind = j.at("k").get<int>();
  if (kind < 0 || kind > static_cast<int>(ExprKind::Clause))
    throw std::runtime_error("bad expression kind");
  e.kind = static_cast<ExprKind>(kind);
  e.span = span_from_json(j.at("s"), file);
  e.text = j.value("t", std::string());
  e.module = j.value("m", std::string());
  e.pattern_count = j.value("p", std::size_t{0});
  if (auto it = j.find("c"); it != j.end())
    for (const auto &c : *it)
      e.children.push_back(expr_from_json(c, file));
  if (e.pattern_count > e.children.size())
    throw std::runtime_error("bad pattern count");
  return e;
}

json parsed_to_json(const ParsedFile &f) {
  json toks = json::array();
  for (const auto &t : f.tokens)
    toks.push_back({static_cast<int>(t.kind), t.lexeme, span_to_json(t.span)});
  json fns = json::array();
  for (const auto &fn : f.ast.functions) {
    json cls = json::array();
    for (const auto &c : fn.clauses)
      cls.push_back(expr_to_json(c));
    fns.push_back({{"name", fn.name},
                   {"arity", fn.arity},
                   {"span", span_to_json(fn.span)},
                   {"clauses", std::move(cls)}});
  }
  return {{"path", f.path},
          {"text", f.text},
          {"tokens", std::move(toks)},
          {"module", f.ast.name},
          {"header", span_to_json(f.ast.header)},
          {"functions", std::move(fns)}};
}

std::shared_ptr<const ParsedFile> parsed_from_json(const json &j,
                                                   FileId file) {
  std::vector<Token> tokens;
  for (const auto &t : j.at("tokens")) {
    int kind = t.at(0).get<int>();
    if (kind < 0 || kind > static_cast<int>(TokenKind::Keyword))
      throw std::runtime_error("bad token kind");
    tokens.push_back({static_cast<TokenKind>(kind), t.at(1).get<std::string>(),
                      span_from_json(t.at(2), file)});
  }
  ModuleAst ast;
  ast.name = j.at("module").get<std::string>();
  ast.file = file;
  ast.header = span_from_json(j.at("header"), file);
  for (const auto &f : j.at("functions")) {
    FunDef fn;
    fn.name = f.at("name").get<std::string>();
    fn.arity = f.at("arity").get<std::size_t>();
    fn.span = span_from_json(f.at("span"), file);
    for (const auto &c : f.at("clauses"))
      fn.clauses.push_back(expr_from_json(c, file));
    ast.functions.push_back(std::move(fn));
  }
  return assemble_file(j.at("path").get<std::string>(),
                       j.at("text").get<std::string>(), std::move(tokens),
                       std::move(ast));
}

json au_to_json(const AuResult &r) {
  json body = json::array();
  for (const auto &e : r.tmpl.body)
    body.push_back(expr_to_json(e));
  json subs = json::array();
  for (const auto &s : r.subs) {
    json one = json::array();
    for (const auto &e : s)
      one.push_back(expr_to_json(e));
    subs.push_back(std::move(one));
  }
  return {{"params", r.tmpl.params},
          {"free", r.tmpl.free_params},
          {"exports", r.tmpl.exports},
          {"body", std::move(body)},
          {"subs", std::move(subs)},
          {"similarity", r.similarity}};
}

AuResult au_from_json(const json &j) {
  AuResult r;
  r.tmpl.params = j.at("params").get<std::vector<std::string>>();
  r.tmpl.free_params = j.at("free").get<std::size_t>();
  r.tmpl.exports = j.at("exports").get<std::vector<std::string>>();
  for (const auto &e : j.at("body"))
    r.tmpl.body.push_back(expr_from_json(e, 0));
  for (const auto &s : j.at("subs")) {
    Substitution one;
    for (const auto &e : s)
      one.push_back(expr_from_json(e, 0));
    r.subs.push_back(std::move(one));
  }
  r.similarity = j.at("similarity").get<double>();
  if (r.tmpl.free_params > r.tmpl.params.size())
    throw std::runtime_error("bad parameter count");
  return r;
}

void restamp(std::vector<Token> &tokens, ModuleAst &ast, FileId file) {
  for (auto &t : tokens)
    t.span.file = file;
  ast.file = file;
  ast.header.file = file;
  for (auto &fn : ast.functions) {
    fn.span.file = file;
    for (auto &c : fn.clauses)
      walk_mutable(c, [&](Expr &e, bool) { e.span.file = file; });
  }
}

} // namespace clonewright::serial
