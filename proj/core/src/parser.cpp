#include "clonewright/parser.hpp"

#include <set>

namespace clonewright {

namespace {

std::string join_expected(const std::vector<std::string> &expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i)
      out += ", ";
    out += expected[i];
  }
  return out;
}

} // namespace

SyntaxError::SyntaxError(std::vector<std::string> expected, std::string found,
                         Span span)
    : MelError("syntax error: expected " + join_expected(expected) +
                   " but found " + found,
               span),
      expected_(std::move(expected)) {}

bool is_pattern(const Expr &e) {
  switch (e.kind) {
  case ExprKind::Integer:
  case ExprKind::String:
  case ExprKind::Atom:
  case ExprKind::Variable:
  case ExprKind::Nil:
    return true;
  case ExprKind::Tuple:
  case ExprKind::Cons:
    for (const auto &c : e.children)
      if (!is_pattern(c))
        return false;
    return true;
  default:
    return false;
  }
}

namespace {

class Parser {
public:
  Parser(const std::vector<Token> &tokens, FileId file)
      : toks_(tokens), file_(file) {}

  ModuleAst module() {
    ModuleAst m;
    m.file = file_;
    std::size_t start = pos_;
    expect_op("-");
    expect(TokenKind::Atom, "module");
    expect_punct("(");
    m.name = expect_kind(TokenKind::Atom).lexeme;
    expect_punct(")");
    expect_punct(".");
    m.header = span_from(start);
    std::set<std::pair<std::string, std::size_t>> seen;
    while (!at_end()) {
      FunDef f = function();
      if (!seen.insert({f.name, f.arity}).second)
        throw MelError("duplicate definition of " + f.name + "/" +
                           std::to_string(f.arity),
                       f.span);
      m.functions.push_back(std::move(f));
    }
    return m;
  }

  FunDef function() {
    std::size_t start = pos_;
    FunDef f;
    f.name = peek_kind(TokenKind::Atom) ? peek().lexeme : std::string{};
    while (true) {
      std::size_t clause_start = pos_;
      const Token &name = expect_kind(TokenKind::Atom);
      if (name.lexeme != f.name)
        throw MelError("clause name " + name.lexeme +
                           " does not match function " + f.name,
                       name.span);
      expect_punct("(");
      std::vector<Expr> pats;
      if (!peek_punct(")"))
        pats = pattern_list(")");
      expect_punct(")");
      if (f.clauses.empty())
        f.arity = pats.size();
      else if (pats.size() != f.arity)
        throw MelError("clause arity differs for " + f.name,
                       span_from(clause_start));
      expect_punct("->");
      auto body = expr_sequence();
      Expr clause = make_clause(std::move(pats), std::move(body));
      clause.span = span_from(clause_start);
      f.clauses.push_back(std::move(clause));
      if (peek_punct(";")) {
        ++pos_;
        continue;
      }
      expect_punct(".");
      break;
    }
    f.span = span_from(start);
    return f;
  }

  std::vector<Expr> expr_sequence() {
    std::vector<Expr> out;
    out.push_back(expr());
    while (peek_punct(",")) {
      ++pos_;
      out.push_back(expr());
    }
    return out;
  }

  Expr expr() {
    std::size_t start = pos_;
    Expr lhs = expr300();
    if (peek_op("=")) {
      ++pos_;
      if (!is_pattern(lhs))
        throw MelError("left side of '=' is not a pattern", lhs.span);
      Expr rhs = expr();
      Expr m = make_match(std::move(lhs), std::move(rhs));
      m.span = span_from(start);
      return m;
    }
    if (peek_op("!")) {
      ++pos_;
      Expr rhs = expr();
      Expr b = make_binop("!", std::move(lhs), std::move(rhs));
      b.span = span_from(start);
      return b;
    }
    return lhs;
  }

  bool at_end() const { return pos_ >= toks_.size(); }

  void expect_end() {
    if (!at_end())
      fail({"end of input"});
  }

private:
  Expr expr300() {
    std::size_t start = pos_;
    Expr lhs = expr400();
    if (peek_op("++")) {
      ++pos_;
      Expr rhs = expr300();
      Expr b = make_binop("++", std::move(lhs), std::move(rhs));
      b.span = span_from(start);
      return b;
    }
    return lhs;
  }

  Expr expr400() {
    std::size_t start = pos_;
    Expr lhs = expr500();
    while (peek_op("+") || peek_op("-")) {
      std::string op = toks_[pos_++].lexeme;
      Expr rhs = expr500();
      lhs = make_binop(op, std::move(lhs), std::move(rhs));
      lhs.span = span_from(start);
    }
    return lhs;
  }

  Expr expr500() {
    std::size_t start = pos_;
    Expr lhs = primary();
    while (peek_op("*") || peek_op("/")) {
      std::string op = toks_[pos_++].lexeme;
      Expr rhs = primary();
      lhs = make_binop(op, std::move(lhs), std::move(rhs));
      lhs.span = span_from(start);
    }
    return lhs;
  }

  Expr primary() {
    std::size_t start = pos_;
    if (at_end())
      fail({"expression"});
    const Token &t = toks_[pos_];
    Expr e;
    switch (t.kind) {
    case TokenKind::Integer:
      ++pos_;
      e = make_integer_lexeme(t.lexeme);
      break;
    case TokenKind::String:
      ++pos_;
      e.kind = ExprKind::String;
      e.text = t.lexeme;
      break;
    case TokenKind::Variable:
      ++pos_;
      e = make_var(t.lexeme);
      e.span = t.span;
      if (peek_punct("(")) {
        auto args = call_args();
        e = make_var_call(std::move(e), std::move(args));
      }
      break;
    case TokenKind::Atom:
      ++pos_;
      if (peek_punct("(")) {
        e = make_local_call(t.lexeme, call_args());
      } else if (peek_punct(":")) {
        ++pos_;
        const Token &fname = expect_kind(TokenKind::Atom);
        if (!peek_punct("("))
          fail({"("});
        e = make_remote_call(t.lexeme, fname.lexeme, call_args());
      } else {
        e = make_atom(t.lexeme);
      }
      break;
    case TokenKind::Keyword:
      if (t.lexeme == "fun")
        e = fun_expr();
      else if (t.lexeme == "case")
        e = case_expr();
      else
        fail({"expression"});
      break;
    case TokenKind::Punctuation:
      if (t.lexeme == "(") {
        ++pos_;
        Expr inner = expr();
        expect_punct(")");
        inner.span = span_from(start);
        return inner;
      }
      if (t.lexeme == "{") {
        ++pos_;
        std::vector<Expr> elems;
        if (!peek_punct("}"))
          elems = expr_list();
        expect_punct("}");
        e = make_tuple(std::move(elems));
        break;
      }
      if (t.lexeme == "[") {
        e = list_expr();
        break;
      }
      fail({"expression"});
      break;
    case TokenKind::Operator:
      fail({"expression"});
      break;
    }
    e.span = span_from(start);
    return e;
  }

  Expr list_expr() {
    std::size_t start = pos_;
    expect_punct("[");
    if (peek_punct("]")) {
      ++pos_;
      Expr nil = make_nil();
      nil.span = span_from(start);
      return nil;
    }
    std::vector<Expr> elems = expr_list();
    Expr tail = make_nil();
    if (peek_punct("|")) {
      ++pos_;
      tail = expr();
    } else if (!at_end()) {
      const Span &close = toks_[pos_].span;
      tail.span = Span{file_, close.begin, close.begin, close.begin_offset,
                       close.begin_offset};
    }
    expect_punct("]");
    Span outer = span_from(start);
    // Nested cons cells share the end of the enclosing list.
    Expr out = std::move(tail);
    for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
      Span s{file_, it->span.begin, outer.end, it->span.begin_offset,
             outer.end_offset};
      out = make_cons(std::move(*it), std::move(out));
      out.span = s;
    }
    return out;
  }

  Expr fun_expr() {
    std::size_t start = pos_;
    expect(TokenKind::Keyword, "fun");
    expect_punct("(");
    std::vector<Expr> params;
    if (!peek_punct(")"))
      params = pattern_list(")");
    expect_punct(")");
    expect_punct("->");
    auto body = expr_sequence();
    expect(TokenKind::Keyword, "end");
    Expr f = make_fun(std::move(params), std::move(body));
    f.span = span_from(start);
    f.children[0].span = f.span;
    return f;
  }

  Expr case_expr() {
    std::size_t start = pos_;
    expect(TokenKind::Keyword, "case");
    Expr scrutinee = expr();
    expect(TokenKind::Keyword, "of");
    std::vector<Expr> clauses;
    while (true) {
      std::size_t cstart = pos_;
      Expr pat = expr300();
      if (!is_pattern(pat))
        throw MelError("case clause head is not a pattern", pat.span);
      expect_punct("->");
      auto body = expr_sequence();
      std::vector<Expr> pats;
      pats.push_back(std::move(pat));
      Expr cl = make_clause(std::move(pats), std::move(body));
      cl.span = span_from(cstart);
      clauses.push_back(std::move(cl));
      if (peek_punct(";")) {
        ++pos_;
        continue;
      }
      break;
    }
    expect(TokenKind::Keyword, "end");
    Expr c = make_case(std::move(scrutinee), std::move(clauses));
    c.span = span_from(start);
    return c;
  }

  std::vector<Expr> call_args() {
    expect_punct("(");
    std::vector<Expr> args;
    if (!peek_punct(")"))
      args = expr_list();
    expect_punct(")");
    return args;
  }

  std::vector<Expr> expr_list() {
    std::vector<Expr> out;
    out.push_back(expr());
    while (peek_punct(",")) {
      ++pos_;
      out.push_back(expr());
    }
    return out;
  }

  std::vector<Expr> pattern_list(const char *) {
    std::vector<Expr> out = expr_list();
    for (const auto &p : out)
      if (!is_pattern(p))
        throw MelError("expected a pattern", p.span);
    return out;
  }

  const Token &peek() const { return toks_[pos_]; }
  bool peek_kind(TokenKind k) const { return !at_end() && toks_[pos_].kind == k; }
  bool peek_punct(std::string_view p) const {
    return !at_end() && toks_[pos_].is_punct(p);
  }
  bool peek_op(std::string_view p) const {
    return !at_end() && toks_[pos_].is_op(p);
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    if (at_end()) {
      Span s{};
      s.file = file_;
      if (!toks_.empty()) {
        s.begin = s.end = toks_.back().span.end;
        s.begin_offset = s.end_offset = toks_.back().span.end_offset;
      }
      throw SyntaxError(std::move(expected), "end of input", s);
    }
    throw SyntaxError(std::move(expected), "'" + toks_[pos_].lexeme + "'",
                      toks_[pos_].span);
  }

  const Token &expect(TokenKind k, std::string_view text) {
    if (at_end() || !toks_[pos_].is(k, text))
      fail({"'" + std::string(text) + "'"});
    return toks_[pos_++];
  }
  const Token &expect_kind(TokenKind k) {
    if (at_end() || toks_[pos_].kind != k)
      fail({to_string(k)});
    return toks_[pos_++];
  }
  void expect_punct(std::string_view p) { expect(TokenKind::Punctuation, p); }
  void expect_op(std::string_view p) { expect(TokenKind::Operator, p); }

  Span span_from(std::size_t start) const {
    const Token &a = toks_[start];
    const Token &b = toks_[pos_ - 1];
    return Span{file_, a.span.begin, b.span.end, a.span.begin_offset,
                b.span.end_offset};
  }

  const std::vector<Token> &toks_;
  FileId file_;
  std::size_t pos_ = 0;
};

} // namespace

ModuleAst parse(const std::vector<Token> &tokens, FileId file) {
  Parser p(tokens, file);
  return p.module();
}

ModuleAst parse_module(std::string_view source, FileId file) {
  return parse(tokenize(source, file), file);
}

std::vector<Expr> parse_expressions(std::string_view source, FileId file) {
  auto toks = tokenize(source, file);
  Parser p(toks, file);
  auto seq = p.expr_sequence();
  p.expect_end();
  return seq;
}

Expr parse_expression(std::string_view source, FileId file) {
  auto toks = tokenize(source, file);
  Parser p(toks, file);
  Expr e = p.expr();
  p.expect_end();
  return e;
}

FunDef parse_function(std::string_view source, FileId file) {
  auto toks = tokenize(source, file);
  Parser p(toks, file);
  FunDef f = p.function();
  p.expect_end();
  return f;
}

} // namespace clonewright
