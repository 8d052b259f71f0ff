#include "clonewright/ast.hpp"

#include <algorithm>

namespace clonewright {

const char *to_string(ExprKind kind) {
  switch (kind) {
  case ExprKind::Integer:
    return "integer";
  case ExprKind::String:
    return "string";
  case ExprKind::Atom:
    return "atom";
  case ExprKind::Variable:
    return "variable";
  case ExprKind::Tuple:
    return "tuple";
  case ExprKind::Cons:
    return "list-cons";
  case ExprKind::Nil:
    return "list-nil";
  case ExprKind::BinOp:
    return "binop";
  case ExprKind::Match:
    return "match";
  case ExprKind::LocalCall:
    return "local-call";
  case ExprKind::RemoteCall:
    return "remote-call";
  case ExprKind::VarCall:
    return "var-call";
  case ExprKind::Fun:
    return "fun-expr";
  case ExprKind::Case:
    return "case-expr";
  case ExprKind::Clause:
    return "clause";
  }
  return "?";
}

bool operator==(const Expr &a, const Expr &b) {
  return a.kind == b.kind && a.text == b.text && a.module == b.module &&
         a.pattern_count == b.pattern_count && a.children == b.children;
}

namespace {
Expr node(ExprKind kind, std::string text = {},
          std::vector<Expr> children = {}) {
  Expr e;
  e.kind = kind;
  e.text = std::move(text);
  e.children = std::move(children);
  return e;
}
} // namespace

Expr make_integer(long long value) {
  return node(ExprKind::Integer, std::to_string(value));
}
Expr make_integer_lexeme(std::string lexeme) {
  return node(ExprKind::Integer, std::move(lexeme));
}
Expr make_string(std::string contents) {
  return node(ExprKind::String, "\"" + contents + "\"");
}
Expr make_atom(std::string name) { return node(ExprKind::Atom, std::move(name)); }
Expr make_var(std::string name) {
  return node(ExprKind::Variable, std::move(name));
}
Expr make_tuple(std::vector<Expr> elems) {
  return node(ExprKind::Tuple, {}, std::move(elems));
}
Expr make_nil() { return node(ExprKind::Nil); }
Expr make_cons(Expr head, Expr tail) {
  std::vector<Expr> c;
  c.push_back(std::move(head));
  c.push_back(std::move(tail));
  return node(ExprKind::Cons, {}, std::move(c));
}
Expr make_list(std::vector<Expr> elems, Expr tail) {
  Expr out = std::move(tail);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    out = make_cons(std::move(*it), std::move(out));
  return out;
}
Expr make_binop(std::string op, Expr lhs, Expr rhs) {
  std::vector<Expr> c;
  c.push_back(std::move(lhs));
  c.push_back(std::move(rhs));
  return node(ExprKind::BinOp, std::move(op), std::move(c));
}
Expr make_match(Expr pattern, Expr rhs) {
  std::vector<Expr> c;
  c.push_back(std::move(pattern));
  c.push_back(std::move(rhs));
  return node(ExprKind::Match, {}, std::move(c));
}
Expr make_local_call(std::string name, std::vector<Expr> args) {
  return node(ExprKind::LocalCall, std::move(name), std::move(args));
}
Expr make_remote_call(std::string module, std::string name,
                      std::vector<Expr> args) {
  Expr e = node(ExprKind::RemoteCall, std::move(name), std::move(args));
  e.module = std::move(module);
  return e;
}
Expr make_var_call(Expr callee, std::vector<Expr> args) {
  std::vector<Expr> c;
  c.push_back(std::move(callee));
  for (auto &a : args)
    c.push_back(std::move(a));
  return node(ExprKind::VarCall, {}, std::move(c));
}
Expr make_clause(std::vector<Expr> patterns, std::vector<Expr> body) {
  Expr e = node(ExprKind::Clause);
  e.pattern_count = patterns.size();
  e.children = std::move(patterns);
  for (auto &b : body)
    e.children.push_back(std::move(b));
  return e;
}
Expr make_fun(std::vector<Expr> params, std::vector<Expr> body) {
  return node(ExprKind::Fun, {},
              {make_clause(std::move(params), std::move(body))});
}
Expr make_case(Expr scrutinee, std::vector<Expr> clauses) {
  std::vector<Expr> c;
  c.push_back(std::move(scrutinee));
  for (auto &cl : clauses)
    c.push_back(std::move(cl));
  return node(ExprKind::Case, {}, std::move(c));
}

const FunDef *ModuleAst::find(std::string_view fname,
                              std::size_t arity) const {
  for (const auto &f : functions)
    if (f.name == fname && f.arity == arity)
      return &f;
  return nullptr;
}

std::size_t node_count(const Expr &e) {
  std::size_t n = e.kind == ExprKind::Clause ? 0 : 1;
  for (const auto &c : e.children)
    n += node_count(c);
  return n;
}

std::size_t node_count(std::span<const Expr> seq) {
  std::size_t n = 0;
  for (const auto &e : seq)
    n += node_count(e);
  return n;
}

bool child_is_pattern(const Expr &parent, std::size_t index) {
  switch (parent.kind) {
  case ExprKind::Match:
    return index == 0;
  case ExprKind::Clause:
    return index < parent.pattern_count;
  default:
    return false;
  }
}

void walk(const Expr &e,
          const std::function<void(const Expr &, bool)> &fn, bool in_pattern) {
  fn(e, in_pattern);
  for (std::size_t i = 0; i < e.children.size(); ++i)
    walk(e.children[i], fn, in_pattern || child_is_pattern(e, i));
}

void walk_mutable(Expr &e, const std::function<void(Expr &, bool)> &fn,
                  bool in_pattern) {
  fn(e, in_pattern);
  for (std::size_t i = 0; i < e.children.size(); ++i)
    walk_mutable(e.children[i], fn, in_pattern || child_is_pattern(e, i));
}

void collect_variable_names(const Expr &e, std::vector<std::string> &out) {
  walk(e, [&](const Expr &n, bool) {
    if (n.is_var() &&
        std::find(out.begin(), out.end(), n.text) == out.end())
      out.push_back(n.text);
  });
}

} // namespace clonewright
