#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "clonewright/span.hpp"

namespace clonewright {

enum class ExprKind {
  Integer,
  String,
  Atom,
  Variable,
  Tuple,
  Cons,
  Nil,
  BinOp,
  Match,
  LocalCall,
  RemoteCall,
  VarCall,
  Fun,
  Case,
  // Helper node for fun/case/function clauses; children are the patterns
  // followed by the body.
  Clause,
};

const char *to_string(ExprKind kind);

/// Uniform syntax node.
///
///  - Integer/Atom/Variable: `text` is the lexeme.
///  - String: `text` is the lexeme including the quotes.
///  - BinOp: `text` is the operator, children are [lhs, rhs].
///  - Match: children are [pattern, rhs].
///  - LocalCall: `text` is the callee, children are the arguments.
///  - RemoteCall: `module`:`text`, children are the arguments.
///  - VarCall: children are [callee variable, args...].
///  - Cons: [head, tail]. Fun: [Clause]. Case: [scrutinee, Clause...].
struct Expr {
  ExprKind kind = ExprKind::Nil;
  std::string text;
  std::string module;
  std::vector<Expr> children;
  std::size_t pattern_count = 0;
  Span span;

  bool is(ExprKind k) const { return kind == k; }
  bool is_var() const { return kind == ExprKind::Variable; }
  bool is_leaf() const {
    return kind == ExprKind::Integer || kind == ExprKind::String ||
           kind == ExprKind::Atom || kind == ExprKind::Variable ||
           kind == ExprKind::Nil;
  }

  // Clause accessors.
  std::span<const Expr> patterns() const {
    return {children.data(), pattern_count};
  }
  std::span<const Expr> body() const {
    return {children.data() + pattern_count, children.size() - pattern_count};
  }

  /// Call arguments for LocalCall/RemoteCall/VarCall.
  std::span<const Expr> args() const {
    std::size_t skip = kind == ExprKind::VarCall ? 1 : 0;
    return {children.data() + skip, children.size() - skip};
  }
};

/// Structural equality; spans are ignored.
bool operator==(const Expr &a, const Expr &b);

Expr make_integer(long long value);
Expr make_integer_lexeme(std::string lexeme);
Expr make_string(std::string contents);
Expr make_atom(std::string name);
Expr make_var(std::string name);
Expr make_tuple(std::vector<Expr> elems);
Expr make_nil();
Expr make_cons(Expr head, Expr tail);
Expr make_list(std::vector<Expr> elems, Expr tail = make_nil());
Expr make_binop(std::string op, Expr lhs, Expr rhs);
Expr make_match(Expr pattern, Expr rhs);
Expr make_local_call(std::string name, std::vector<Expr> args);
Expr make_remote_call(std::string module, std::string name,
                      std::vector<Expr> args);
Expr make_var_call(Expr callee, std::vector<Expr> args);
Expr make_clause(std::vector<Expr> patterns, std::vector<Expr> body);
Expr make_fun(std::vector<Expr> params, std::vector<Expr> body);
Expr make_case(Expr scrutinee, std::vector<Expr> clauses);

struct FunDef {
  std::string name;
  std::size_t arity = 0;
  std::vector<Expr> clauses; // ExprKind::Clause
  Span span;

  friend bool operator==(const FunDef &a, const FunDef &b) {
    return a.name == b.name && a.arity == b.arity && a.clauses == b.clauses;
  }
};

struct ModuleAst {
  std::string name;
  std::vector<FunDef> functions;
  FileId file = 0;
  Span header;

  const FunDef *find(std::string_view name, std::size_t arity) const;

  friend bool operator==(const ModuleAst &a, const ModuleAst &b) {
    return a.name == b.name && a.functions == b.functions;
  }
};

/// AST node count. Clause helper nodes are not counted.
std::size_t node_count(const Expr &e);
std::size_t node_count(std::span<const Expr> seq);

/// Preorder walk; the callback receives each node and whether it sits in a
/// pattern position.
void walk(const Expr &e,
          const std::function<void(const Expr &, bool in_pattern)> &fn,
          bool in_pattern = false);
void walk_mutable(Expr &e, const std::function<void(Expr &, bool)> &fn,
                  bool in_pattern = false);

/// Child positions that are patterns.
bool child_is_pattern(const Expr &parent, std::size_t index);

/// Names of all variables occurring in `e`.
void collect_variable_names(const Expr &e, std::vector<std::string> &out);

} // namespace clonewright
