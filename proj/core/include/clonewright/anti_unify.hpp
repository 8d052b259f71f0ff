#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "clonewright/ast.hpp"

namespace clonewright {

/// Least-general common abstraction of a set of expression sequences.
struct Template {
  /// Free-variable parameters in declaration order, then NewVar_1..NewVar_k.
  std::vector<std::string> params;
  std::size_t free_params = 0;
  std::vector<Expr> body;
  /// Template names of bindings made inside the clone and used after it, in
  /// declaration order.
  std::vector<std::string> exports;

  std::size_t new_params() const { return params.size() - free_params; }
};

/// Actual argument per template parameter, aligned with Template::params.
using Substitution = std::vector<Expr>;

/// One instance handed to the anti-unifier.
struct AuInstance {
  std::span<const Expr> exprs;
  /// Module used to resolve local calls; null compares callee names only.
  const ModuleAst *module = nullptr;
  /// Variables bound before the instance starts.
  std::set<std::string> outer;
  /// Declaration rank of outer variables (missing: first-use order).
  std::map<std::string, std::size_t> declared;
  /// Bindings made inside the instance that are used after it.
  std::set<std::string> exports;
};

struct AuResult {
  Template tmpl;
  std::vector<Substitution> subs;
  double similarity = 0.0;
};

/// Simultaneous anti-unification of all instances. Returns nullopt when the
/// instances are not similar: a mismatch in a pattern position, an
/// abstraction that would capture clone-local bindings, export sets that do
/// not correspond, or a template consisting only of placeholders.
std::optional<AuResult> anti_unify(const std::vector<AuInstance> &instances);

/// Standalone pair form; variables not bound inside a sequence are free.
std::optional<AuResult> anti_unify_pair(std::span<const Expr> a,
                                        std::span<const Expr> b);
std::optional<AuResult> anti_unify_pair(const Expr &a, const Expr &b);

/// min over instances of size(template) / size(instance), sizes in AST nodes.
double similarity(const Template &t,
                  const std::vector<std::span<const Expr>> &instances);

/// Applies a substitution to the template body. Template-local binders that
/// would capture free variables of the actuals are renamed first.
std::vector<Expr> instantiate(const Template &t, const Substitution &sub);

bool is_placeholder_name(std::string_view name);

} // namespace clonewright
