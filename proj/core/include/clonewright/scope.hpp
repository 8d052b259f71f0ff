#pragma once

#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clonewright/ast.hpp"

namespace clonewright {

/// Binding structure of an expression sequence computed from the tree alone
/// (no source offsets), so it also works on synthesized code.
struct ScopeInfo {
  struct Occ {
    int binding = 0; // >= 0: local binding id; < 0: free name -binding-1
    bool defining = false;
    bool in_pattern = false;
  };

  std::unordered_map<const Expr *, Occ> occ;
  std::vector<const Expr *> definers;                   // per local binding
  std::vector<std::vector<const Expr *>> occurrences;   // per local binding
  std::vector<std::string> free_names;                  // first-use order
  std::vector<int> top_level; // bindings introduced in the sequence scope

  const Occ *at(const Expr *var) const {
    auto it = occ.find(var);
    return it == occ.end() ? nullptr : &it->second;
  }
  bool is_free(const Expr *var) const {
    auto *o = at(var);
    return o && o->binding < 0;
  }
  const std::string &free_name(int binding) const {
    return free_names[static_cast<std::size_t>(-binding - 1)];
  }
};

/// `outer` names are bound before the sequence starts; pattern occurrences
/// of them are uses. Unbound uses are classified as free as well.
ScopeInfo analyze_scope(std::span<const Expr> seq,
                        const std::set<std::string> &outer = {});

/// Structural equality where clone-local binders may be renamed
/// consistently. Free variables must match by name.
bool alpha_equivalent(std::span<const Expr> a, std::span<const Expr> b,
                      const std::set<std::string> &outer = {});
bool alpha_equivalent(const Expr &a, const Expr &b,
                      const std::set<std::string> &outer = {});

/// Free variable names of a sequence in first-use order.
std::vector<std::string> free_variables(std::span<const Expr> seq,
                                        const std::set<std::string> &outer = {});

/// Replaces free occurrences of variables named in `subst`; bound
/// occurrences (e.g. shadowing fun parameters) are left alone.
std::vector<Expr>
substitute_free(std::span<const Expr> seq,
                const std::vector<std::pair<std::string, Expr>> &subst);

} // namespace clonewright
