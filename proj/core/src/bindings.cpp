#include "clonewright/bindings.hpp"

#include <algorithm>
#include <unordered_map>

namespace clonewright {

namespace {

using Env = std::unordered_map<std::string, std::size_t>;

class Annotator {
public:
  explicit Annotator(BindingInfo &info) : info_(info) {}

  void function(const FunDef &f) {
    for (const auto &cl : f.clauses) {
      Env env;
      for (const auto &p : cl.patterns())
        pattern(p, env, false);
      for (const auto &e : cl.body())
        expr(e, env);
    }
  }

private:
  void record(const Expr &var, OccurrenceRole role, std::size_t binding,
              bool in_pattern) {
    VarOccurrence occ{var.text, var.span, role, binding, in_pattern};
    info_.occurrences[var.span.begin_offset] = occ;
    if (role == OccurrenceRole::Use && binding != kFreeInFunction)
      info_.uses[binding].push_back(var.span.begin_offset);
    if (role == OccurrenceRole::Defining)
      info_.uses.try_emplace(var.span.begin_offset);
  }

  void define(const Expr &var, Env &env) {
    record(var, OccurrenceRole::Defining, var.span.begin_offset, true);
    if (var.text != "_")
      env[var.text] = var.span.begin_offset;
  }

  // `fresh` names are the variables already introduced by this parameter
  // list when `shadow` is on (fun heads).
  void pattern(const Expr &p, Env &env, bool shadow,
               std::vector<std::string> *fresh = nullptr) {
    if (p.is_var()) {
      if (p.text == "_") {
        define(p, env);
        return;
      }
      bool seen_here =
          fresh && std::find(fresh->begin(), fresh->end(), p.text) !=
                       fresh->end();
      auto it = env.find(p.text);
      if (it != env.end() && (!shadow || seen_here)) {
        record(p, OccurrenceRole::Use, it->second, true);
        if (!seen_here)
          info_.warnings.push_back(
              {"rebinding of variable " + p.text + " in pattern", p.span});
        return;
      }
      define(p, env);
      if (fresh)
        fresh->push_back(p.text);
      return;
    }
    for (const auto &c : p.children)
      pattern(c, env, shadow, fresh);
  }

  void expr(const Expr &e, Env &env) {
    switch (e.kind) {
    case ExprKind::Variable: {
      auto it = env.find(e.text);
      if (it == env.end()) {
        record(e, OccurrenceRole::Use, kFreeInFunction, false);
        info_.errors.push_back({"variable " + e.text + " is unbound", e.span});
      } else {
        record(e, OccurrenceRole::Use, it->second, false);
      }
      return;
    }
    case ExprKind::Match:
      expr(e.children[1], env);
      pattern(e.children[0], env, false);
      return;
    case ExprKind::Case:
      expr(e.children[0], env);
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        Env inner = env;
        const Expr &cl = e.children[i];
        for (const auto &p : cl.patterns())
          pattern(p, inner, false);
        for (const auto &b : cl.body())
          expr(b, inner);
      }
      return;
    case ExprKind::Fun: {
      Env inner = env;
      const Expr &cl = e.children[0];
      std::vector<std::string> fresh;
      for (const auto &p : cl.patterns())
        pattern(p, inner, true, &fresh);
      for (const auto &b : cl.body())
        expr(b, inner);
      return;
    }
    default:
      for (const auto &c : e.children)
        expr(c, env);
      return;
    }
  }

  BindingInfo &info_;
};

} // namespace

void annotate_function(const FunDef &f, BindingInfo &info) {
  Annotator(info).function(f);
}

BindingInfo annotate_bindings(const ModuleAst &module) {
  BindingInfo info;
  Annotator a(info);
  for (const auto &f : module.functions)
    a.function(f);
  return info;
}

} // namespace clonewright
