#include "clonewright/scope.hpp"

#include <algorithm>
#include <map>

namespace clonewright {

namespace {

using Env = std::map<std::string, int>;

class ScopeWalker {
public:
  ScopeWalker(ScopeInfo &info, const std::set<std::string> &outer)
      : info_(info), outer_(outer) {}

  void sequence(std::span<const Expr> seq) {
    Env env;
    for (const auto &e : seq)
      expr(e, env);
    for (const auto &[name, b] : env)
      if (b >= 0)
        info_.top_level.push_back(b);
    std::sort(info_.top_level.begin(), info_.top_level.end());
  }

private:
  int free_binding(const std::string &name) {
    auto it = std::find(info_.free_names.begin(), info_.free_names.end(), name);
    if (it == info_.free_names.end()) {
      info_.free_names.push_back(name);
      it = info_.free_names.end() - 1;
    }
    return -static_cast<int>(it - info_.free_names.begin()) - 1;
  }

  void use(const Expr &v, int b, bool in_pattern) {
    info_.occ[&v] = {b, false, in_pattern};
    if (b >= 0)
      info_.occurrences[static_cast<std::size_t>(b)].push_back(&v);
  }

  int define(const Expr &v, Env &env) {
    int b = static_cast<int>(info_.definers.size());
    info_.definers.push_back(&v);
    info_.occurrences.push_back({&v});
    info_.occ[&v] = {b, true, true};
    if (v.text != "_")
      env[v.text] = b;
    return b;
  }

  void pattern(const Expr &p, Env &env, bool shadow,
               std::vector<std::string> *fresh = nullptr) {
    if (p.is_var()) {
      if (p.text == "_") {
        define(p, env);
        return;
      }
      bool seen_here = fresh && std::find(fresh->begin(), fresh->end(),
                                          p.text) != fresh->end();
      if (!shadow || seen_here) {
        auto it = env.find(p.text);
        if (it != env.end()) {
          use(p, it->second, true);
          return;
        }
        if (!seen_here && outer_.count(p.text)) {
          use(p, free_binding(p.text), true);
          return;
        }
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
      use(e, it == env.end() ? free_binding(e.text) : it->second, false);
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

  ScopeInfo &info_;
  const std::set<std::string> &outer_;
};

class AlphaComparer {
public:
  AlphaComparer(const ScopeInfo &a, const ScopeInfo &b) : a_(a), b_(b) {}

  bool same(const Expr &x, const Expr &y) {
    if (x.kind != y.kind || x.children.size() != y.children.size() ||
        x.pattern_count != y.pattern_count)
      return false;
    if (x.is_var())
      return same_var(x, y);
    if (x.text != y.text || x.module != y.module)
      return false;
    for (std::size_t i = 0; i < x.children.size(); ++i)
      if (!same(x.children[i], y.children[i]))
        return false;
    return true;
  }

private:
  bool same_var(const Expr &x, const Expr &y) {
    const auto *ox = a_.at(&x);
    const auto *oy = b_.at(&y);
    if (!ox || !oy)
      return x.text == y.text;
    if (ox->defining != oy->defining)
      return false;
    if ((ox->binding < 0) != (oy->binding < 0))
      return false;
    if (ox->binding < 0)
      return a_.free_name(ox->binding) == b_.free_name(oy->binding);
    auto [it, fresh] = fwd_.emplace(ox->binding, oy->binding);
    if (!fresh && it->second != oy->binding)
      return false;
    auto [jt, fresh2] = back_.emplace(oy->binding, ox->binding);
    return fresh2 || jt->second == ox->binding;
  }

  const ScopeInfo &a_;
  const ScopeInfo &b_;
  std::map<int, int> fwd_;
  std::map<int, int> back_;
};

Expr substitute_node(const Expr &e, const ScopeInfo &info,
                     const std::vector<std::pair<std::string, Expr>> &subst) {
  if (e.is_var()) {
    const auto *o = info.at(&e);
    if (o && o->binding < 0) {
      for (const auto &[name, value] : subst)
        if (name == e.text)
          return value;
    }
    return e;
  }
  Expr out = e;
  out.children.clear();
  out.children.reserve(e.children.size());
  for (const auto &c : e.children)
    out.children.push_back(substitute_node(c, info, subst));
  return out;
}

} // namespace

ScopeInfo analyze_scope(std::span<const Expr> seq,
                        const std::set<std::string> &outer) {
  ScopeInfo info;
  ScopeWalker(info, outer).sequence(seq);
  return info;
}

bool alpha_equivalent(std::span<const Expr> a, std::span<const Expr> b,
                      const std::set<std::string> &outer) {
  if (a.size() != b.size())
    return false;
  ScopeInfo sa = analyze_scope(a, outer);
  ScopeInfo sb = analyze_scope(b, outer);
  AlphaComparer cmp(sa, sb);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!cmp.same(a[i], b[i]))
      return false;
  return true;
}

bool alpha_equivalent(const Expr &a, const Expr &b,
                      const std::set<std::string> &outer) {
  return alpha_equivalent(std::span<const Expr>(&a, 1),
                          std::span<const Expr>(&b, 1), outer);
}

std::vector<std::string> free_variables(std::span<const Expr> seq,
                                        const std::set<std::string> &outer) {
  return analyze_scope(seq, outer).free_names;
}

std::vector<Expr>
substitute_free(std::span<const Expr> seq,
                const std::vector<std::pair<std::string, Expr>> &subst) {
  std::set<std::string> outer;
  for (const auto &[name, value] : subst)
    outer.insert(name);
  ScopeInfo info = analyze_scope(seq, outer);
  std::vector<Expr> out;
  out.reserve(seq.size());
  for (const auto &e : seq)
    out.push_back(substitute_node(e, info, subst));
  return out;
}

} // namespace clonewright
