#include "clonewright/anti_unify.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "clonewright/printer.hpp"
#include "clonewright/project.hpp"
#include "clonewright/scope.hpp"

namespace clonewright {

namespace {

constexpr char kHoleMark = '\x01';

bool is_call(const Expr &e) {
  return e.kind == ExprKind::LocalCall || e.kind == ExprKind::RemoteCall;
}

CallTarget target_of(const Expr &call, const ModuleAst *module) {
  if (module)
    return resolve_call(*module, call);
  return {call.module, call.text, call.children.size()};
}

struct InstState {
  const AuInstance *in = nullptr;
  ScopeInfo scope;
  std::map<int, std::size_t> local_pair;
  std::map<std::string, std::size_t> free_pair;
};

class Unifier {
public:
  explicit Unifier(const std::vector<AuInstance> &instances) {
    for (const auto &in : instances) {
      InstState s;
      s.in = &in;
      s.scope = analyze_scope(in.exprs, in.outer);
      st_.push_back(std::move(s));
    }
  }

  std::optional<AuResult> run() {
    std::size_t len = st_[0].in->exprs.size();
    for (const auto &s : st_)
      if (s.in->exprs.size() != len || len == 0)
        return std::nullopt;

    std::vector<Expr> body;
    std::vector<const Expr *> nodes(st_.size());
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t i = 0; i < st_.size(); ++i)
        nodes[i] = &st_[i].in->exprs[k];
      body.push_back(unify(nodes, false));
      if (failed_)
        return std::nullopt;
    }

    AuResult r;
    Template &t = r.tmpl;

    // Placeholders are numbered by first occurrence in the template.
    std::map<std::size_t, std::string> hole_names;
    for (auto &e : body)
      walk_mutable(e, [&](Expr &n, bool) {
        if (!n.is_var() || n.text.empty() || n.text[0] != kHoleMark)
          return;
        std::size_t idx = std::stoul(n.text.substr(1));
        auto it = hole_names.find(idx);
        if (it == hole_names.end())
          it = hole_names
                   .emplace(idx, "NewVar_" + std::to_string(hole_names.size() + 1))
                   .first;
        n.text = it->second;
      });

    bool concrete = false;
    for (const auto &e : body)
      walk(e, [&](const Expr &n, bool) {
        if (!(n.is_var() && is_placeholder_name(n.text)))
          concrete = true;
      });
    if (!concrete)
      return std::nullopt;

    if (!exports(t))
      return std::nullopt;

    // Free parameters in declaration order of the first instance.
    std::vector<std::size_t> order(frees_.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = i;
    const auto &declared = st_[0].in->declared;
    auto rank = [&](std::size_t p) {
      auto it = declared.find(frees_[p][0]);
      return it == declared.end()
                 ? std::make_pair(std::numeric_limits<std::size_t>::max(), p)
                 : std::make_pair(it->second, p);
    };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });

    r.subs.resize(st_.size());
    for (std::size_t p : order) {
      t.params.push_back(frees_[p][0]);
      for (std::size_t i = 0; i < st_.size(); ++i)
        r.subs[i].push_back(make_var(frees_[p][i]));
    }
    t.free_params = t.params.size();
    std::vector<std::pair<std::string, std::size_t>> holes;
    for (const auto &[idx, name] : hole_names)
      holes.emplace_back(name, idx);
    std::sort(holes.begin(), holes.end(), [](const auto &a, const auto &b) {
      return std::stoul(a.first.substr(7)) < std::stoul(b.first.substr(7));
    });
    for (const auto &[name, idx] : holes) {
      t.params.push_back(name);
      for (std::size_t i = 0; i < st_.size(); ++i)
        r.subs[i].push_back(*hole_actuals_[idx][i]);
    }
    t.body = std::move(body);

    std::vector<std::span<const Expr>> spans;
    for (const auto &s : st_)
      spans.push_back(s.in->exprs);
    r.similarity = similarity(t, spans);
    return r;
  }

private:
  Expr fail() {
    failed_ = true;
    return {};
  }

  bool same_shape(const std::vector<const Expr *> &nodes) const {
    const Expr &a = *nodes[0];
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const Expr &b = *nodes[i];
      if (b.children.size() != a.children.size() ||
          b.pattern_count != a.pattern_count)
        return false;
      if (is_call(a) && is_call(b)) {
        if (target_of(a, st_[0].in->module) != target_of(b, st_[i].in->module))
          return false;
        continue;
      }
      if (a.kind != b.kind)
        return false;
      switch (a.kind) {
      case ExprKind::Integer:
      case ExprKind::String:
      case ExprKind::Atom:
      case ExprKind::BinOp:
        if (a.text != b.text)
          return false;
        break;
      case ExprKind::Fun:
      case ExprKind::Case:
        // Clauses cannot be placeholders, so their shapes must agree here.
        for (std::size_t c = 0; c < a.children.size(); ++c)
          if (a.children[c].kind == ExprKind::Clause &&
              (a.children[c].pattern_count != b.children[c].pattern_count ||
               a.children[c].children.size() != b.children[c].children.size()))
            return false;
        break;
      default:
        break;
      }
    }
    return true;
  }

  Expr unify(const std::vector<const Expr *> &nodes, bool in_pattern) {
    bool all_vars = std::all_of(nodes.begin(), nodes.end(),
                                [](const Expr *n) { return n->is_var(); });
    if (all_vars)
      return unify_vars(nodes, in_pattern);
    if (!same_shape(nodes))
      return hole(nodes, in_pattern);
    const Expr &a = *nodes[0];
    Expr out;
    out.kind = a.kind;
    out.text = a.text;
    out.module = a.module;
    out.pattern_count = a.pattern_count;
    out.span = a.span;
    std::vector<const Expr *> kids(nodes.size());
    for (std::size_t c = 0; c < a.children.size(); ++c) {
      for (std::size_t i = 0; i < nodes.size(); ++i)
        kids[i] = &nodes[i]->children[c];
      out.children.push_back(
          unify(kids, in_pattern || child_is_pattern(a, c)));
      if (failed_)
        return {};
    }
    return out;
  }

  Expr unify_vars(const std::vector<const Expr *> &nodes, bool in_pattern) {
    std::size_t wild = 0;
    for (const Expr *n : nodes)
      wild += n->text == "_";
    if (wild == nodes.size())
      return make_var("_");
    if (wild > 0)
      return hole(nodes, in_pattern);

    std::vector<const ScopeInfo::Occ *> occ;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      occ.push_back(st_[i].scope.at(nodes[i]));
    bool all_local = true, all_free = true;
    for (const auto *o : occ) {
      all_local = all_local && o->binding >= 0;
      all_free = all_free && o->binding < 0;
    }
    if (all_local) {
      for (const auto *o : occ)
        if (o->defining != occ[0]->defining)
          return hole(nodes, in_pattern);
      std::vector<int> key;
      for (const auto *o : occ)
        key.push_back(o->binding);
      auto it = local_index_.find(key);
      std::size_t idx;
      if (it == local_index_.end()) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
          if (st_[i].local_pair.count(key[i]))
            return hole(nodes, in_pattern);
        idx = local_names_.size();
        local_index_.emplace(key, idx);
        local_names_.push_back(nodes[0]->text);
        local_keys_.push_back(key);
        for (std::size_t i = 0; i < nodes.size(); ++i)
          st_[i].local_pair[key[i]] = idx;
      } else {
        idx = it->second;
      }
      Expr v = make_var(local_names_[idx]);
      v.span = nodes[0]->span;
      return v;
    }
    if (all_free) {
      std::vector<std::string> key;
      for (const Expr *n : nodes)
        key.push_back(n->text);
      auto it = free_index_.find(key);
      if (it == free_index_.end()) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
          if (st_[i].free_pair.count(key[i]))
            return hole(nodes, in_pattern);
        std::size_t idx = frees_.size();
        free_index_.emplace(key, idx);
        frees_.push_back(key);
        for (std::size_t i = 0; i < nodes.size(); ++i)
          st_[i].free_pair[key[i]] = idx;
      }
      Expr v = make_var(nodes[0]->text);
      v.span = nodes[0]->span;
      return v;
    }
    return hole(nodes, in_pattern);
  }

  // A placeholder may only cover code whose bindings stay inside it.
  bool closed(std::size_t i, const Expr *node) const {
    const InstState &s = st_[i];
    std::unordered_set<const Expr *> inside;
    std::vector<const Expr *> vars;
    walk(*node, [&](const Expr &n, bool) {
      inside.insert(&n);
      if (n.is_var())
        vars.push_back(&n);
    });
    for (const Expr *v : vars) {
      const auto *o = s.scope.at(v);
      if (!o || o->binding < 0)
        continue;
      auto b = static_cast<std::size_t>(o->binding);
      if (!inside.count(s.scope.definers[b]))
        return false;
      if (o->defining) {
        for (const Expr *u : s.scope.occurrences[b])
          if (!inside.count(u))
            return false;
        if (s.in->exports.count(v->text) &&
            std::binary_search(s.scope.top_level.begin(),
                               s.scope.top_level.end(), o->binding))
          return false;
      }
    }
    return true;
  }

  Expr hole(const std::vector<const Expr *> &nodes, bool in_pattern) {
    if (in_pattern)
      return fail();
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!closed(i, nodes[i]))
        return fail();
    std::vector<std::string> key;
    for (const Expr *n : nodes)
      key.push_back(print(*n));
    auto it = hole_index_.find(key);
    std::size_t idx;
    if (it == hole_index_.end()) {
      idx = hole_actuals_.size();
      hole_index_.emplace(key, idx);
      hole_actuals_.push_back(nodes);
    } else {
      idx = it->second;
    }
    Expr v = make_var(std::string(1, kHoleMark) + std::to_string(idx));
    v.span = nodes[0]->span;
    return v;
  }

  bool exports(Template &t) {
    std::vector<std::set<std::size_t>> per;
    for (auto &s : st_) {
      std::set<std::size_t> names;
      for (int b : s.scope.top_level) {
        const Expr *def = s.scope.definers[static_cast<std::size_t>(b)];
        if (!s.in->exports.count(def->text))
          continue;
        auto it = s.local_pair.find(b);
        if (it == s.local_pair.end())
          return false;
        names.insert(it->second);
      }
      per.push_back(std::move(names));
    }
    for (const auto &p : per)
      if (p != per[0])
        return false;
    // Declaration order: position of the defining occurrence in the first
    // instance.
    std::map<const Expr *, std::size_t> pos;
    std::size_t counter = 0;
    for (const auto &e : st_[0].in->exprs)
      walk(e, [&](const Expr &n, bool) { pos[&n] = counter++; });
    std::vector<std::pair<std::size_t, std::size_t>> ordered;
    for (std::size_t idx : per[0]) {
      int b = local_keys_[idx][0];
      ordered.emplace_back(pos[st_[0].scope.definers[static_cast<std::size_t>(b)]],
                           idx);
    }
    std::sort(ordered.begin(), ordered.end());
    for (const auto &[p, idx] : ordered)
      t.exports.push_back(local_names_[idx]);
    return true;
  }

  std::vector<InstState> st_;
  bool failed_ = false;
  std::map<std::vector<int>, std::size_t> local_index_;
  std::vector<std::string> local_names_;
  std::vector<std::vector<int>> local_keys_;
  std::map<std::vector<std::string>, std::size_t> free_index_;
  std::vector<std::vector<std::string>> frees_;
  std::map<std::vector<std::string>, std::size_t> hole_index_;
  std::vector<std::vector<const Expr *>> hole_actuals_;
};

} // namespace

bool is_placeholder_name(std::string_view name) {
  if (name.substr(0, 7) != "NewVar_" || name.size() == 7)
    return false;
  return std::all_of(name.begin() + 7, name.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<AuResult> anti_unify(const std::vector<AuInstance> &instances) {
  if (instances.size() < 2)
    return std::nullopt;
  return Unifier(instances).run();
}

std::optional<AuResult> anti_unify_pair(std::span<const Expr> a,
                                        std::span<const Expr> b) {
  std::vector<AuInstance> in(2);
  in[0].exprs = a;
  in[1].exprs = b;
  return anti_unify(in);
}

std::optional<AuResult> anti_unify_pair(const Expr &a, const Expr &b) {
  return anti_unify_pair(std::span<const Expr>(&a, 1),
                         std::span<const Expr>(&b, 1));
}

double similarity(const Template &t,
                  const std::vector<std::span<const Expr>> &instances) {
  double size = static_cast<double>(node_count(t.body));
  double best = 1.0;
  for (const auto &in : instances) {
    double n = static_cast<double>(node_count(in));
    if (n > 0)
      best = std::min(best, size / n);
  }
  return best;
}

std::vector<Expr> instantiate(const Template &t, const Substitution &sub) {
  std::vector<std::pair<std::string, Expr>> pairs;
  std::set<std::string> taken;
  std::set<std::string> actual_free;
  for (std::size_t i = 0; i < t.params.size() && i < sub.size(); ++i) {
    pairs.emplace_back(t.params[i], sub[i]);
    for (const auto &n : free_variables(std::span<const Expr>(&sub[i], 1)))
      actual_free.insert(n);
  }
  std::vector<Expr> body = t.body;
  std::set<std::string> outer(t.params.begin(), t.params.end());
  for (const auto &e : body) {
    std::vector<std::string> names;
    collect_variable_names(e, names);
    taken.insert(names.begin(), names.end());
  }
  taken.insert(actual_free.begin(), actual_free.end());
  ScopeInfo scope = analyze_scope(body, outer);
  for (std::size_t b = 0; b < scope.definers.size(); ++b) {
    const std::string &name = scope.definers[b]->text;
    if (!actual_free.count(name))
      continue;
    std::string fresh;
    for (int k = 1;; ++k) {
      fresh = name + "_" + std::to_string(k);
      if (!taken.count(fresh))
        break;
    }
    taken.insert(fresh);
    for (const Expr *occ : scope.occurrences[b])
      const_cast<Expr *>(occ)->text = fresh;
  }
  return substitute_free(body, pairs);
}

} // namespace clonewright
