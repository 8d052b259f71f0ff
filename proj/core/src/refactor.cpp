#include "clonewright/refactor.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

#include "clonewright/parser.hpp"
#include "clonewright/printer.hpp"
#include "clonewright/scope.hpp"
#include "clonewright/text.hpp"

namespace clonewright {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- effects

EffectTable EffectTable::standard() {
  EffectTable t;
  for (const auto &[name, arity] :
       std::vector<std::pair<const char *, std::size_t>>{
           {"abs", 1},          {"element", 2},      {"hd", 1},
           {"tl", 1},           {"length", 1},       {"size", 1},
           {"tuple_size", 1},   {"max", 2},          {"min", 2},
           {"atom_to_list", 1}, {"list_to_atom", 1}, {"integer_to_list", 1},
           {"list_to_integer", 1}, {"is_atom", 1},   {"is_integer", 1},
           {"is_list", 1},      {"is_tuple", 1},     {"setelement", 3},
           {"round", 1},        {"trunc", 1}})
    t.set("erlang", name, arity, true);
  for (const auto &[name, arity] :
       std::vector<std::pair<const char *, std::size_t>>{
           {"reverse", 1}, {"append", 2}, {"sum", 1},    {"nth", 2},
           {"member", 2},  {"sort", 1},   {"last", 1},   {"seq", 2},
           {"max", 1},     {"min", 1},    {"keyfind", 3}, {"flatten", 1},
           {"zip", 2}})
    t.set("lists", name, arity, true);
  t.set("io", "format", 1, false);
  t.set("io", "format", 2, false);
  return t;
}

void EffectTable::set(const std::string &module, const std::string &name,
                      std::size_t arity, bool pure) {
  table_[{module, name, arity}] = pure;
}

std::optional<bool> EffectTable::lookup(const CallTarget &t) const {
  auto it = table_.find({t.module, t.name, t.arity});
  if (it == table_.end())
    return std::nullopt;
  return it->second;
}

bool EffectTable::pure_call(const CallTarget &t, const Project *project,
                            std::vector<CallTarget> &visiting) const {
  if (auto known = lookup(t))
    return *known;
  if (!project)
    return false;
  auto fid = project->find_module(t.module);
  if (!fid)
    return false;
  const ModuleAst &m = project->file(*fid).ast;
  const FunDef *f = m.find(t.name, t.arity);
  if (!f)
    return false;
  if (std::find(visiting.begin(), visiting.end(), t) != visiting.end())
    return false;
  visiting.push_back(t);
  bool pure = true;
  for (const auto &cl : f->clauses)
    for (const auto &e : cl.body())
      pure = pure && pure_expr(e, project, &m, visiting);
  visiting.pop_back();
  return pure;
}

bool EffectTable::pure_expr(const Expr &e, const Project *project,
                            const ModuleAst *module,
                            std::vector<CallTarget> &visiting) const {
  switch (e.kind) {
  case ExprKind::Fun:
    return true;
  case ExprKind::VarCall:
    return false;
  case ExprKind::BinOp:
    if (e.text == "!")
      return false;
    break;
  case ExprKind::LocalCall:
  case ExprKind::RemoteCall: {
    CallTarget t = module ? resolve_call(*module, e)
                          : CallTarget{e.kind == ExprKind::RemoteCall
                                           ? e.module
                                           : std::string("erlang"),
                                       e.text, e.children.size()};
    if (!pure_call(t, project, visiting))
      return false;
    break;
  }
  default:
    break;
  }
  for (const auto &c : e.children)
    if (!pure_expr(c, project, module, visiting))
      return false;
  return true;
}

bool EffectTable::is_pure(const Expr &e, const Project *project,
                          const ModuleAst *module) const {
  std::vector<CallTarget> visiting;
  return pure_expr(e, project, module, visiting);
}

// ---------------------------------------------------------------- helpers

FunRef FunRef::parse(std::string_view text) {
  FunRef r;
  auto slash = text.rfind('/');
  if (slash == std::string_view::npos)
    throw RefactorError("expected NAME/ARITY: " + std::string(text));
  std::string_view head = text.substr(0, slash);
  std::string_view arity = text.substr(slash + 1);
  if (arity.empty() ||
      !std::all_of(arity.begin(), arity.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    throw RefactorError("bad arity in " + std::string(text));
  r.arity = std::stoul(std::string(arity));
  auto colon = head.find(':');
  if (colon != std::string_view::npos) {
    r.module = std::string(head.substr(0, colon));
    head = head.substr(colon + 1);
  }
  r.name = std::string(head);
  if (!is_valid_atom(r.name) || (!r.module.empty() && !is_valid_atom(r.module)))
    throw RefactorError("bad function reference " + std::string(text));
  return r;
}

std::string FunRef::str() const {
  return (module.empty() ? "" : module + ":") + name + "/" +
         std::to_string(arity);
}

ResolvedFun resolve_fun(const Project &p, const FunRef &ref) {
  std::optional<ResolvedFun> found;
  for (FileId f = 0; f < p.files.size(); ++f) {
    const ModuleAst &m = p.file(f).ast;
    if (!ref.module.empty() && m.name != ref.module)
      continue;
    for (std::uint32_t i = 0; i < m.functions.size(); ++i) {
      const FunDef &fn = m.functions[i];
      if (fn.name != ref.name || fn.arity != ref.arity)
        continue;
      if (found)
        throw RefactorError("ambiguous function " + ref.str() +
                            "; qualify it with a module");
      found = ResolvedFun{f, i};
    }
  }
  if (!found)
    throw RefactorError("unknown function " + ref.str());
  return *found;
}

std::vector<SourceFile> RefactorResult::sources(const Project &p) const {
  std::vector<SourceFile> out;
  for (const auto &f : p.files) {
    SourceFile s{f->path, f->text};
    for (const auto &c : changes)
      if (c.path == f->path)
        s.text = c.after;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

FileId file_id(const Project &p, const std::string &path) {
  auto id = p.find_path(path);
  if (!id)
    throw RefactorError("file not in project: " + path);
  return *id;
}

bool is_call(const Expr &e) {
  return e.kind == ExprKind::LocalCall || e.kind == ExprKind::RemoteCall;
}

std::size_t indent_of(const Span &s) {
  return s.begin.col > 0 ? static_cast<std::size_t>(s.begin.col - 1) : 0;
}

FileChange make_change(const ParsedFile &f, std::vector<TextEdit> edits) {
  FileChange c{f.path, f.text, apply_edits(f.text, std::move(edits))};
  try {
    parse_file({c.path, c.after}, 0);
  } catch (const MelError &e) {
    throw RefactorError("refactoring would produce invalid code in " + f.path +
                        ": " + e.what());
  }
  return c;
}

RefactorResult single_change(const ParsedFile &f, std::vector<TextEdit> edits) {
  RefactorResult r;
  if (edits.empty())
    return r;
  FileChange c = make_change(f, std::move(edits));
  if (c.after != c.before)
    r.changes.push_back(std::move(c));
  return r;
}

// Calls in `m` that currently resolve to the builtin name/arity.
bool calls_builtin(const ModuleAst &m, const std::string &name,
                   std::size_t arity) {
  bool found = false;
  for (const auto &f : m.functions)
    for (const auto &cl : f.clauses)
      walk(cl, [&](const Expr &e, bool) {
        if (e.kind == ExprKind::LocalCall && e.text == name &&
            e.children.size() == arity)
          found = true;
      });
  return found;
}

void check_new_function(const ModuleAst &m, const std::string &name,
                        std::size_t arity) {
  if (!is_valid_atom(name))
    throw RefactorError("not a valid function name: " + name);
  if (m.find(name, arity))
    throw RefactorError("function " + name + "/" + std::to_string(arity) +
                        " already exists in module " + m.name);
  if (calls_builtin(m, name, arity))
    throw RefactorError("module " + m.name + " already calls builtin " + name +
                        "/" + std::to_string(arity));
}

// Code under `node` neither uses bindings made outside it nor makes
// bindings that are used outside it.
bool closed_in(const ScopeInfo &scope, const Expr &node,
               const std::set<std::string> &exports) {
  std::unordered_set<const Expr *> inside;
  std::vector<const Expr *> vars;
  walk(node, [&](const Expr &n, bool) {
    inside.insert(&n);
    if (n.is_var())
      vars.push_back(&n);
  });
  for (const Expr *v : vars) {
    const auto *o = scope.at(v);
    if (!o || o->binding < 0)
      continue;
    auto b = static_cast<std::size_t>(o->binding);
    if (!inside.count(scope.definers[b]))
      return false;
    if (o->defining) {
      for (const Expr *u : scope.occurrences[b])
        if (!inside.count(u))
          return false;
      if (exports.count(v->text) &&
          std::binary_search(scope.top_level.begin(), scope.top_level.end(),
                             o->binding))
        return false;
    }
  }
  return true;
}

bool has_defining(const ScopeInfo &scope, const Expr &node) {
  bool found = false;
  walk(node, [&](const Expr &n, bool) {
    if (n.is_var())
      if (const auto *o = scope.at(&n); o && o->defining)
        found = true;
  });
  return found;
}

Expr export_expr(const std::vector<std::string> &names) {
  if (names.size() == 1)
    return make_var(names[0]);
  std::vector<Expr> vars;
  for (const auto &n : names)
    vars.push_back(make_var(n));
  return make_tuple(std::move(vars));
}

std::string fresh_name(const std::string &base,
                       const std::set<std::string> &taken) {
  for (int k = 1;; ++k) {
    std::string n = base + "_" + std::to_string(k);
    if (!taken.count(n))
      return n;
  }
}

// Rebuilds `e`, replacing free occurrences of closure parameters by calls.
Expr closure_calls(const Expr &e, const ScopeInfo &scope,
                   const std::set<std::string> &closures) {
  if (e.is_var()) {
    if (scope.is_free(&e) && closures.count(e.text))
      return make_var_call(make_var(e.text), {});
    return e;
  }
  Expr out = e;
  out.children.clear();
  for (const auto &c : e.children)
    out.children.push_back(closure_calls(c, scope, closures));
  return out;
}

} // namespace

// ---------------------------------------------------------------- generalise

Generalisation generalise(const Project &p, const CloneClass &c,
                          const EffectTable &effects, const std::string &name) {
  const Template &t = c.tmpl;
  Generalisation g;
  g.exports = t.exports;
  g.closure.assign(t.params.size(), false);
  for (std::size_t k = t.free_params; k < t.params.size(); ++k)
    for (const auto &inst : c.instances) {
      const ModuleAst &m = p.file(inst.site.file).ast;
      if (k < inst.actuals.size() && !effects.is_pure(inst.actuals[k], &p, &m))
        g.closure[k] = true;
    }
  // A parameter that is the whole first expression, used nowhere else, is
  // evaluated before anything in the body anyway.
  if (!t.body.empty() && t.body.front().is_var()) {
    const std::string &first = t.body.front().text;
    std::size_t uses = 0;
    for (const auto &e : t.body)
      walk(e, [&](const Expr &n, bool) { uses += n.is_var() && n.text == first; });
    for (std::size_t k = t.free_params; k < t.params.size(); ++k)
      if (t.params[k] == first && uses == 1)
        g.closure[k] = false;
  }
  std::set<std::string> closures;
  for (std::size_t k = 0; k < t.params.size(); ++k)
    if (g.closure[k])
      closures.insert(t.params[k]);

  std::vector<Expr> body;
  if (closures.empty()) {
    body = t.body;
  } else {
    std::set<std::string> outer(t.params.begin(), t.params.end());
    ScopeInfo scope = analyze_scope(t.body, outer);
    for (const auto &e : t.body)
      body.push_back(closure_calls(e, scope, closures));
  }
  if (!t.exports.empty())
    body.push_back(export_expr(t.exports));

  std::vector<Expr> params;
  for (const auto &n : t.params)
    params.push_back(make_var(n));
  g.def.name = name;
  g.def.arity = params.size();
  g.def.clauses.push_back(make_clause(std::move(params), std::move(body)));

  for (const auto &inst : c.instances) {
    std::vector<Expr> args;
    for (std::size_t k = 0; k < inst.actuals.size(); ++k)
      args.push_back(g.closure[k] ? make_fun({}, {inst.actuals[k]})
                                  : inst.actuals[k]);
    g.calls.push_back(std::move(args));
  }
  return g;
}

// ---------------------------------------------------------------- add

RefactorResult add_function(const Project &p, const std::string &module,
                            const FunDef &def) {
  auto fid = p.find_module(module);
  if (!fid)
    throw RefactorError("unknown module " + module);
  const ParsedFile &f = p.file(*fid);
  check_new_function(f.ast, def.name, def.arity);
  std::string text = f.text;
  std::string insert;
  if (!text.empty() && text.back() != '\n')
    insert += "\n";
  insert += "\n" + print(def) + "\n";
  return single_change(f, {{text.size(), text.size(), insert}});
}

// ---------------------------------------------------------------- fold

namespace {

struct FoldPattern {
  ResolvedFun fn;
  const ParsedFile *file = nullptr;
  const FunDef *def = nullptr;
  std::vector<std::string> params;
  std::set<std::string> closures;
  std::span<const Expr> body;
  std::vector<std::string> exports;
  ScopeInfo scope;
};

FoldPattern fold_pattern(const Project &p, const FunRef &ref) {
  FoldPattern fp;
  fp.fn = resolve_fun(p, ref);
  fp.file = &p.file(fp.fn.file);
  fp.def = &fp.file->ast.functions[fp.fn.function];
  if (fp.def->clauses.size() != 1)
    throw RefactorError("cannot fold against multi-clause function " +
                        ref.str());
  const Expr &cl = fp.def->clauses[0];
  for (const auto &pat : cl.patterns()) {
    if (!pat.is_var() || pat.text == "_" ||
        std::find(fp.params.begin(), fp.params.end(), pat.text) !=
            fp.params.end())
      throw RefactorError("fold target " + ref.str() +
                          " must have distinct variable parameters");
    fp.params.push_back(pat.text);
  }
  std::set<std::string> outer(fp.params.begin(), fp.params.end());
  auto full = cl.body();
  ScopeInfo whole = analyze_scope(full, outer);
  for (const auto &e : full)
    walk(e, [&](const Expr &n, bool) {
      if (n.kind == ExprKind::VarCall && n.children.size() == 1 &&
          whole.is_free(&n.children[0]) && outer.count(n.children[0].text))
        fp.closures.insert(n.children[0].text);
    });

  fp.body = full;
  if (full.size() >= 2) {
    const Expr &last = full.back();
    std::vector<const Expr *> vars;
    if (last.is_var())
      vars.push_back(&last);
    else if (last.kind == ExprKind::Tuple &&
             std::all_of(last.children.begin(), last.children.end(),
                         [](const Expr &c) { return c.is_var(); }))
      for (const auto &c : last.children)
        vars.push_back(&c);
    bool all_local = !vars.empty();
    for (const Expr *v : vars) {
      const auto *o = whole.at(v);
      all_local = all_local && o && o->binding >= 0 &&
                  std::binary_search(whole.top_level.begin(),
                                     whole.top_level.end(), o->binding);
    }
    if (all_local) {
      fp.body = full.subspan(0, full.size() - 1);
      for (const Expr *v : vars)
        fp.exports.push_back(v->text);
    }
  }
  fp.scope = analyze_scope(fp.body, outer);
  return fp;
}

// The body without its export expression, and, when that differs, the
// whole body (an instance that ends by returning the same value).
std::vector<FoldPattern> fold_patterns(const Project &p, const FunRef &ref) {
  std::vector<FoldPattern> out{fold_pattern(p, ref)};
  const FoldPattern &first = out.front();
  auto full = first.def->clauses[0].body();
  if (first.body.size() != full.size()) {
    FoldPattern whole = first;
    whole.body = full;
    whole.exports.clear();
    std::set<std::string> outer(whole.params.begin(), whole.params.end());
    whole.scope = analyze_scope(whole.body, outer);
    out.push_back(std::move(whole));
  }
  return out;
}

const FoldPattern *pattern_for(const std::vector<FoldPattern> &fps,
                               const SiteRef &s) {
  for (const auto &fp : fps)
    if (fp.body.size() == s.length)
      return &fp;
  return nullptr;
}

struct FoldMatch {
  bool instance = false;
  std::string reason; // empty when foldable
  std::vector<Expr> args;
  std::vector<std::string> export_vars;
};

class FoldMatcher {
public:
  FoldMatcher(const Project &p, const FoldPattern &fp, const SiteRef &site)
      : p_(p), fp_(fp), site_(site), in_(make_instance(p, site)),
        scope_(analyze_scope(in_.exprs, in_.outer)) {}

  FoldMatch run() {
    FoldMatch m;
    for (std::size_t k = 0; k < fp_.body.size(); ++k)
      if (!match(fp_.body[k], in_.exprs[k], false))
        return m;
    m.instance = true;
    for (const auto &name : fp_.params) {
      auto it = binds_.find(name);
      if (it == binds_.end()) {
        m.reason = "parameter " + name + " does not occur in the body";
        return m;
      }
      if (!closed_in(scope_, *it->second, in_.exports)) {
        m.reason = "actual for " + name +
                   " depends on bindings made inside the instance";
        return m;
      }
      if (in_pattern_.count(name) && has_defining(scope_, *it->second)) {
        m.reason = "actual for " + name + " binds variables";
        return m;
      }
      m.args.push_back(fp_.closures.count(name)
                           ? make_fun({}, {*it->second})
                           : *it->second);
    }
    // Exported bindings must be exactly the function's return values.
    std::set<std::string> site_exports;
    for (int b : scope_.top_level) {
      const Expr *def = scope_.definers[static_cast<std::size_t>(b)];
      if (!in_.exports.count(def->text))
        continue;
      auto it = back_.find(b);
      if (it == back_.end()) {
        m.reason = "exported variable " + def->text + " has no counterpart";
        return m;
      }
      site_exports.insert(
          fp_.scope.definers[static_cast<std::size_t>(it->second)]->text);
    }
    std::set<std::string> want(fp_.exports.begin(), fp_.exports.end());
    if (site_exports != want) {
      m.reason = "exported variables differ from the function's result";
      return m;
    }
    for (const auto &name : fp_.exports) {
      for (int b : fp_.scope.top_level)
        if (fp_.scope.definers[static_cast<std::size_t>(b)]->text == name) {
          int sb = fwd_.at(b);
          m.export_vars.push_back(
              scope_.definers[static_cast<std::size_t>(sb)]->text);
        }
    }
    return m;
  }

private:
  bool bind(const std::string &name, const Expr &b, bool in_pattern) {
    if (in_pattern)
      in_pattern_.insert(name);
    auto it = binds_.find(name);
    if (it != binds_.end())
      return *it->second == b;
    binds_.emplace(name, &b);
    return true;
  }

  bool match(const Expr &a, const Expr &b, bool in_pattern) {
    if (a.kind == ExprKind::VarCall && a.children.size() == 1 &&
        fp_.closures.count(a.children[0].text) &&
        fp_.scope.is_free(&a.children[0]))
      return bind(a.children[0].text, b, in_pattern);
    if (a.is_var()) {
      if (a.text == "_")
        return b.is_var() && b.text == "_";
      const auto *oa = fp_.scope.at(&a);
      if (oa->binding < 0) {
        if (std::find(fp_.params.begin(), fp_.params.end(), a.text) !=
            fp_.params.end()) {
          if (fp_.closures.count(a.text))
            return false;
          return bind(a.text, b, in_pattern);
        }
        return b.is_var() && b.text == a.text && scope_.is_free(&b);
      }
      if (!b.is_var() || b.text == "_")
        return false;
      const auto *ob = scope_.at(&b);
      if (ob->binding < 0 || ob->defining != oa->defining)
        return false;
      auto [it, fresh] = fwd_.emplace(oa->binding, ob->binding);
      if (!fresh && it->second != ob->binding)
        return false;
      auto [jt, fresh2] = back_.emplace(ob->binding, oa->binding);
      return fresh2 || jt->second == oa->binding;
    }
    if (is_call(a) && is_call(b)) {
      if (resolve_call(fp_.file->ast, a) !=
          resolve_call(p_.file(site_.file).ast, b))
        return false;
    } else {
      if (a.kind != b.kind || a.pattern_count != b.pattern_count)
        return false;
      if ((a.kind == ExprKind::Integer || a.kind == ExprKind::String ||
           a.kind == ExprKind::Atom || a.kind == ExprKind::BinOp) &&
          a.text != b.text)
        return false;
    }
    if (a.children.size() != b.children.size())
      return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
      if (!match(a.children[i], b.children[i],
                 in_pattern || child_is_pattern(a, i)))
        return false;
    return true;
  }

  const Project &p_;
  const FoldPattern &fp_;
  SiteRef site_;
  AuInstance in_;
  ScopeInfo scope_;
  std::map<std::string, const Expr *> binds_;
  std::set<std::string> in_pattern_;
  std::map<int, int> fwd_, back_;
};

template <typename Fn> void for_each_site(const Project &p, std::size_t len, Fn fn) {
  for (FileId f = 0; f < p.files.size(); ++f) {
    const auto &fns = p.file(f).ast.functions;
    for (std::uint32_t fi = 0; fi < fns.size(); ++fi)
      for (std::uint32_t ci = 0; ci < fns[fi].clauses.size(); ++ci) {
        auto n = fns[fi].clauses[ci].body().size();
        for (std::uint32_t s = 0; s + len <= n; ++s)
          fn(SiteRef{f, fi, ci, s, static_cast<std::uint32_t>(len)});
      }
  }
}

} // namespace

std::vector<SiteRef> fold_instances(const Project &p, const FunRef &target) {
  std::vector<SiteRef> out;
  for (const auto &fp : fold_patterns(p, target))
    for_each_site(p, fp.body.size(), [&](const SiteRef &s) {
      if (s.file == fp.fn.file && s.function == fp.fn.function)
        return;
      if (FoldMatcher(p, fp, s).run().instance)
        out.push_back(s);
    });
  std::sort(out.begin(), out.end());
  return out;
}

RefactorResult fold(const Project &p, const FunRef &target,
                    const std::vector<SiteRef> &selection) {
  auto fps = fold_patterns(p, target);
  auto instances = fold_instances(p, target);
  std::vector<SiteRef> chosen = selection;
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  for (const auto &s : chosen)
    if (!std::binary_search(instances.begin(), instances.end(), s))
      throw RefactorError("selection is not an instance of " + target.str() +
                          ": " + site_location(p, s));

  RefactorResult r;
  std::vector<SiteRef> applied;
  std::map<FileId, std::vector<TextEdit>> edits;
  for (const auto &s : chosen) {
    InstanceOutcome out{s, site_location(p, s), false, {}};
    if (std::any_of(applied.begin(), applied.end(),
                    [&](const SiteRef &a) { return a.overlaps(s); })) {
      out.reason = "overlaps an instance that is already folded";
      r.outcomes.push_back(std::move(out));
      continue;
    }
    const FoldPattern &fp = *pattern_for(fps, s);
    FoldMatch m = FoldMatcher(p, fp, s).run();
    if (!m.reason.empty()) {
      out.reason = m.reason;
      r.outcomes.push_back(std::move(out));
      continue;
    }
    const std::string &here = p.file(s.file).ast.name;
    Expr call = here == fp.file->ast.name
                    ? make_local_call(fp.def->name, std::move(m.args))
                    : make_remote_call(fp.file->ast.name, fp.def->name,
                                       std::move(m.args));
    if (!m.export_vars.empty())
      call = make_match(export_expr(m.export_vars), std::move(call));
    Span sp = site_span(p, s);
    edits[s.file].push_back(
        {sp.begin_offset, sp.end_offset,
         print(call, static_cast<int>(indent_of(sp)))});
    applied.push_back(s);
    out.applied = true;
    r.outcomes.push_back(std::move(out));
  }
  for (auto &[f, e] : edits)
    r.changes.push_back(make_change(p.file(f), std::move(e)));
  return r;
}

// ---------------------------------------------------------------- renames

namespace {

// Index of the token starting at `offset`.
std::size_t token_index(const ParsedFile &f, std::size_t offset) {
  auto it = std::lower_bound(f.tokens.begin(), f.tokens.end(), offset,
                             [](const Token &t, std::size_t off) {
                               return t.span.begin_offset < off;
                             });
  if (it == f.tokens.end() || it->span.begin_offset != offset)
    throw RefactorError("internal error: no token at offset " +
                        std::to_string(offset));
  return static_cast<std::size_t>(it - f.tokens.begin());
}

// Span of the callee name token of a call to the target.
const Token &callee_token(const ParsedFile &f, const Expr &call) {
  std::size_t i = token_index(f, call.span.begin_offset);
  return f.tokens.at(call.kind == ExprKind::RemoteCall ? i + 2 : i);
}

template <typename Fn>
void for_each_call(const Project &p, const std::string &module,
                   const std::string &name, std::size_t arity, Fn fn) {
  for (FileId f = 0; f < p.files.size(); ++f) {
    const ParsedFile &pf = p.file(f);
    for (const auto &def : pf.ast.functions)
      for (const auto &cl : def.clauses)
        walk(cl, [&](const Expr &e, bool) {
          if (e.children.size() != arity || e.text != name)
            return;
          bool hit = (e.kind == ExprKind::LocalCall && pf.ast.name == module &&
                      pf.ast.find(name, arity)) ||
                     (e.kind == ExprKind::RemoteCall && e.module == module);
          if (hit)
            fn(f, e);
        });
  }
}

} // namespace

RefactorResult rename_function(const Project &p, const FunRef &target,
                               const std::string &new_name) {
  ResolvedFun rf = resolve_fun(p, target);
  const ParsedFile &home = p.file(rf.file);
  const FunDef &def = home.ast.functions[rf.function];
  if (!is_valid_atom(new_name))
    throw RefactorError("not a valid function name: " + new_name);
  if (new_name == def.name)
    return {};
  check_new_function(home.ast, new_name, def.arity);

  std::map<FileId, std::vector<TextEdit>> edits;
  for (const auto &cl : def.clauses) {
    const Token &t = home.tokens.at(token_index(home, cl.span.begin_offset));
    edits[rf.file].push_back(
        {t.span.begin_offset, t.span.end_offset, new_name});
  }
  for_each_call(p, home.ast.name, def.name, def.arity,
                [&](FileId f, const Expr &call) {
                  const Token &t = callee_token(p.file(f), call);
                  edits[f].push_back(
                      {t.span.begin_offset, t.span.end_offset, new_name});
                });
  RefactorResult r;
  for (auto &[f, e] : edits)
    r.changes.push_back(make_change(p.file(f), std::move(e)));
  return r;
}

namespace {

const VarOccurrence &occurrence_at(const ParsedFile &f, Pos at) {
  for (const auto &[off, occ] : f.bindings.occurrences)
    if (occ.span.begin <= at && at < occ.span.end)
      return occ;
  throw RefactorError("no variable at " + std::to_string(at.line) + "." +
                      std::to_string(at.col));
}

const Expr &enclosing_clause(const ParsedFile &f, std::size_t offset) {
  for (const auto &def : f.ast.functions)
    for (const auto &cl : def.clauses)
      if (cl.span.begin_offset <= offset && offset < cl.span.end_offset)
        return cl;
  throw RefactorError("position is not inside a function");
}

} // namespace

RefactorResult rename_variable(const Project &p, const std::string &file,
                               Pos at, const std::string &new_name) {
  const ParsedFile &f = p.file(file_id(p, file));
  const VarOccurrence &occ = occurrence_at(f, at);
  if (!occ.defining())
    throw RefactorError("not a defining occurrence of " + occ.name);
  if (!is_valid_variable(new_name) || new_name == "_")
    throw RefactorError("not a valid variable name: " + new_name);
  if (new_name == occ.name)
    return {};
  std::vector<std::string> names;
  collect_variable_names(enclosing_clause(f, occ.span.begin_offset), names);
  if (std::find(names.begin(), names.end(), new_name) != names.end())
    throw RefactorError("variable " + new_name +
                        " is already used in this clause");
  std::vector<TextEdit> edits{
      {occ.span.begin_offset, occ.span.end_offset, new_name}};
  if (auto it = f.bindings.uses.find(occ.binding); it != f.bindings.uses.end())
    for (std::size_t u : it->second) {
      const VarOccurrence *o = f.bindings.at(u);
      edits.push_back({o->span.begin_offset, o->span.end_offset, new_name});
    }
  return single_change(f, std::move(edits));
}

std::vector<VariableInstance>
variable_instances(const Project &p, const std::string &file, Pos at) {
  const ParsedFile &f = p.file(file_id(p, file));
  const VarOccurrence &occ = occurrence_at(f, at);
  std::vector<VariableInstance> out;
  if (occ.binding == kFreeInFunction) {
    out.push_back({occ.span, false});
    return out;
  }
  const VarOccurrence *def = f.bindings.at(occ.binding);
  out.push_back({def->span, true});
  if (auto it = f.bindings.uses.find(occ.binding); it != f.bindings.uses.end())
    for (std::size_t u : it->second)
      out.push_back({f.bindings.at(u)->span, false});
  return out;
}

// ---------------------------------------------------------------- swap

namespace {

struct Region {
  std::size_t begin, end;
  std::size_t src_begin, src_end;
};

// Emits [begin, end) where every region shows its source's content; regions
// nest but never partially overlap.
std::string emit(const std::string &text, const std::vector<Region> &regions,
                 std::size_t begin, std::size_t end) {
  std::string out;
  std::size_t pos = begin;
  for (const auto &r : regions) {
    if (r.begin < pos || r.end > end || (r.begin == begin && r.end == end))
      continue;
    out += text.substr(pos, r.begin - pos);
    out += emit(text, regions, r.src_begin, r.src_end);
    pos = r.end;
  }
  out += text.substr(pos, end - pos);
  return out;
}

} // namespace

RefactorResult swap_arguments(const Project &p, const FunRef &target,
                              std::size_t i, std::size_t j) {
  ResolvedFun rf = resolve_fun(p, target);
  const ParsedFile &home = p.file(rf.file);
  const FunDef &def = home.ast.functions[rf.function];
  if (i < 1 || j < 1 || i > def.arity || j > def.arity)
    throw RefactorError("argument positions out of range for " + def.name +
                        "/" + std::to_string(def.arity));
  if (i == j)
    return {};
  if (i > j)
    std::swap(i, j);
  std::map<FileId, std::vector<Region>> regions;
  auto add = [&](FileId f, const Span &a, const Span &b) {
    regions[f].push_back(
        {a.begin_offset, a.end_offset, b.begin_offset, b.end_offset});
    regions[f].push_back(
        {b.begin_offset, b.end_offset, a.begin_offset, a.end_offset});
  };
  for (const auto &cl : def.clauses)
    add(rf.file, cl.children[i - 1].span, cl.children[j - 1].span);
  for_each_call(p, home.ast.name, def.name, def.arity,
                [&](FileId f, const Expr &call) {
                  add(f, call.children[i - 1].span, call.children[j - 1].span);
                });
  RefactorResult r;
  for (auto &[f, regs] : regions) {
    std::sort(regs.begin(), regs.end(), [](const Region &a, const Region &b) {
      return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
    });
    const ParsedFile &pf = p.file(f);
    // Only outermost regions are edits; nested ones are handled by emit().
    std::vector<TextEdit> edits;
    std::size_t covered = 0;
    for (const auto &reg : regs) {
      if (reg.begin < covered)
        continue;
      edits.push_back({reg.begin, reg.end,
                       emit(pf.text, regs, reg.src_begin, reg.src_end)});
      covered = reg.end;
    }
    r.changes.push_back(make_change(pf, std::move(edits)));
  }
  return r;
}

// ---------------------------------------------------------------- inline

namespace {

struct InlineSubst {
  const ScopeInfo &scope;
  const std::map<std::string, Expr> &actuals;
  const std::map<int, std::string> &renames;

  Expr run(const Expr &e) const {
    if (e.kind == ExprKind::VarCall && e.children.size() == 1) {
      const Expr &callee = e.children[0];
      if (scope.is_free(&callee)) {
        auto it = actuals.find(callee.text);
        if (it != actuals.end() && it->second.kind == ExprKind::Fun &&
            it->second.children[0].pattern_count == 0) {
          auto body = it->second.children[0].body();
          if (body.size() != 1)
            throw RefactorError(
                "closure argument has more than one expression");
          return body[0];
        }
      }
    }
    if (e.is_var()) {
      const auto *o = scope.at(&e);
      if (o && o->binding < 0) {
        auto it = actuals.find(e.text);
        if (it != actuals.end())
          return it->second;
      } else if (o) {
        auto it = renames.find(o->binding);
        if (it != renames.end()) {
          Expr v = e;
          v.text = it->second;
          return v;
        }
      }
      return e;
    }
    Expr out = e;
    out.children.clear();
    for (const auto &c : e.children)
      out.children.push_back(run(c));
    return out;
  }
};

} // namespace

RefactorResult inline_call(const Project &p, const std::string &file, Pos at) {
  FileId fid = file_id(p, file);
  const ParsedFile &f = p.file(fid);
  const Expr *site = nullptr;
  const Expr *clause = nullptr;
  for (const auto &def : f.ast.functions)
    for (const auto &cl : def.clauses)
      for (const auto &e : cl.body())
        if (e.span.begin <= at && at < e.span.end) {
          site = &e;
          clause = &cl;
        }
  if (!site)
    throw RefactorError("no body expression at the given position");
  const Expr *call = site;
  const Expr *pattern = nullptr;
  if (site->kind == ExprKind::Match) {
    pattern = &site->children[0];
    call = &site->children[1];
  }
  if (!is_call(*call))
    throw RefactorError("not a call: only top-level calls or matches on a "
                        "call can be inlined");
  CallTarget t = resolve_call(f.ast, *call);
  auto mid = p.find_module(t.module);
  const FunDef *callee = mid ? p.file(*mid).ast.find(t.name, t.arity) : nullptr;
  if (!callee)
    throw RefactorError("callee " + t.module + ":" + t.name + "/" +
                        std::to_string(t.arity) + " is not defined in the project");
  if (callee->clauses.size() != 1)
    throw RefactorError("cannot inline multi-clause function " + t.name);
  const Expr &cl = callee->clauses[0];
  std::vector<std::string> params;
  std::map<std::string, Expr> actuals;
  for (std::size_t k = 0; k < cl.pattern_count; ++k) {
    const Expr &pat = cl.children[k];
    if (!pat.is_var() || pat.text == "_" || actuals.count(pat.text))
      throw RefactorError("cannot inline " + t.name +
                          ": parameters must be distinct variables");
    params.push_back(pat.text);
    actuals.emplace(pat.text, call->children[k]);
  }
  auto body = cl.body();
  std::set<std::string> outer(params.begin(), params.end());
  ScopeInfo scope = analyze_scope(body, outer);

  // Distribute a final export tuple over the site's pattern.
  std::map<int, std::string> renames;
  bool distribute = false;
  if (pattern && body.size() >= 2) {
    const Expr &last = body.back();
    std::vector<const Expr *> lhs, rhs;
    if (pattern->is_var() && last.is_var()) {
      lhs.push_back(pattern);
      rhs.push_back(&last);
    } else if (pattern->kind == ExprKind::Tuple &&
               last.kind == ExprKind::Tuple &&
               pattern->children.size() == last.children.size()) {
      for (std::size_t k = 0; k < last.children.size(); ++k) {
        lhs.push_back(&pattern->children[k]);
        rhs.push_back(&last.children[k]);
      }
    }
    distribute = !lhs.empty();
    std::set<int> seen;
    for (std::size_t k = 0; k < lhs.size() && distribute; ++k) {
      const auto *o = scope.at(rhs[k]);
      const VarOccurrence *so = lhs[k]->is_var() ? f.bindings.of(*lhs[k]) : nullptr;
      distribute = rhs[k]->is_var() && lhs[k]->is_var() && o && o->binding >= 0 &&
                   std::binary_search(scope.top_level.begin(),
                                      scope.top_level.end(), o->binding) &&
                   so && so->defining() && lhs[k]->text != "_" &&
                   seen.insert(o->binding).second;
      if (distribute)
        renames[o->binding] = lhs[k]->text;
    }
    if (!distribute)
      renames.clear();
  }

  // Freshen callee binders that would clash at the call site.
  std::set<std::string> avoid;
  {
    std::vector<std::string> names;
    collect_variable_names(*clause, names);
    avoid.insert(names.begin(), names.end());
    for (const auto &[n, a] : actuals) {
      auto fv = free_variables(std::span<const Expr>(&a, 1));
      avoid.insert(fv.begin(), fv.end());
    }
    for (const auto &e : body) {
      std::vector<std::string> own;
      collect_variable_names(e, own);
      for (const auto &n : own)
        avoid.insert(n);
    }
  }
  std::set<std::string> clash;
  {
    std::vector<std::string> names;
    collect_variable_names(*clause, names);
    clash.insert(names.begin(), names.end());
    for (const auto &[n, a] : actuals) {
      auto fv = free_variables(std::span<const Expr>(&a, 1));
      clash.insert(fv.begin(), fv.end());
    }
  }
  for (std::size_t b = 0; b < scope.definers.size(); ++b) {
    const std::string &name = scope.definers[b]->text;
    if (name == "_" || renames.count(static_cast<int>(b)) || !clash.count(name))
      continue;
    std::string fresh = fresh_name(name, avoid);
    avoid.insert(fresh);
    renames[static_cast<int>(b)] = fresh;
  }

  InlineSubst subst{scope, actuals, renames};
  std::vector<Expr> out;
  std::size_t keep = distribute ? body.size() - 1 : body.size();
  for (std::size_t k = 0; k < keep; ++k)
    out.push_back(subst.run(body[k]));
  if (pattern && !distribute)
    out.back() = make_match(*pattern, std::move(out.back()));

  std::size_t indent = indent_of(site->span);
  std::string text = print_sequence(out, static_cast<int>(indent));
  text.erase(0, indent);
  return single_change(f, {{site->span.begin_offset, site->span.end_offset, text}});
}

// ---------------------------------------------------------------- extract

RefactorResult extract_function(const Project &p, const SiteRef &selection,
                                const std::string &name) {
  const ParsedFile &f = p.file(selection.file);
  AuInstance in = make_instance(p, selection);
  std::vector<std::string> params(in.outer.begin(), in.outer.end());
  std::sort(params.begin(), params.end(),
            [&](const std::string &a, const std::string &b) {
              return std::make_pair(in.declared[a], a) <
                     std::make_pair(in.declared[b], b);
            });
  check_new_function(f.ast, name, params.size());

  // Exports in declaration order.
  std::vector<std::pair<std::size_t, std::string>> ordered;
  for (const auto &e : in.exprs)
    walk(e, [&](const Expr &n, bool) {
      if (!n.is_var() || !in.exports.count(n.text))
        return;
      const VarOccurrence *o = f.bindings.of(n);
      if (o && o->defining())
        ordered.emplace_back(n.span.begin_offset, n.text);
    });
  std::sort(ordered.begin(), ordered.end());
  std::vector<std::string> exports;
  for (const auto &[off, n] : ordered)
    if (std::find(exports.begin(), exports.end(), n) == exports.end())
      exports.push_back(n);

  std::vector<Expr> body(in.exprs.begin(), in.exprs.end());
  if (!exports.empty())
    body.push_back(export_expr(exports));
  std::vector<Expr> pats, args;
  for (const auto &n : params) {
    pats.push_back(make_var(n));
    args.push_back(make_var(n));
  }
  FunDef def;
  def.name = name;
  def.arity = params.size();
  def.clauses.push_back(make_clause(std::move(pats), std::move(body)));

  Expr call = make_local_call(name, std::move(args));
  if (!exports.empty())
    call = make_match(export_expr(exports), std::move(call));
  Span sp = site_span(p, selection);
  const FunDef &host = f.ast.functions.at(selection.function);
  return single_change(
      f, {{sp.begin_offset, sp.end_offset,
           print(call, static_cast<int>(indent_of(sp)))},
          {host.span.end_offset, host.span.end_offset, "\n\n" + print(def)}});
}

// ---------------------------------------------------------------- eliminate

FunDef edit_params(const FunDef &def, const ParamEdit &edit) {
  if (def.clauses.size() != 1)
    throw RefactorError("expected a single-clause function");
  FunDef out = def;
  Expr &cl = out.clauses[0];
  std::vector<std::string> params;
  for (const auto &pat : cl.patterns()) {
    if (!pat.is_var())
      throw RefactorError("parameters must be variables");
    params.push_back(pat.text);
  }
  std::vector<std::string> names;
  collect_variable_names(cl, names);
  std::set<std::string> taken(names.begin(), names.end());
  for (const auto &[from, to] : edit.rename) {
    if (std::find(params.begin(), params.end(), from) == params.end())
      throw RefactorError("no parameter named " + from);
    taken.erase(from);
  }
  std::set<std::string> fresh;
  for (const auto &[from, to] : edit.rename) {
    if (!is_valid_variable(to) || to == "_")
      throw RefactorError("not a valid variable name: " + to);
    if (taken.count(to) || !fresh.insert(to).second)
      throw RefactorError("parameter name " + to + " is already in use");
  }

  std::set<std::string> outer(params.begin(), params.end());
  ScopeInfo scope = analyze_scope(cl.body(), outer);
  std::vector<Expr *> free_vars;
  for (std::size_t k = cl.pattern_count; k < cl.children.size(); ++k)
    walk_mutable(cl.children[k], [&](Expr &n, bool) {
      if (n.is_var() && scope.is_free(&n))
        free_vars.push_back(&n);
    });
  for (Expr *v : free_vars)
    if (auto it = edit.rename.find(v->text); it != edit.rename.end())
      v->text = it->second;
  for (std::size_t k = 0; k < cl.pattern_count; ++k)
    if (auto it = edit.rename.find(cl.children[k].text);
        it != edit.rename.end())
      cl.children[k].text = it->second;

  if (!edit.order.empty()) {
    std::vector<Expr> pats(cl.children.begin(),
                           cl.children.begin() +
                               static_cast<std::ptrdiff_t>(cl.pattern_count));
    if (edit.order.size() != pats.size())
      throw RefactorError("parameter order must list every parameter once");
    for (std::size_t k = 0; k < pats.size(); ++k) {
      auto it = std::find_if(pats.begin(), pats.end(), [&](const Expr &e) {
        return e.text == edit.order[k];
      });
      if (it == pats.end() ||
          std::count(edit.order.begin(), edit.order.end(), edit.order[k]) != 1)
        throw RefactorError("parameter order must list every parameter once");
      cl.children[k] = *it;
    }
  }
  return out;
}

RefactorResult compose(const Project &p, const RefactorResult &first,
                       const RefactorResult &second) {
  RefactorResult r;
  for (const auto &f : p.files) {
    std::optional<std::string> after;
    for (const auto &c : first.changes)
      if (c.path == f->path)
        after = c.after;
    for (const auto &c : second.changes)
      if (c.path == f->path)
        after = c.after;
    if (after && *after != f->text)
      r.changes.push_back({f->path, f->text, *after});
  }
  r.outcomes = second.outcomes;
  return r;
}

RefactorResult eliminate(const Project &p, const CloneClass &c,
                         const EliminateOptions &opts,
                         const EffectTable &effects) {
  std::string module = opts.module.empty()
                           ? p.file(c.instances.front().site.file).ast.name
                           : opts.module;
  FunDef def = edit_params(generalise(p, c, effects, opts.name).def,
                           opts.params);
  RefactorResult pasted = add_function(p, module, def);
  Project next = build_project(pasted.sources(p));
  if (!next.errors.empty())
    throw RefactorError("pasting the generalisation produced invalid code");
  std::vector<SiteRef> chosen;
  if (opts.instances.empty()) {
    chosen = c.sites();
  } else {
    for (std::size_t i : opts.instances) {
      if (i >= c.instances.size())
        throw RefactorError("instance index out of range: " +
                            std::to_string(i));
      chosen.push_back(c.instances[i].site);
    }
  }
  RefactorResult folded =
      fold(next, FunRef{module, def.name, def.arity}, chosen);
  return compose(p, pasted, folded);
}

// ---------------------------------------------------------------- writing

void check_writable(const RefactorResult &r) {
  for (const auto &c : r.changes) {
    std::error_code ec;
    auto st = fs::status(c.path, ec);
    if (ec || !fs::exists(st))
      throw ReadOnlyError(c.path);
    auto perms = st.permissions();
    if ((perms & (fs::perms::owner_write | fs::perms::group_write |
                  fs::perms::others_write)) == fs::perms::none)
      throw ReadOnlyError(c.path);
    std::ofstream probe(c.path, std::ios::app);
    if (!probe)
      throw ReadOnlyError(c.path);
  }
}

void write_changes(const RefactorResult &r) {
  check_writable(r);
  for (const auto &c : r.changes) {
    fs::path target(c.path);
    fs::path tmp = target;
    tmp += ".clonewright.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << c.after;
      if (!out)
        throw RefactorError("cannot write " + tmp.string());
    }
    std::error_code ec;
    auto perms = fs::status(target, ec).permissions();
    fs::rename(tmp, target);
    if (!ec)
      fs::permissions(target, perms, ec);
  }
}

} // namespace clonewright
