#include "clonewright/propex.hpp"

#include <algorithm>
#include <map>

#include "clonewright/printer.hpp"

namespace clonewright {

ActualTable collect_actuals(const Project &p, const FunRef &fun) {
  ResolvedFun rf = resolve_fun(p, fun);
  const ModuleAst &home = p.file(rf.file).ast;
  const FunDef &def = home.functions[rf.function];
  ActualTable t;
  t.module = home.name;
  t.function = def.name;
  for (std::size_t k = 0; k < def.arity; ++k) {
    const Expr &pat = def.clauses[0].children[k];
    t.params.push_back(pat.is_var() && pat.text != "_"
                           ? pat.text
                           : "P" + std::to_string(k + 1));
  }
  CallTarget want{home.name, def.name, def.arity};
  for (const auto &file : p.files)
    for (const auto &f : file->ast.functions)
      for (const auto &cl : f.clauses)
        walk(cl, [&](const Expr &e, bool) {
          if ((e.kind == ExprKind::LocalCall ||
               e.kind == ExprKind::RemoteCall) &&
              resolve_call(file->ast, e) == want) {
            t.rows.emplace_back(e.children.begin(), e.children.end());
            t.locations.push_back(file->path + ":" + format_span(e.span));
          }
        });
  if (t.rows.empty())
    throw RefactorError("no calls to " + fun.str());
  t.fixed.assign(def.arity, false);
  if (t.rows.size() >= 2)
    for (std::size_t k = 0; k < def.arity; ++k)
      t.fixed[k] = std::all_of(t.rows.begin(), t.rows.end(),
                               [&](const auto &r) { return r[k] == t.rows[0][k]; });
  return t;
}

namespace {

Expr nat() { return make_local_call("nat", {}); }

bool is_nat(const Expr &e) {
  return e.kind == ExprKind::LocalCall && e.text == "nat" && e.children.empty();
}

Expr generalize(const Expr &e) {
  if (e.kind == ExprKind::Integer)
    return nat();
  Expr out = e;
  for (auto &c : out.children)
    c = generalize(c);
  return out;
}

bool in_support(const Expr &alt, const Expr &v) {
  if (is_nat(alt))
    return v.kind == ExprKind::Integer && !v.text.empty() && v.text[0] != '-';
  if (alt.kind != v.kind || alt.text != v.text || alt.module != v.module ||
      alt.children.size() != v.children.size())
    return false;
  for (std::size_t i = 0; i < alt.children.size(); ++i)
    if (!in_support(alt.children[i], v.children[i]))
      return false;
  return true;
}

void push_distinct(std::vector<Expr> &alts, Expr e) {
  if (std::find(alts.begin(), alts.end(), e) == alts.end())
    alts.push_back(std::move(e));
}

std::size_t levenshtein(const std::string &a, const std::string &b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j)
    row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

// Two positions are correlated when each value of one always appears with
// the same value of the other and some value actually repeats.
bool correlated(const ActualTable &t, std::size_t a, std::size_t b) {
  std::vector<std::pair<Expr, Expr>> seen;
  bool repeats = false;
  for (const auto &r : t.rows) {
    bool match = false;
    for (const auto &[x, y] : seen) {
      bool ex = x == r[a], ey = y == r[b];
      if (ex != ey)
        return false;
      match = match || ex;
    }
    if (match)
      repeats = true;
    else
      seen.emplace_back(r[a], r[b]);
  }
  return repeats && seen.size() > 1;
}

} // namespace

Expr Generator::expr() const {
  if (alternatives.size() == 1)
    return alternatives[0];
  return make_local_call("oneof", {make_list(alternatives)});
}

std::string Generator::text() const { return print(expr()); }

bool Generator::covers(const Expr &value) const {
  return std::any_of(alternatives.begin(), alternatives.end(),
                     [&](const Expr &a) { return in_support(a, value); });
}

std::vector<Generator> synthesize_generators(const ActualTable &t,
                                             bool generalize_literals) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> grouped(t.params.size(), false);
  for (std::size_t k = 0; k < t.params.size(); ++k) {
    if (t.fixed[k] || grouped[k])
      continue;
    std::vector<std::size_t> g{k};
    for (std::size_t j = k + 1; j < t.params.size(); ++j)
      if (!t.fixed[j] && !grouped[j] && correlated(t, k, j)) {
        g.push_back(j);
        grouped[j] = true;
      }
    groups.push_back(std::move(g));
  }

  std::vector<Generator> gens;
  for (const auto &g : groups) {
    Generator gen;
    gen.params = g;
    bool all_int = true;
    for (const auto &r : t.rows)
      for (std::size_t k : g)
        all_int = all_int && r[k].kind == ExprKind::Integer;
    for (const auto &r : t.rows) {
      std::vector<Expr> vals;
      for (std::size_t k : g)
        vals.push_back(generalize_literals ? generalize(r[k]) : r[k]);
      push_distinct(gen.alternatives,
                    vals.size() == 1 ? vals[0] : make_tuple(std::move(vals)));
    }
    if (generalize_literals && all_int && g.size() == 1)
      gen.alternatives = {nat()};
    gens.push_back(std::move(gen));
  }
  return gens;
}

std::vector<std::string> lint_generators(const ActualTable &t,
                                         const std::vector<Generator> &gens) {
  std::vector<std::string> out;
  for (const auto &g : gens) {
    std::vector<std::string> strings;
    for (const auto &a : g.alternatives)
      if (a.kind == ExprKind::String)
        strings.push_back(a.text);
    for (std::size_t i = 0; i < strings.size(); ++i)
      for (std::size_t j = i + 1; j < strings.size(); ++j) {
        std::size_t d = levenshtein(strings[i], strings[j]);
        std::size_t limit =
            std::max<std::size_t>(2, std::max(strings[i].size(),
                                              strings[j].size()) / 10);
        if (d <= limit)
          out.push_back("parameter " + t.params[g.params[0]] +
                        ": near-identical alternatives " + strings[i] +
                        " and " + strings[j]);
      }
  }
  return out;
}

PropertySketch emit_property(const ActualTable &t,
                             std::vector<Generator> generators) {
  PropertySketch s;
  s.name = "prop_" + t.function;
  s.generators = std::move(generators);
  for (const auto &g : s.generators) {
    if (g.params.size() == 1) {
      s.binding.push_back(t.params[g.params[0]]);
      continue;
    }
    std::string b = "{";
    for (std::size_t i = 0; i < g.params.size(); ++i)
      b += (i ? ", " : "") + t.params[g.params[i]];
    s.binding.push_back(b + "}");
  }
  std::string args;
  for (std::size_t k = 0; k < t.params.size(); ++k) {
    if (k)
      args += ", ";
    args += t.fixed[k] ? print(t.rows[0][k]) : t.params[k];
  }
  s.body = t.function + "(" + args + ")";

  std::string binding, gens;
  const std::string gen_indent(10, ' ');
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    binding += (i ? ", " : "") + s.binding[i];
    if (i)
      gens += ",\n" + gen_indent;
    gens += print(s.generators[i].expr(), static_cast<int>(gen_indent.size()));
  }
  s.text = s.name + "() ->\n  FORALL({" + binding + "},\n         {" + gens +
           "},\n         " + s.body + ").\n";
  return s;
}

PropertySketch extract_property(const Project &p, const FunRef &fun,
                                bool generalize_literals) {
  ActualTable t = collect_actuals(p, fun);
  auto gens = synthesize_generators(t, generalize_literals);
  auto warnings = lint_generators(t, gens);
  PropertySketch s = emit_property(t, std::move(gens));
  s.warnings = std::move(warnings);
  if (!s.warnings.empty()) {
    std::string head;
    for (const auto &w : s.warnings)
      head += "% warning: " + w + "\n";
    s.text = head + s.text;
  }
  return s;
}

std::string props_file_name(const std::string &module) {
  return module + "_props.mel.txt";
}

} // namespace clonewright
