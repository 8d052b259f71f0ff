#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "clonewright/printer.hpp"

namespace clonewright::testing {

CanonicalTemplate canonical(const Template &t,
                            const std::vector<Substitution> &subs,
                            double similarity) {
  std::map<std::string, std::size_t> rank;
  std::vector<Expr> body = t.body;
  for (auto &e : body)
    walk_mutable(e, [&](Expr &n, bool) {
      if (!n.is_var() || n.text == "_")
        return;
      auto it = rank.find(n.text);
      if (it == rank.end())
        it = rank.emplace(n.text, rank.size() + 1).first;
      n.text = "V" + std::to_string(it->second);
    });
  CanonicalTemplate c;
  c.body = print_sequence(body, 0);
  std::vector<std::size_t> order(t.params.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    order[k] = k;
  auto rank_of = [&](std::size_t k) {
    auto it = rank.find(t.params[k]);
    return it == rank.end() ? std::size_t(-1) : it->second;
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rank_of(a) < rank_of(b); });
  for (const auto &s : subs) {
    std::vector<std::string> row;
    for (std::size_t k : order)
      row.push_back(k < s.size() ? print(s[k]) : "?");
    c.actuals.push_back(std::move(row));
  }
  c.new_params = t.new_params();
  c.total_params = t.params.size();
  c.similarity = similarity;
  return c;
}

CanonicalTemplate canonical(const CloneClass &cls) {
  std::vector<Substitution> subs;
  for (const auto &i : cls.instances)
    subs.push_back(i.actuals);
  return canonical(cls.tmpl, subs, cls.similarity);
}

namespace {

struct Inst {
  const ParsedFile *file = nullptr;
  Span span;
  std::vector<const Expr *> exprs;
};

std::size_t count_nodes(const Expr &e) {
  std::size_t n = e.kind == ExprKind::Clause ? 0 : 1;
  for (const auto &c : e.children)
    n += count_nodes(c);
  return n;
}

bool call_kind(const Expr &e) {
  return e.kind == ExprKind::LocalCall || e.kind == ExprKind::RemoteCall;
}

std::string label(const Expr &e, const ModuleAst &m) {
  std::string shape = std::to_string(e.children.size()) + "/" +
                      std::to_string(e.pattern_count);
  if (call_kind(e)) {
    CallTarget t = resolve_call(m, e);
    return "call " + t.module + ":" + t.name + "/" + std::to_string(t.arity);
  }
  std::string l = std::string(to_string(e.kind)) + " " + shape;
  switch (e.kind) {
  case ExprKind::Integer:
  case ExprKind::String:
  case ExprKind::Atom:
  case ExprKind::BinOp:
    l += " " + e.text;
    break;
  case ExprKind::Fun:
  case ExprKind::Case:
    for (const auto &c : e.children)
      if (c.kind == ExprKind::Clause)
        l += " [" + std::to_string(c.children.size()) + "/" +
             std::to_string(c.pattern_count) + "]";
    break;
  default:
    break;
  }
  return l;
}

class Lgg {
public:
  explicit Lgg(std::vector<Inst> in) : in_(std::move(in)) {
    claimed_.resize(in_.size());
    free_claimed_.resize(in_.size());
  }

  std::optional<CanonicalTemplate> run() {
    std::size_t len = in_[0].exprs.size();
    std::vector<Expr> body;
    for (std::size_t k = 0; k < len; ++k) {
      std::vector<const Expr *> nodes;
      for (const auto &i : in_)
        nodes.push_back(i.exprs[k]);
      body.push_back(gen(nodes, false));
      if (failed_)
        return std::nullopt;
    }
    bool concrete = false;
    for (const auto &e : body)
      walk(e, [&](const Expr &n, bool) {
        if (!(n.is_var() && n.text.rfind("Hole@", 0) == 0))
          concrete = true;
      });
    if (!concrete)
      return std::nullopt;

    // Exported bindings must correspond across instances.
    std::set<std::vector<std::size_t>> first;
    for (std::size_t i = 0; i < in_.size(); ++i) {
      std::set<std::vector<std::size_t>> mine;
      for (const auto &[off, occ] : in_[i].file->bindings.occurrences) {
        if (!occ.defining() || off < in_[i].span.begin_offset ||
            off >= in_[i].span.end_offset)
          continue;
        auto uses = in_[i].file->bindings.uses.find(off);
        if (uses == in_[i].file->bindings.uses.end())
          continue;
        bool exported = std::any_of(
            uses->second.begin(), uses->second.end(),
            [&](std::size_t u) { return u >= in_[i].span.end_offset; });
        if (!exported)
          continue;
        auto it = std::find_if(local_keys_.begin(), local_keys_.end(),
                               [&](const auto &k) { return k[i] == off; });
        if (it == local_keys_.end())
          return std::nullopt;
        mine.insert(*it);
      }
      if (i == 0)
        first = mine;
      else if (mine != first)
        return std::nullopt;
    }

    Template t;
    std::vector<Substitution> subs(in_.size());
    for (const auto &names : frees_) {
      t.params.push_back(names[0]);
      for (std::size_t i = 0; i < in_.size(); ++i)
        subs[i].push_back(make_var(names[i]));
    }
    t.free_params = t.params.size();
    for (std::size_t h = 0; h < hole_nodes_.size(); ++h) {
      t.params.push_back("Hole@" + std::to_string(h));
      for (std::size_t i = 0; i < in_.size(); ++i)
        subs[i].push_back(*hole_nodes_[h][i]);
    }
    t.body = body;

    double tsize = 0;
    for (const auto &e : body)
      tsize += static_cast<double>(count_nodes(e));
    double sim = 1.0;
    for (const auto &i : in_) {
      double n = 0;
      for (const Expr *e : i.exprs)
        n += static_cast<double>(count_nodes(*e));
      sim = std::min(sim, tsize / n);
    }
    return canonical(t, subs, sim);
  }

private:
  const VarOccurrence *occ(std::size_t i, const Expr &v) const {
    return in_[i].file->bindings.of(v);
  }

  bool local(std::size_t i, const VarOccurrence &o) const {
    return o.binding != kFreeInFunction &&
           o.binding >= in_[i].span.begin_offset &&
           o.binding < in_[i].span.end_offset;
  }

  bool inside(const Expr &node, std::size_t offset) const {
    return offset >= node.span.begin_offset && offset < node.span.end_offset;
  }

  bool closed(std::size_t i, const Expr &node) const {
    bool ok = true;
    walk(node, [&](const Expr &n, bool) {
      if (!ok || !n.is_var() || n.text == "_")
        return;
      const VarOccurrence *o = occ(i, n);
      if (!o || !local(i, *o))
        return;
      if (!inside(node, o->binding)) {
        ok = false;
        return;
      }
      if (o->defining()) {
        auto uses = in_[i].file->bindings.uses.find(o->binding);
        if (uses != in_[i].file->bindings.uses.end())
          for (std::size_t u : uses->second)
            if (!inside(node, u))
              ok = false;
      }
    });
    return ok;
  }

  Expr hole(const std::vector<const Expr *> &nodes, bool in_pattern) {
    if (in_pattern) {
      failed_ = true;
      return {};
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!closed(i, *nodes[i])) {
        failed_ = true;
        return {};
      }
    std::vector<std::string> key;
    for (const Expr *n : nodes)
      key.push_back(print(*n));
    auto it = holes_.find(key);
    if (it == holes_.end()) {
      it = holes_.emplace(key, hole_nodes_.size()).first;
      hole_nodes_.push_back(nodes);
    }
    return make_var("Hole@" + std::to_string(it->second));
  }

  Expr gen_var(const std::vector<const Expr *> &nodes, bool in_pattern) {
    std::size_t wild = 0;
    for (const Expr *n : nodes)
      wild += n->text == "_";
    if (wild == nodes.size())
      return make_var("_");
    if (wild)
      return hole(nodes, in_pattern);
    std::vector<const VarOccurrence *> os;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      os.push_back(occ(i, *nodes[i]));
    std::size_t locals = 0;
    for (std::size_t i = 0; i < os.size(); ++i)
      locals += local(i, *os[i]);
    if (locals == nodes.size()) {
      for (const auto *o : os)
        if (o->defining() != os[0]->defining())
          return hole(nodes, in_pattern);
      std::vector<std::size_t> key;
      for (const auto *o : os)
        key.push_back(o->binding);
      auto it = std::find(local_keys_.begin(), local_keys_.end(), key);
      if (it == local_keys_.end()) {
        for (std::size_t i = 0; i < key.size(); ++i)
          if (claimed_[i].count(key[i]))
            return hole(nodes, in_pattern);
        local_keys_.push_back(key);
        for (std::size_t i = 0; i < key.size(); ++i)
          claimed_[i].insert(key[i]);
      }
      return make_var(nodes[0]->text);
    }
    if (locals == 0) {
      std::vector<std::string> key;
      for (const Expr *n : nodes)
        key.push_back(n->text);
      if (std::find(frees_.begin(), frees_.end(), key) == frees_.end()) {
        for (std::size_t i = 0; i < key.size(); ++i)
          if (free_claimed_[i].count(key[i]))
            return hole(nodes, in_pattern);
        frees_.push_back(key);
        for (std::size_t i = 0; i < key.size(); ++i)
          free_claimed_[i].insert(key[i]);
      }
      return make_var(nodes[0]->text);
    }
    return hole(nodes, in_pattern);
  }

  Expr gen(const std::vector<const Expr *> &nodes, bool in_pattern) {
    if (std::all_of(nodes.begin(), nodes.end(),
                    [](const Expr *n) { return n->is_var(); }))
      return gen_var(nodes, in_pattern);
    std::string l = label(*nodes[0], in_[0].file->ast);
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (label(*nodes[i], in_[i].file->ast) != l)
        return hole(nodes, in_pattern);
    Expr out = *nodes[0];
    out.children.clear();
    for (std::size_t c = 0; c < nodes[0]->children.size(); ++c) {
      std::vector<const Expr *> kids;
      for (const Expr *n : nodes)
        kids.push_back(&n->children[c]);
      out.children.push_back(
          gen(kids, in_pattern || child_is_pattern(*nodes[0], c)));
      if (failed_)
        return {};
    }
    return out;
  }

  std::vector<Inst> in_;
  bool failed_ = false;
  std::vector<std::vector<std::size_t>> local_keys_;
  std::vector<std::set<std::size_t>> claimed_;
  std::vector<std::vector<std::string>> frees_;
  std::vector<std::set<std::string>> free_claimed_;
  std::map<std::vector<std::string>, std::size_t> holes_;
  std::vector<std::vector<const Expr *>> hole_nodes_;
};

Inst make_inst(const Project &p, const SiteRef &s) {
  Inst in;
  in.file = &p.file(s.file);
  const Expr &cl = in.file->ast.functions.at(s.function).clauses.at(s.clause);
  auto body = cl.body();
  for (std::uint32_t k = s.start; k < s.start + s.length; ++k)
    in.exprs.push_back(&body[k]);
  in.span = in.exprs.front()->span;
  in.span.end = in.exprs.back()->span.end;
  in.span.end_offset = in.exprs.back()->span.end_offset;
  return in;
}

std::vector<std::string> scan_tokens(const ParsedFile &f, const Expr &e) {
  std::vector<std::string> out;
  for (const auto &t : f.tokens) {
    if (t.span.begin_offset < e.span.begin_offset ||
        t.span.begin_offset >= e.span.end_offset)
      continue;
    switch (t.kind) {
    case TokenKind::Variable:
      out.push_back("$var");
      break;
    case TokenKind::Integer:
      out.push_back("$int");
      break;
    case TokenKind::String:
      out.push_back("$str");
      break;
    default:
      out.push_back(std::to_string(static_cast<int>(t.kind)) + t.lexeme);
    }
  }
  return out;
}

// Keyed by node address; only valid while the project is alive, so the
// caches are reset for every oracle_detect call.
std::map<const Expr *, std::vector<std::string>> g_norm;

const std::vector<std::string> &norm_tokens(const ParsedFile &f, const Expr &e) {
  auto it = g_norm.find(&e);
  if (it == g_norm.end())
    it = g_norm.emplace(&e, scan_tokens(f, e)).first;
  return it->second;
}

std::size_t token_count(const Project &p, const SiteRef &s) {
  Inst in = make_inst(p, s);
  std::size_t n = 0;
  for (const Expr *e : in.exprs)
    n += norm_tokens(*in.file, *e).size();
  return n;
}

bool same_body(const SiteRef &a, const SiteRef &b) {
  return a.file == b.file && a.function == b.function && a.clause == b.clause;
}

bool overlapping(const SiteRef &a, const SiteRef &b) {
  return same_body(a, b) && a.start < b.start + b.length &&
         b.start < a.start + a.length;
}

bool strictly_within(const SiteRef &inner, const SiteRef &outer) {
  return same_body(inner, outer) && !(inner == outer) &&
         outer.start <= inner.start &&
         inner.start + inner.length <= outer.start + outer.length;
}

} // namespace

std::optional<CanonicalTemplate> oracle_lgg(const Project &p,
                                            const std::vector<SiteRef> &sites) {
  if (sites.size() < 2)
    return std::nullopt;
  std::vector<Inst> in;
  for (const auto &s : sites) {
    if (s.length != sites[0].length)
      return std::nullopt;
    in.push_back(make_inst(p, s));
  }
  return Lgg(std::move(in)).run();
}

namespace {

bool seeded_cached(const Project &p, const SiteRef &a, const SiteRef &b) {
  if (a.length != b.length)
    return false;
  Inst x = make_inst(p, a), y = make_inst(p, b);
  for (std::size_t k = 0; k < x.exprs.size(); ++k)
    if (norm_tokens(*x.file, *x.exprs[k]) == norm_tokens(*y.file, *y.exprs[k]))
      return true;
  return false;
}

} // namespace

bool oracle_seeded(const Project &p, const SiteRef &a, const SiteRef &b) {
  g_norm.clear();
  bool r = seeded_cached(p, a, b);
  g_norm.clear();
  return r;
}

std::vector<OracleClass> oracle_detect(const Project &p, const Thresholds &t,
                                       std::size_t max_component) {
  auto admissible = [&](const std::optional<CanonicalTemplate> &c) {
    return c && c->new_params <= t.max_new_params &&
           c->similarity + 1e-9 >= t.min_similarity;
  };

  g_norm.clear();
  std::map<std::uint32_t, std::vector<SiteRef>, std::greater<>> by_length;
  for (FileId f = 0; f < p.files.size(); ++f) {
    const auto &fns = p.file(f).ast.functions;
    for (std::uint32_t fi = 0; fi < fns.size(); ++fi)
      for (std::uint32_t ci = 0; ci < fns[fi].clauses.size(); ++ci) {
        auto n = static_cast<std::uint32_t>(fns[fi].clauses[ci].body().size());
        for (std::uint32_t len = 1; len <= n; ++len)
          for (std::uint32_t s = 0; s + len <= n; ++s) {
            SiteRef site{f, fi, ci, s, len};
            if (len >= t.min_len || token_count(p, site) >= t.min_toks)
              by_length[len].push_back(site);
          }
      }
  }

  std::vector<OracleClass> reported;
  for (const auto &[len, sites] : by_length) {
    std::size_t n = sites.size();
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!overlapping(sites[i], sites[j]) &&
            seeded_cached(p, sites[i], sites[j]) &&
            admissible(oracle_lgg(p, {sites[i], sites[j]})))
          edge[i][j] = edge[j][i] = true;

    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> comps;
    for (std::size_t s = 0; s < n; ++s) {
      if (comp[s] >= 0)
        continue;
      std::vector<std::size_t> members{s}, stack{s};
      comp[s] = static_cast<int>(comps.size());
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v)
          if (edge[u][v] && comp[v] < 0) {
            comp[v] = comp[s];
            members.push_back(v);
            stack.push_back(v);
          }
      }
      std::sort(members.begin(), members.end());
      comps.push_back(std::move(members));
    }

    std::vector<OracleClass> found;
    for (const auto &members : comps) {
      if (members.size() < 2)
        continue;
      if (members.size() > max_component)
        throw std::runtime_error("oracle component too large: " +
                                 std::to_string(members.size()));
      std::size_t m = members.size();
      std::vector<std::pair<std::uint32_t, OracleClass>> sets;
      for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) < 2)
          continue;
        bool clique = true;
        for (std::size_t a = 0; a < m && clique; ++a)
          for (std::size_t b = a + 1; b < m && clique; ++b)
            if ((mask >> a & 1) && (mask >> b & 1) &&
                !edge[members[a]][members[b]])
              clique = false;
        if (!clique)
          continue;
        std::vector<SiteRef> chosen;
        for (std::size_t a = 0; a < m; ++a)
          if (mask >> a & 1)
            chosen.push_back(sites[members[a]]);
        auto g = oracle_lgg(p, chosen);
        if (admissible(g))
          sets.push_back({mask, {chosen, *g}});
      }
      for (const auto &[mask, cls] : sets) {
        bool maximal = std::none_of(sets.begin(), sets.end(), [&](const auto &o) {
          return o.first != mask && (o.first & mask) == mask;
        });
        if (maximal)
          found.push_back(cls);
      }
    }

    std::vector<OracleClass> accepted;
    for (auto &c : found) {
      if (c.sites.size() < t.min_freq)
        continue;
      bool swallowed = std::any_of(reported.begin(), reported.end(), [&](const OracleClass &d) {
        return d.sites.size() == c.sites.size() &&
               std::all_of(c.sites.begin(), c.sites.end(), [&](const SiteRef &s) {
                 return std::any_of(d.sites.begin(), d.sites.end(),
                                    [&](const SiteRef &o) { return strictly_within(s, o); });
               });
      });
      if (!swallowed)
        accepted.push_back(std::move(c));
    }
    for (auto &c : accepted)
      reported.push_back(std::move(c));
  }
  g_norm.clear();
  return reported;
}


std::vector<std::string> oracle_mismatch(const Project &p, const Thresholds &t,
                                         const std::vector<CloneClass> &got) {
  using Key = std::tuple<std::vector<SiteRef>, std::string,
                         std::vector<std::vector<std::string>>>;
  auto describe = [&](const Key &k) {
    std::string out = std::get<1>(k) + " @";
    for (const auto &s : std::get<0>(k))
      out += " " + site_location(p, s);
    return out;
  };
  std::set<Key> a, b;
  for (const auto &c : got) {
    auto s = c.sites();
    std::sort(s.begin(), s.end());
    auto ct = canonical(c);
    a.insert({s, ct.body, ct.actuals});
  }
  for (const auto &c : oracle_detect(p, t)) {
    auto s = c.sites;
    std::sort(s.begin(), s.end());
    b.insert({s, c.tmpl.body, c.tmpl.actuals});
  }
  std::vector<std::string> out;
  for (const auto &k : a)
    if (!b.count(k))
      out.push_back("unexpected: " + describe(k));
  for (const auto &k : b)
    if (!a.count(k))
      out.push_back("missing: " + describe(k));
  return out;
}

} // namespace clonewright::testing
