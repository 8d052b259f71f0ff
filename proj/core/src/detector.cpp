#include "clonewright/detector.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "clonewright/cache.hpp"
#include "clonewright/suffix_index.hpp"

namespace clonewright {

void Thresholds::validate() const {
  if (min_len < 1)
    throw std::invalid_argument("min_len must be at least 1");
  if (min_freq < 2)
    throw std::invalid_argument("min_freq must be at least 2");
  if (max_new_params < 1)
    throw std::invalid_argument("max_new_params must be at least 1");
  if (!(min_similarity > 0.0 && min_similarity <= 1.0))
    throw std::invalid_argument("similarity must be in (0, 1]");
}

std::vector<SiteRef> CloneClass::sites() const {
  std::vector<SiteRef> out;
  for (const auto &i : instances)
    out.push_back(i.site);
  return out;
}

AuInstance make_instance(const Project &p, const SiteRef &s) {
  const ParsedFile &f = p.file(s.file);
  Span sp = site_span(p, s);
  AuInstance in;
  in.exprs = site_body(p, s);
  in.module = &f.ast;
  for (const auto &e : in.exprs)
    walk(e, [&](const Expr &n, bool) {
      if (!n.is_var() || n.text == "_")
        return;
      const VarOccurrence *o = f.bindings.of(n);
      if (!o)
        return;
      if (o->defining()) {
        auto it = f.bindings.uses.find(o->binding);
        if (it != f.bindings.uses.end())
          for (std::size_t u : it->second)
            if (u >= sp.end_offset)
              in.exports.insert(n.text);
        return;
      }
      if (o->binding == kFreeInFunction || o->binding < sp.begin_offset ||
          o->binding >= sp.end_offset) {
        in.outer.insert(n.text);
        in.declared[n.text] = o->binding;
      }
    });
  return in;
}

PairStats verify_pair(const Project &p, const SiteRef &a, const SiteRef &b) {
  auto r = anti_unify({make_instance(p, a), make_instance(p, b)});
  if (!r)
    return {};
  return {true, r->tmpl.new_params(), r->similarity};
}

namespace {

constexpr double kEpsilon = 1e-9;

const BodyNorm &body_norm(const Project &p, const SiteRef &s) {
  for (const auto &b : p.file(s.file).norm.bodies)
    if (b.function == s.function && b.clause == s.clause)
      return b;
  throw std::out_of_range("no such clause body");
}

std::size_t body_length(const Project &p, const SiteRef &s) {
  return site_clause(p, s).body().size();
}

SiteRef with(const SiteRef &body, std::uint32_t start, std::uint32_t length) {
  SiteRef s = body;
  s.start = start;
  s.length = length;
  return s;
}

} // namespace

bool admits(const PairStats &s, const Thresholds &t) {
  return s.unified && s.new_params <= t.max_new_params &&
         s.similarity + kEpsilon >= t.min_similarity;
}

bool admits(const AuResult &r, const Thresholds &t) {
  return r.tmpl.new_params() <= t.max_new_params &&
         r.similarity + kEpsilon >= t.min_similarity;
}

bool seeded(const Project &p, const SiteRef &a, const SiteRef &b) {
  if (a.length != b.length)
    return false;
  const BodyNorm &na = body_norm(p, a);
  const BodyNorm &nb = body_norm(p, b);
  for (std::uint32_t j = 0; j < a.length; ++j)
    if (same_normalized(na.exprs[a.start + j], nb.exprs[b.start + j]))
      return true;
  return false;
}

CloneClass make_class(const Project &p, const std::vector<SiteRef> &sites,
                      const AuResult &r) {
  CloneClass c;
  c.tmpl = r.tmpl;
  c.similarity = r.similarity;
  c.length = sites.empty() ? 0 : sites.front().length;
  std::set<FileId> files;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    CloneInstance in;
    in.site = sites[i];
    in.file = p.file(sites[i].file).path;
    in.span = site_span(p, sites[i]);
    in.actuals = i < r.subs.size() ? r.subs[i] : Substitution{};
    in.tokens = site_tokens(p, sites[i]);
    c.instances.push_back(std::move(in));
    files.insert(sites[i].file);
  }
  c.inter_module = files.size() >= 2;
  c.size_loc = sites.empty() ? 0 : site_loc(p, sites.front());
  return c;
}

namespace {

class Engine {
public:
  Engine(const Project &p, const Thresholds &t, CloneCache *cache)
      : p_(p), t_(t), cache_(cache) {}

  std::size_t tokens(const SiteRef &s) {
    auto it = tokens_.find(s);
    if (it == tokens_.end())
      it = tokens_.emplace(s, site_tokens(p_, s)).first;
    return it->second;
  }

  bool eligible(const SiteRef &s) {
    return s.length >= t_.min_len || tokens(s) >= t_.min_toks;
  }

  const AuInstance &instance(const SiteRef &s) {
    auto it = instances_.find(s);
    if (it == instances_.end())
      it = instances_.emplace(s, make_instance(p_, s)).first;
    return it->second;
  }

  PairStats pair(const SiteRef &a, const SiteRef &b) {
    auto memo = pairs_.find({a, b});
    if (memo != pairs_.end())
      return memo->second;
    PairStats s = compute_pair(a, b);
    pairs_.emplace(std::make_pair(a, b), s);
    return s;
  }

  PairStats compute_pair(const SiteRef &a, const SiteRef &b) {
    std::string key;
    if (cache_) {
      key = site_key(p_, a) + "|" + site_key(p_, b);
      if (auto hit = cache_->pair(key))
        return *hit;
    }
    PairStats s;
    if (auto r = anti_unify({instance(a), instance(b)}))
      s = {true, r->tmpl.new_params(), r->similarity};
    if (cache_)
      cache_->store_pair(key, s);
    return s;
  }

  const std::optional<AuResult> &group(const std::vector<SiteRef> &sites) {
    auto it = groups_.find(sites);
    if (it != groups_.end())
      return it->second;
    std::string key;
    if (cache_) {
      for (const auto &s : sites)
        key += (key.empty() ? "" : "|") + site_key(p_, s);
      if (auto hit = cache_->group(key))
        return groups_.emplace(sites, std::move(*hit)).first->second;
    }
    std::vector<AuInstance> in;
    for (const auto &s : sites)
      in.push_back(instance(s));
    auto r = anti_unify(in);
    if (cache_)
      cache_->store_group(key, r);
    return groups_.emplace(sites, std::move(r)).first->second;
  }

  bool admissible(const std::vector<SiteRef> &sites) {
    const auto &r = group(sites);
    return r && admits(*r, t_);
  }

  const Project &project() const { return p_; }
  const Thresholds &thresholds() const { return t_; }

private:
  const Project &p_;
  Thresholds t_;
  CloneCache *cache_;
  std::map<SiteRef, std::size_t> tokens_;
  std::map<SiteRef, AuInstance> instances_;
  std::map<std::pair<SiteRef, SiteRef>, PairStats> pairs_;
  std::map<std::vector<SiteRef>, std::optional<AuResult>> groups_;
};

bool subset_of(const std::vector<SiteRef> &a, const std::vector<SiteRef> &b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Maximal cliques (Bron-Kerbosch with pivoting).
class Cliques {
public:
  explicit Cliques(const std::vector<std::set<int>> &adj) : adj_(adj) {}

  std::vector<std::vector<int>> run() {
    std::vector<int> r, p, x;
    for (int v = 0; v < static_cast<int>(adj_.size()); ++v)
      p.push_back(v);
    expand(r, p, x);
    return std::move(out_);
  }

private:
  void expand(std::vector<int> &r, std::vector<int> p, std::vector<int> x) {
    if (p.empty() && x.empty()) {
      std::vector<int> c = r;
      std::sort(c.begin(), c.end());
      out_.push_back(std::move(c));
      return;
    }
    int pivot = -1;
    std::size_t best = 0;
    for (const auto *set : {&p, &x})
      for (int u : *set) {
        std::size_t n = 0;
        for (int v : p)
          n += adj_[u].count(v);
        if (pivot < 0 || n > best) {
          pivot = u;
          best = n;
        }
      }
    std::vector<int> todo;
    for (int v : p)
      if (!adj_[pivot].count(v))
        todo.push_back(v);
    for (int v : todo) {
      std::vector<int> np, nx;
      for (int u : p)
        if (adj_[v].count(u))
          np.push_back(u);
      for (int u : x)
        if (adj_[v].count(u))
          nx.push_back(u);
      r.push_back(v);
      expand(r, np, nx);
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  }

  const std::vector<std::set<int>> &adj_;
  std::vector<std::vector<int>> out_;
};

// Maximal admissible subsets of a clique of pairwise-admissible sites.
std::vector<std::vector<SiteRef>> shrink(Engine &eng,
                                         const std::vector<SiteRef> &clique) {
  std::vector<std::vector<SiteRef>> found;
  std::set<std::vector<SiteRef>> frontier{clique};
  std::size_t budget = 4096;
  while (!frontier.empty() && budget > 0) {
    std::set<std::vector<SiteRef>> next;
    for (const auto &s : frontier) {
      if (std::any_of(found.begin(), found.end(),
                      [&](const auto &f) { return subset_of(s, f); }))
        continue;
      if (budget > 0)
        --budget;
      if (eng.admissible(s)) {
        found.push_back(s);
        continue;
      }
      if (s.size() <= 2)
        continue;
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto sub = s;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(i));
        next.insert(std::move(sub));
      }
    }
    frontier = std::move(next);
  }
  if (!frontier.empty()) {
    // Budget exhausted: grow greedily from every member instead.
    for (std::size_t i = 0; i < clique.size(); ++i) {
      std::vector<SiteRef> cur{clique[i]};
      for (std::size_t j = 0; j < clique.size(); ++j) {
        if (j == i)
          continue;
        auto cand = cur;
        cand.insert(std::upper_bound(cand.begin(), cand.end(), clique[j]),
                    clique[j]);
        if (eng.admissible(cand))
          cur = std::move(cand);
      }
      if (cur.size() >= 2)
        found.push_back(std::move(cur));
    }
  }
  return found;
}

std::vector<std::vector<SiteRef>>
maximal_sets(Engine &eng, const std::set<std::pair<SiteRef, SiteRef>> &pairs) {
  std::vector<SiteRef> verts;
  std::map<SiteRef, int> index;
  std::vector<std::set<int>> adj;
  for (const auto &[a, b] : pairs) {
    if (!admits(eng.pair(a, b), eng.thresholds()))
      continue;
    for (const auto *s : {&a, &b})
      if (!index.count(*s)) {
        index.emplace(*s, 0);
      }
  }
  for (auto &[s, i] : index) {
    i = static_cast<int>(verts.size());
    verts.push_back(s);
  }
  adj.resize(verts.size());
  for (const auto &[a, b] : pairs) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      continue;
    if (!admits(eng.pair(a, b), eng.thresholds()))
      continue;
    adj[ia->second].insert(ib->second);
    adj[ib->second].insert(ia->second);
  }
  std::set<std::vector<SiteRef>> sets;
  for (const auto &clique : Cliques(adj).run()) {
    if (clique.size() < 2)
      continue;
    std::vector<SiteRef> sites;
    for (int v : clique)
      sites.push_back(verts[v]);
    for (auto &s : shrink(eng, sites))
      sets.insert(std::move(s));
  }
  std::vector<std::vector<SiteRef>> out;
  for (const auto &s : sets) {
    bool dominated = false;
    for (const auto &o : sets)
      if (o.size() > s.size() && subset_of(s, o)) {
        dominated = true;
        break;
      }
    if (!dominated)
      out.push_back(s);
  }
  return out;
}

// Pairs of same-length sites around seed expression pairs.
std::map<std::uint32_t, std::set<std::pair<SiteRef, SiteRef>>>
site_pairs(Engine &eng) {
  const Project &p = eng.project();
  std::set<std::pair<SiteRef, SiteRef>> seeds;
  for (const auto &region : SuffixIndex::build(p).repeat_regions())
    for (std::size_t i = 0; i < region.size(); ++i)
      for (std::size_t j = i + 1; j < region.size(); ++j)
        for (std::uint32_t k = 0; k < region[i].length; ++k) {
          SiteRef x = with(region[i], region[i].start + k, 1);
          SiteRef y = with(region[j], region[j].start + k, 1);
          if (x != y)
            seeds.emplace(std::min(x, y), std::max(x, y));
        }

  std::map<std::uint32_t, std::set<std::pair<SiteRef, SiteRef>>> out;
  std::map<SiteRef, std::uint32_t> lengths;
  auto len_of = [&](const SiteRef &s) {
    SiteRef key = with(s, 0, 0);
    auto it = lengths.find(key);
    if (it == lengths.end())
      it = lengths
               .emplace(key, static_cast<std::uint32_t>(body_length(p, s)))
               .first;
    return it->second;
  };
  for (const auto &[x, y] : seeds) {
    std::uint32_t nx = len_of(x), ny = len_of(y);
    for (std::uint32_t len = 1; len <= std::min(nx, ny); ++len)
      for (std::uint32_t j = 0; j < len; ++j) {
        if (x.start < j || y.start < j)
          break;
        std::uint32_t sx = x.start - j, sy = y.start - j;
        if (sx + len > nx || sy + len > ny)
          continue;
        SiteRef a = with(x, sx, len), b = with(y, sy, len);
        if (a.overlaps(b) || !eng.eligible(a) || !eng.eligible(b))
          continue;
        out[len].emplace(std::min(a, b), std::max(a, b));
      }
  }
  return out;
}

bool swallowed(const std::vector<SiteRef> &c,
               const std::vector<CloneClass> &reported) {
  for (const auto &d : reported) {
    if (d.instances.size() != c.size())
      continue;
    bool all = std::all_of(c.begin(), c.end(), [&](const SiteRef &ci) {
      return std::any_of(d.instances.begin(), d.instances.end(),
                         [&](const CloneInstance &di) {
                           return di.site != ci && di.site.contains(ci);
                         });
    });
    if (all)
      return true;
  }
  return false;
}

} // namespace

std::vector<CloneClass> detect(const Project &p, const Thresholds &t,
                               const ClassCallback &on_class,
                               CloneCache *cache) {
  t.validate();
  Engine eng(p, t, cache);
  auto by_length = site_pairs(eng);
  std::vector<CloneClass> reported;
  for (auto it = by_length.rbegin(); it != by_length.rend(); ++it) {
    for (const auto &sites : maximal_sets(eng, it->second)) {
      if (sites.size() < t.min_freq || swallowed(sites, reported))
        continue;
      const auto &r = eng.group(sites);
      CloneClass c = make_class(p, sites, *r);
      if (on_class)
        on_class(c);
      reported.push_back(std::move(c));
    }
  }
  return reported;
}

SiteRef select_site(const Project &p, const std::string &file, Pos begin,
                    Pos end) {
  auto fid = p.find_path(file);
  if (!fid)
    throw SelectionError("file not in project: " + file, std::nullopt);
  const ParsedFile &f = p.file(*fid);
  for (std::uint32_t fi = 0; fi < f.ast.functions.size(); ++fi) {
    const FunDef &fn = f.ast.functions[fi];
    for (std::uint32_t ci = 0; ci < fn.clauses.size(); ++ci) {
      auto body = fn.clauses[ci].body();
      std::optional<std::uint32_t> first, last;
      bool partial = false;
      for (std::uint32_t k = 0; k < body.size(); ++k) {
        const Span &s = body[k].span;
        if (!(s.begin < end && begin < s.end))
          continue;
        if (!first)
          first = k;
        last = k;
        if (s.begin < begin || end < s.end)
          partial = true;
      }
      if (!first)
        continue;
      SiteRef site{*fid, fi, ci, *first, *last - *first + 1};
      if (partial)
        throw SelectionError(
            "selection does not cover whole expressions; nearest: " +
                format_span(site_span(p, site)),
            site_span(p, site));
      return site;
    }
  }
  throw SelectionError("selection does not cover any body expression",
                       std::nullopt);
}

CloneClass search(const Project &p, const SiteRef &selection,
                  const Thresholds &t) {
  Engine eng(p, t, nullptr);
  std::vector<SiteRef> chosen{selection};
  for (FileId f = 0; f < p.files.size(); ++f) {
    const auto &fns = p.file(f).ast.functions;
    for (std::uint32_t fi = 0; fi < fns.size(); ++fi)
      for (std::uint32_t ci = 0; ci < fns[fi].clauses.size(); ++ci) {
        auto n = static_cast<std::uint32_t>(fns[fi].clauses[ci].body().size());
        for (std::uint32_t s = 0; s + selection.length <= n; ++s) {
          SiteRef c{f, fi, ci, s, selection.length};
          if (std::any_of(chosen.begin(), chosen.end(),
                          [&](const SiteRef &x) { return x.overlaps(c); }))
            continue;
          if (!admits(eng.pair(std::min(selection, c), std::max(selection, c)),
                      t))
            continue;
          auto cand = chosen;
          cand.insert(std::upper_bound(cand.begin(), cand.end(), c), c);
          if (eng.admissible(cand))
            chosen = std::move(cand);
        }
      }
  }
  if (chosen.size() == 1) {
    AuResult self;
    auto body = site_body(p, selection);
    self.tmpl.body.assign(body.begin(), body.end());
    self.subs.resize(1);
    self.similarity = 1.0;
    return make_class(p, chosen, self);
  }
  return make_class(p, chosen, *eng.group(chosen));
}

Detection detect_incremental(const std::vector<SourceFile> &sources,
                             const Thresholds &t, CloneCache &cache,
                             const ClassCallback &on_class) {
  Detection d;
  d.project = cache.build(sources);
  d.classes = detect(d.project, t, on_class, &cache);
  cache.prune(d.project);
  return d;
}

} // namespace clonewright
