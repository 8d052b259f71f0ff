#include "clonewright/suffix_index.hpp"

#include <algorithm>
#include <set>

namespace clonewright {

GeneralizedSuffixTree::GeneralizedSuffixTree(
    const std::vector<std::vector<int>> &sequences) {
  int sentinel = -1;
  for (const auto &seq : sequences) {
    seq_starts_.push_back(text_.size());
    text_.insert(text_.end(), seq.begin(), seq.end());
    text_.push_back(sentinel--);
  }
  build();
}

int GeneralizedSuffixTree::add_node(std::size_t start, std::size_t end) {
  nodes_.push_back(Node{start, end, 0, 0, {}});
  return static_cast<int>(nodes_.size() - 1);
}

void GeneralizedSuffixTree::build() {
  nodes_.reserve(2 * text_.size() + 2);
  add_node(0, 0); // root
  int active_node = 0;
  std::size_t active_edge = 0;
  std::size_t active_length = 0;
  std::size_t remainder = 0;
  for (std::size_t pos = 0; pos < text_.size(); ++pos) {
    ++remainder;
    int last_new = -1;
    while (remainder > 0) {
      if (active_length == 0)
        active_edge = pos;
      int c = text_[active_edge];
      auto it = nodes_[active_node].next.find(c);
      if (it == nodes_[active_node].next.end()) {
        int leaf = add_node(pos, kLeaf);
        nodes_[leaf].suffix = pos + 1 - remainder;
        nodes_[active_node].next[c] = leaf;
        if (last_new != -1) {
          nodes_[last_new].link = active_node;
          last_new = -1;
        }
      } else {
        int nxt = it->second;
        std::size_t len = edge_end(nodes_[nxt]) - nodes_[nxt].start;
        if (active_length >= len) {
          active_edge += len;
          active_length -= len;
          active_node = nxt;
          continue;
        }
        if (text_[nodes_[nxt].start + active_length] == text_[pos]) {
          if (last_new != -1 && active_node != 0) {
            nodes_[last_new].link = active_node;
            last_new = -1;
          }
          ++active_length;
          break;
        }
        std::size_t split_start = nodes_[nxt].start;
        int split = add_node(split_start, split_start + active_length);
        nodes_[active_node].next[c] = split;
        int leaf = add_node(pos, kLeaf);
        nodes_[leaf].suffix = pos + 1 - remainder;
        nodes_[split].next[text_[pos]] = leaf;
        nodes_[nxt].start += active_length;
        nodes_[split].next[text_[nodes_[nxt].start]] = nxt;
        if (last_new != -1)
          nodes_[last_new].link = split;
        last_new = split;
      }
      --remainder;
      if (active_node == 0 && active_length > 0) {
        --active_length;
        active_edge = pos + 1 - remainder;
      } else if (active_node != 0) {
        active_node = nodes_[active_node].link;
      }
    }
  }
}

GeneralizedSuffixTree::Occurrence
GeneralizedSuffixTree::locate(std::size_t text_pos) const {
  auto it = std::upper_bound(seq_starts_.begin(), seq_starts_.end(), text_pos);
  std::size_t seq = static_cast<std::size_t>(it - seq_starts_.begin()) - 1;
  return {seq, text_pos - seq_starts_[seq]};
}

std::vector<GeneralizedSuffixTree::Repeat>
GeneralizedSuffixTree::maximal_repeats(std::size_t min_length) const {
  std::vector<Repeat> out;
  if (text_.empty())
    return out;
  // Iterative DFS: leaves are laid out in visit order so every internal
  // node owns a contiguous slice of `leaves`.
  std::vector<std::size_t> leaves;
  struct Frame {
    int node;
    std::size_t depth;
    std::map<int, int>::const_iterator it;
    std::size_t leaf_begin;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, nodes_[0].next.begin(), 0});
  while (!stack.empty()) {
    Frame &f = stack.back();
    const Node &n = nodes_[f.node];
    if (f.it != n.next.end()) {
      int child = f.it->second;
      ++f.it;
      const Node &c = nodes_[child];
      if (c.end == kLeaf) {
        leaves.push_back(c.suffix);
      } else {
        std::size_t d = f.depth + (c.end - c.start);
        stack.push_back({child, d, c.next.begin(), leaves.size()});
      }
      continue;
    }
    if (f.node != 0 && f.depth >= min_length) {
      std::set<int> left;
      bool at_start = false;
      for (std::size_t i = f.leaf_begin; i < leaves.size(); ++i) {
        std::size_t p = leaves[i];
        auto occ = locate(p);
        if (occ.offset == 0)
          at_start = true;
        else
          left.insert(text_[p - 1]);
        if (at_start || left.size() > 1)
          break;
      }
      if (at_start || left.size() > 1) {
        Repeat r;
        r.length = f.depth;
        for (std::size_t i = f.leaf_begin; i < leaves.size(); ++i)
          r.occurrences.push_back(locate(leaves[i]));
        std::sort(r.occurrences.begin(), r.occurrences.end());
        out.push_back(std::move(r));
      }
    }
    stack.pop_back();
  }
  std::sort(out.begin(), out.end(), [](const Repeat &a, const Repeat &b) {
    if (a.occurrences.front() != b.occurrences.front())
      return a.occurrences.front() < b.occurrences.front();
    return a.length > b.length;
  });
  return out;
}

namespace {

int intern(std::map<std::pair<int, std::string>, int> &table,
           const NormSymbol &s) {
  auto key = std::make_pair(static_cast<int>(s.cls), s.lexeme);
  auto it = table.find(key);
  if (it != table.end())
    return it->second;
  int id = static_cast<int>(table.size()) + 1; // 0 is the boundary
  table.emplace(key, id);
  return id;
}

} // namespace

SuffixIndex SuffixIndex::build(const Project &project) {
  std::map<std::pair<int, std::string>, int> table;
  std::vector<std::vector<int>> seqs;
  std::vector<SiteRef> bodies;
  std::vector<std::vector<std::size_t>> boundaries;
  for (FileId f = 0; f < project.files.size(); ++f) {
    for (const BodyNorm &b : project.file(f).norm.bodies) {
      std::vector<int> seq;
      std::vector<std::size_t> bpos;
      for (const auto &expr : b.exprs) {
        bpos.push_back(seq.size());
        seq.push_back(kBoundarySymbol);
        for (const auto &s : expr)
          seq.push_back(intern(table, s));
      }
      bpos.push_back(seq.size());
      seq.push_back(kBoundarySymbol);
      seqs.push_back(std::move(seq));
      boundaries.push_back(std::move(bpos));
      bodies.push_back(SiteRef{f, b.function, b.clause, 0, 0});
    }
  }
  return SuffixIndex(GeneralizedSuffixTree(seqs), std::move(bodies),
                     std::move(boundaries));
}

std::vector<std::vector<SiteRef>> SuffixIndex::repeat_regions() const {
  std::vector<std::vector<SiteRef>> out;
  for (const auto &rep : tree_.maximal_repeats(3)) {
    // Boundaries sit at identical relative positions in every occurrence.
    const auto &first = rep.occurrences.front();
    const auto &bpos = boundary_pos_[first.sequence];
    auto lo = std::lower_bound(bpos.begin(), bpos.end(), first.offset);
    auto hi = std::lower_bound(bpos.begin(), bpos.end(),
                               first.offset + rep.length);
    if (hi - lo < 2)
      continue;
    std::size_t rel_first = *lo - first.offset;
    auto exprs = static_cast<std::uint32_t>((hi - lo) - 1);
    std::vector<SiteRef> sites;
    for (const auto &occ : rep.occurrences) {
      const auto &bp = boundary_pos_[occ.sequence];
      auto k = std::lower_bound(bp.begin(), bp.end(), occ.offset + rel_first) -
               bp.begin();
      SiteRef s = bodies_[occ.sequence];
      s.start = static_cast<std::uint32_t>(k);
      s.length = exprs;
      sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());
    out.push_back(std::move(sites));
  }
  return out;
}

std::vector<CandidateClass>
SuffixIndex::candidates(const Project &project,
                        const CandidateGate &gate) const {
  std::vector<CandidateClass> out;
  std::set<std::vector<SiteRef>> seen;
  for (const auto &sites : repeat_regions()) {
    CandidateClass cand;
    for (const auto &s : sites) {
      bool clash = std::any_of(
          cand.members.begin(), cand.members.end(),
          [&](const SiteRef &m) { return m.overlaps(s); });
      if (!clash)
        cand.members.push_back(s);
    }
    if (cand.members.size() < std::max<std::size_t>(gate.min_freq, 2))
      continue;
    const SiteRef &m0 = cand.members.front();
    const auto &body = project.file(m0.file).norm.bodies;
    for (const auto &b : body)
      if (b.function == m0.function && b.clause == m0.clause)
        for (std::uint32_t k = m0.start; k < m0.end(); ++k)
          cand.normalized_length += b.exprs[k].size();
    std::size_t min_tokens = static_cast<std::size_t>(-1);
    for (const auto &m : cand.members)
      min_tokens = std::min(min_tokens, site_tokens(project, m));
    if (m0.length < gate.min_len && min_tokens < gate.min_toks)
      continue;
    if (!seen.insert(cand.members).second)
      continue;
    out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(),
            [](const CandidateClass &a, const CandidateClass &b) {
              if (a.members.front() != b.members.front())
                return a.members.front() < b.members.front();
              return a.members.size() > b.members.size();
            });
  return out;
}

} // namespace clonewright
