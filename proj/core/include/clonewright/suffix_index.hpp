#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clonewright/normalize.hpp"
#include "clonewright/project.hpp"

namespace clonewright {

/// Generalized suffix tree over integer sequences, built with Ukkonen's
/// online algorithm. Each input sequence is terminated by its own sentinel,
/// so no repeat crosses a sequence boundary.
class GeneralizedSuffixTree {
public:
  struct Occurrence {
    std::size_t sequence;
    std::size_t offset;
    friend bool operator==(const Occurrence &, const Occurrence &) = default;
    friend auto operator<=>(const Occurrence &, const Occurrence &) = default;
  };

  /// A maximal repeat: cannot be extended left or right without losing an
  /// occurrence. Occurrences are sorted.
  struct Repeat {
    std::size_t length;
    std::vector<Occurrence> occurrences;
  };

  /// Symbols must be non-negative; negative values are reserved for
  /// sentinels.
  explicit GeneralizedSuffixTree(
      const std::vector<std::vector<int>> &sequences);

  std::vector<Repeat> maximal_repeats(std::size_t min_length = 1) const;

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<int> &text() const { return text_; }
  Occurrence locate(std::size_t text_pos) const;

private:
  struct Node {
    std::size_t start = 0;
    std::size_t end = 0; // kLeaf for leaves
    int link = 0;
    std::size_t suffix = 0;
    std::map<int, int> next;
  };
  static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

  std::size_t edge_end(const Node &n) const {
    return n.end == kLeaf ? text_.size() : n.end;
  }
  int add_node(std::size_t start, std::size_t end);
  void build();

  std::vector<int> text_;
  std::vector<std::size_t> seq_starts_;
  std::vector<Node> nodes_;
};

/// Phase-one clone candidate: sites whose normalized token sequences are
/// identical, snapped to whole top-level expressions.
struct CandidateClass {
  std::vector<SiteRef> members;
  std::size_t normalized_length = 0; // symbols, excluding boundaries
  std::size_t frequency() const { return members.size(); }
};

struct CandidateGate {
  std::size_t min_len = 1;
  std::size_t min_toks = 0;
  std::size_t min_freq = 2;
};

/// Suffix index over every function clause body of a project. Body
/// streams are `B e1 B e2 ... B en B` where B marks an expression boundary.
class SuffixIndex {
public:
  static SuffixIndex build(const Project &project);

  /// Maximal repeats snapped inward to expression boundaries. A candidate
  /// passes when it spans at least `min_len` expressions or `min_toks`
  /// tokens (both measured on its smallest member) and has at least
  /// `min_freq` non-overlapping members.
  std::vector<CandidateClass> candidates(const Project &project,
                                         const CandidateGate &gate) const;

  /// Every maximal repeat snapped to whole expressions, with all of its
  /// occurrences (overlapping ones included).
  std::vector<std::vector<SiteRef>> repeat_regions() const;

  const GeneralizedSuffixTree &tree() const { return tree_; }

private:
  SuffixIndex(GeneralizedSuffixTree tree, std::vector<SiteRef> bodies,
              std::vector<std::vector<std::size_t>> boundary_pos)
      : tree_(std::move(tree)), bodies_(std::move(bodies)),
        boundary_pos_(std::move(boundary_pos)) {}

  GeneralizedSuffixTree tree_;
  std::vector<SiteRef> bodies_;                        // length unused
  std::vector<std::vector<std::size_t>> boundary_pos_; // per body, B offsets
};

inline constexpr int kBoundarySymbol = 0;

} // namespace clonewright
