#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonewright/anti_unify.hpp"
#include "clonewright/project.hpp"

namespace clonewright {

class CloneCache;

struct Thresholds {
  std::size_t min_len = 5;
  std::size_t min_toks = 40;
  std::size_t min_freq = 2;
  std::size_t max_new_params = 4;
  double min_similarity = 0.8;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  friend bool operator==(const Thresholds &, const Thresholds &) = default;
};

struct CloneInstance {
  SiteRef site;
  std::string file;
  Span span;
  Substitution actuals; // aligned with the class template's params
  std::size_t tokens = 0;
};

struct CloneClass {
  std::vector<CloneInstance> instances; // sorted by location
  Template tmpl;
  double similarity = 0.0;
  std::size_t length = 0;   // expressions per instance
  std::size_t size_loc = 0; // source lines of the first instance
  bool inter_module = false;

  std::size_t new_params() const { return tmpl.new_params(); }
  std::size_t total_params() const { return tmpl.params.size(); }
  std::vector<SiteRef> sites() const;
};

using ClassCallback = std::function<void(const CloneClass &)>;

/// Anti-unification input for a site: outer variables, their declaration
/// order and the exported bindings come from the enclosing clause.
AuInstance make_instance(const Project &p, const SiteRef &s);

/// Pairwise verification summary, independent of thresholds.
struct PairStats {
  bool unified = false;
  std::size_t new_params = 0;
  double similarity = 0.0;
};

PairStats verify_pair(const Project &p, const SiteRef &a, const SiteRef &b);
bool admits(const PairStats &s, const Thresholds &t);
bool admits(const AuResult &r, const Thresholds &t);

/// Two same-length sites are seeded when some aligned pair of their
/// expressions has identical normalized token runs.
bool seeded(const Project &p, const SiteRef &a, const SiteRef &b);

CloneClass make_class(const Project &p, const std::vector<SiteRef> &sites,
                      const AuResult &r);

/// Detection mode. Classes are passed to `on_class` as soon as they are
/// verified (longest first); the returned list is in the same order.
std::vector<CloneClass> detect(const Project &p, const Thresholds &t,
                               const ClassCallback &on_class = {},
                               CloneCache *cache = nullptr);

class SelectionError : public std::runtime_error {
public:
  SelectionError(const std::string &msg, std::optional<Span> suggestion)
      : std::runtime_error(msg), suggestion_(suggestion) {}
  const std::optional<Span> &suggestion() const { return suggestion_; }

private:
  std::optional<Span> suggestion_;
};

/// Resolves a source range to the expression run it covers. Throws
/// SelectionError when the range cuts through an expression.
SiteRef select_site(const Project &p, const std::string &file, Pos begin,
                    Pos end);

/// Search mode: the class of all sites similar to the selection (the
/// selection included). Length and token gates are not applied.
CloneClass search(const Project &p, const SiteRef &selection,
                  const Thresholds &t);

struct Detection {
  Project project;
  std::vector<CloneClass> classes;
};

/// Detection reusing parsed files and verification results from `cache`.
/// The cache is updated in place.
Detection detect_incremental(const std::vector<SourceFile> &sources,
                             const Thresholds &t, CloneCache &cache,
                             const ClassCallback &on_class = {});

} // namespace clonewright
