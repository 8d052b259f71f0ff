#pragma once

#include <string>
#include <vector>

#include "clonewright/project.hpp"
#include "clonewright/refactor.hpp"

namespace clonewright {

/// Arguments of every call to one function, in project order.
struct ActualTable {
  std::string module;
  std::string function;
  std::vector<std::string> params;
  std::vector<std::vector<Expr>> rows;
  std::vector<std::string> locations;
  /// Parameters with the same actual at every call site (needs 2+ sites).
  std::vector<bool> fixed;
};

/// Throws RefactorError when the function has no call sites.
ActualTable collect_actuals(const Project &p, const FunRef &fun);

struct Generator {
  /// Parameter positions; more than one when correlated parameters merge.
  std::vector<std::size_t> params;
  /// Distinct alternatives in first-seen order; tuples when merged.
  std::vector<Expr> alternatives;
  Expr expr() const;
  std::string text() const;
  /// True when `value` is in the generator's support.
  bool covers(const Expr &value) const;
};

std::vector<Generator> synthesize_generators(const ActualTable &actuals,
                                             bool generalize_literals);

/// Near-identical string alternatives, e.g. a typo in one test.
std::vector<std::string> lint_generators(const ActualTable &actuals,
                                         const std::vector<Generator> &gens);

struct PropertySketch {
  std::string name;
  std::vector<std::string> binding;
  std::vector<Generator> generators;
  std::string body;
  std::vector<std::string> warnings;
  std::string text;
};

PropertySketch emit_property(const ActualTable &actuals,
                             std::vector<Generator> generators);

/// collect_actuals, synthesize_generators, lint and emit in one go.
PropertySketch extract_property(const Project &p, const FunRef &fun,
                                bool generalize_literals);

std::string props_file_name(const std::string &module);

} // namespace clonewright
