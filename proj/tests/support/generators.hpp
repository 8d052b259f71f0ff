#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "clonewright/project.hpp"

namespace clonewright::testing {

struct CorpusShape {
  std::size_t files = 3;
  std::size_t functions = 4; // per file
  std::size_t families = 4;  // seeded clone families
  std::size_t max_copies = 4;
  std::size_t max_expressions = 300;
};

/// Random Mel project with planted near-miss clone families: copies of a
/// skeleton with renamed bindings, changed literals and replaced subterms,
/// interleaved with unrelated statements. Deterministic in `seed`.
class CorpusModel {
public:
  CorpusModel(std::uint64_t seed, const CorpusShape &shape);

  std::vector<SourceFile> sources() const;
  std::size_t expression_count() const;

  /// One random edit that keeps every file parseable: rewrite a statement,
  /// copy a function, delete a function or change a literal.
  std::string edit();

  std::vector<ModuleAst> modules;

private:
  Expr leaf();
  Expr arith(int depth);
  Expr term(const std::vector<std::string> &vars, int depth);
  Expr statement(std::vector<std::string> &vars);
  Expr mutate(const Expr &e, const std::vector<std::string> &vars);
  std::string fresh(const std::string &stem);

  std::mt19937_64 rng_;
  std::size_t counter_ = 0;
};

} // namespace clonewright::testing
