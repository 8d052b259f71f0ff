#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clonewright/ast.hpp"
#include "clonewright/lexer.hpp"

namespace clonewright {

enum class SymbolClass { Var, Int, Str, Atom, Op, Punct, Keyword };

/// Token with variable names and literal values erased. Atoms, operators,
/// keywords and punctuation keep their lexeme.
struct NormSymbol {
  SymbolClass cls;
  std::string lexeme; // empty for Var/Int/Str
  std::size_t token_index = 0;

  bool same_symbol(const NormSymbol &o) const {
    return cls == o.cls && lexeme == o.lexeme;
  }
};

/// Normalized view of one function clause body: one symbol run per
/// top-level expression, plus that expression's token interval.
struct BodyNorm {
  std::uint32_t function = 0;
  std::uint32_t clause = 0;
  std::vector<std::vector<NormSymbol>> exprs;
  std::vector<std::pair<std::size_t, std::size_t>> token_ranges;
};

struct NormalizedFile {
  std::vector<BodyNorm> bodies;
};

NormalizedFile normalize(const std::vector<Token> &tokens,
                         const ModuleAst &module);

NormSymbol normalize_token(const Token &t, std::size_t index);

/// True when the two symbol runs are identical after normalization.
bool same_normalized(const std::vector<NormSymbol> &a,
                     const std::vector<NormSymbol> &b);

} // namespace clonewright
