#include "clonewright/normalize.hpp"

#include <algorithm>

namespace clonewright {

NormSymbol normalize_token(const Token &t, std::size_t index) {
  switch (t.kind) {
  case TokenKind::Variable:
    return {SymbolClass::Var, {}, index};
  case TokenKind::Integer:
    return {SymbolClass::Int, {}, index};
  case TokenKind::String:
    return {SymbolClass::Str, {}, index};
  case TokenKind::Atom:
    return {SymbolClass::Atom, t.lexeme, index};
  case TokenKind::Operator:
    return {SymbolClass::Op, t.lexeme, index};
  case TokenKind::Punctuation:
    return {SymbolClass::Punct, t.lexeme, index};
  case TokenKind::Keyword:
    return {SymbolClass::Keyword, t.lexeme, index};
  }
  return {SymbolClass::Punct, t.lexeme, index};
}

bool same_normalized(const std::vector<NormSymbol> &a,
                     const std::vector<NormSymbol> &b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](const NormSymbol &x, const NormSymbol &y) {
                      return x.same_symbol(y);
                    });
}

NormalizedFile normalize(const std::vector<Token> &tokens,
                         const ModuleAst &module) {
  NormalizedFile out;
  auto first_at = [&](std::size_t offset) {
    return static_cast<std::size_t>(
        std::lower_bound(tokens.begin(), tokens.end(), offset,
                         [](const Token &t, std::size_t off) {
                           return t.span.begin_offset < off;
                         }) -
        tokens.begin());
  };
  for (std::uint32_t f = 0; f < module.functions.size(); ++f) {
    const FunDef &fn = module.functions[f];
    for (std::uint32_t c = 0; c < fn.clauses.size(); ++c) {
      BodyNorm body;
      body.function = f;
      body.clause = c;
      for (const Expr &e : fn.clauses[c].body()) {
        std::size_t lo = first_at(e.span.begin_offset);
        std::size_t hi = first_at(e.span.end_offset);
        std::vector<NormSymbol> syms;
        syms.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i)
          syms.push_back(normalize_token(tokens[i], i));
        body.exprs.push_back(std::move(syms));
        body.token_ranges.emplace_back(lo, hi);
      }
      out.bodies.push_back(std::move(body));
    }
  }
  return out;
}

} // namespace clonewright
