#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clonewright/span.hpp"

namespace clonewright {

enum class TokenKind {
  Integer,
  String,
  Atom,
  Variable,
  Operator,
  Punctuation,
  Keyword,
};

const char *to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;
  Span span;

  bool is(TokenKind k, std::string_view text) const {
    return kind == k && lexeme == text;
  }
  bool is_punct(std::string_view text) const {
    return is(TokenKind::Punctuation, text);
  }
  bool is_op(std::string_view text) const {
    return is(TokenKind::Operator, text);
  }
  bool is_keyword(std::string_view text) const {
    return is(TokenKind::Keyword, text);
  }
};

/// Splits Mel source into tokens. `%` comments and whitespace are dropped.
/// Throws MelError on an illegal character or an unterminated string.
std::vector<Token> tokenize(std::string_view source, FileId file);

bool is_keyword(std::string_view word);
bool is_valid_atom(std::string_view name);
bool is_valid_variable(std::string_view name);

} // namespace clonewright
