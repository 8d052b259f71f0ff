#include "clonewright/lexer.hpp"

#include <array>
#include <cctype>

namespace clonewright {

std::string format_span(const Span &span) {
  return std::to_string(span.begin.line) + "." +
         std::to_string(span.begin.col) + "-" + std::to_string(span.end.line) +
         "." + std::to_string(span.end.col);
}

const char *to_string(TokenKind kind) {
  switch (kind) {
  case TokenKind::Integer:
    return "integer";
  case TokenKind::String:
    return "string";
  case TokenKind::Atom:
    return "atom";
  case TokenKind::Variable:
    return "variable";
  case TokenKind::Operator:
    return "operator";
  case TokenKind::Punctuation:
    return "punctuation";
  case TokenKind::Keyword:
    return "keyword";
  }
  return "?";
}

namespace {

constexpr std::array<std::string_view, 4> kKeywords = {"fun", "end", "case",
                                                       "of"};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
  Lexer(std::string_view src, FileId file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      start_ = pos_;
      start_pos_ = here_;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
        out.push_back(make(TokenKind::Integer));
      } else if (c == '"') {
        lex_string();
        out.push_back(make(TokenKind::String));
      } else if (std::islower(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() && ident_char(src_[pos_]))
          advance();
        auto tok = make(TokenKind::Atom);
        if (is_keyword(tok.lexeme))
          tok.kind = TokenKind::Keyword;
        out.push_back(std::move(tok));
      } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() && ident_char(src_[pos_]))
          advance();
        out.push_back(make(TokenKind::Variable));
      } else if (c == '+' && peek(1) == '+') {
        advance(2);
        out.push_back(make(TokenKind::Operator));
      } else if (c == '-' && peek(1) == '>') {
        advance(2);
        out.push_back(make(TokenKind::Punctuation));
      } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '!' ||
                 c == '=') {
        advance();
        out.push_back(make(TokenKind::Operator));
      } else if (std::string_view("(){}[],;.|:").find(c) !=
                 std::string_view::npos) {
        advance();
        out.push_back(make(TokenKind::Punctuation));
      } else {
        advance();
        throw MelError(std::string("illegal character '") + c + "'",
                       current_span());
      }
    }
    return out;
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(src_[pos_++]);
      if (c == '\n') {
        ++here_.line;
        here_.col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++here_.col;
      }
    }
  }

  void lex_string() {
    advance(); // opening quote
    while (true) {
      if (pos_ >= src_.size())
        throw MelError("unterminated string", current_span());
      char c = src_[pos_];
      if (c == '\\') {
        advance(2);
        continue;
      }
      advance();
      if (c == '"')
        return;
    }
  }

  Span current_span() const {
    return Span{file_, start_pos_, here_, start_, pos_};
  }

  Token make(TokenKind kind) const {
    return Token{kind, std::string(src_.substr(start_, pos_ - start_)),
                 current_span()};
  }

  std::string_view src_;
  FileId file_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
  Pos here_{1, 1};
  Pos start_pos_{1, 1};
};

} // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords)
    if (k == word)
      return true;
  return false;
}

bool is_valid_atom(std::string_view name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
    return false;
  for (char c : name)
    if (!ident_char(c))
      return false;
  return !is_keyword(name);
}

bool is_valid_variable(std::string_view name) {
  if (name.empty())
    return false;
  if (!std::isupper(static_cast<unsigned char>(name[0])) && name[0] != '_')
    return false;
  for (char c : name)
    if (!ident_char(c))
      return false;
  return true;
}

std::vector<Token> tokenize(std::string_view source, FileId file) {
  return Lexer(source, file).run();
}

} // namespace clonewright
