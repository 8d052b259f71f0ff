#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clonewright/ast.hpp"
#include "clonewright/lexer.hpp"

namespace clonewright {

/// Syntax error carrying the set of tokens the parser would have accepted.
class SyntaxError : public MelError {
public:
  SyntaxError(std::vector<std::string> expected, std::string found, Span span);
  const std::vector<std::string> &expected() const { return expected_; }

private:
  std::vector<std::string> expected_;
};

ModuleAst parse(const std::vector<Token> &tokens, FileId file = 0);

/// Convenience: tokenize + parse.
ModuleAst parse_module(std::string_view source, FileId file = 0);

/// Parses a comma-separated expression sequence such as a function body.
std::vector<Expr> parse_expressions(std::string_view source, FileId file = 0);
Expr parse_expression(std::string_view source, FileId file = 0);

/// Parses one function definition (no module header).
FunDef parse_function(std::string_view source, FileId file = 0);

bool is_pattern(const Expr &e);

} // namespace clonewright
