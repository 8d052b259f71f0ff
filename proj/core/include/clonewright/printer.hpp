#pragma once

#include <span>
#include <string>

#include "clonewright/ast.hpp"

namespace clonewright {

// Normative layout: two-space indentation, one body expression per line,
// comma separated, the last one terminated by `.` (functions) or `;`
// (all but the last clause).

std::string print(const Expr &e, int indent = 0);
std::string print(const FunDef &f);
std::string print(const ModuleAst &m);

/// Body-style rendering: each expression on its own line at `indent`,
/// separated by ",\n". No trailing terminator.
std::string print_sequence(std::span<const Expr> body, int indent);

/// Prints `f(A, B)`-style argument lists.
std::string print_args(std::span<const Expr> args, int indent = 0);

} // namespace clonewright
