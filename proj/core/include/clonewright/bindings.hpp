#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "clonewright/ast.hpp"

namespace clonewright {

enum class OccurrenceRole { Defining, Use };

/// Marker binding for variables used before any definition.
inline constexpr std::size_t kFreeInFunction =
    std::numeric_limits<std::size_t>::max();

struct VarOccurrence {
  std::string name;
  Span span;
  OccurrenceRole role = OccurrenceRole::Use;
  /// Begin offset of the defining occurrence, or kFreeInFunction.
  std::size_t binding = kFreeInFunction;
  bool in_pattern = false;

  bool defining() const { return role == OccurrenceRole::Defining; }
};

struct BindingDiagnostic {
  std::string message;
  Span span;
};

/// Static binding structure of one module, keyed by occurrence begin offset.
struct BindingInfo {
  std::map<std::size_t, VarOccurrence> occurrences;
  /// Defining offset -> offsets of its uses, in source order.
  std::map<std::size_t, std::vector<std::size_t>> uses;
  std::vector<BindingDiagnostic> errors;
  std::vector<BindingDiagnostic> warnings;

  const VarOccurrence *at(std::size_t offset) const {
    auto it = occurrences.find(offset);
    return it == occurrences.end() ? nullptr : &it->second;
  }
  const VarOccurrence *of(const Expr &var) const {
    return at(var.span.begin_offset);
  }
  bool ok() const { return errors.empty(); }
};

/// Classifies every variable occurrence. Use-before-definition is reported
/// in `errors`; matching against an already bound variable in a pattern is
/// reported in `warnings`.
BindingInfo annotate_bindings(const ModuleAst &module);

/// Same analysis restricted to one function definition.
void annotate_function(const FunDef &f, BindingInfo &info);

} // namespace clonewright
