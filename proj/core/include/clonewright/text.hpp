#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clonewright {

/// Replacement of the byte range [begin, end).
struct TextEdit {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string replacement;
};

/// Applies non-overlapping edits. Throws std::invalid_argument on overlap.
std::string apply_edits(std::string_view text, std::vector<TextEdit> edits);

/// Unified diff of two texts (three lines of context). Empty when equal.
std::string unified_diff(std::string_view path, std::string_view before,
                         std::string_view after);

/// Adds `indent` spaces after every newline of `text`.
std::string indent_continuation(std::string_view text, std::size_t indent);

} // namespace clonewright
