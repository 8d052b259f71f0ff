#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace clonewright {

using FileId = std::uint32_t;

/// 1-based line and column. Columns count code points.
struct Pos {
  int line = 1;
  int col = 1;

  friend bool operator==(const Pos &, const Pos &) = default;
  friend auto operator<=>(const Pos &, const Pos &) = default;
};

/// Source region, start inclusive, end exclusive. Byte offsets mirror the
/// line/column pair and are what text edits operate on.
struct Span {
  FileId file = 0;
  Pos begin;
  Pos end;
  std::size_t begin_offset = 0;
  std::size_t end_offset = 0;

  bool empty() const { return begin_offset == end_offset; }
  bool contains(const Span &other) const {
    return file == other.file && begin_offset <= other.begin_offset &&
           other.end_offset <= end_offset;
  }
  bool overlaps(const Span &other) const {
    return file == other.file && begin_offset < other.end_offset &&
           other.begin_offset < end_offset;
  }
  friend bool operator==(const Span &, const Span &) = default;
};

/// Renders `sl.sc-el.ec`.
std::string format_span(const Span &span);

/// Error raised by the lexer, parser and binding analysis.
class MelError : public std::runtime_error {
public:
  MelError(std::string message, Span span)
      : std::runtime_error(std::move(message)), span_(span) {}
  const Span &span() const { return span_; }

private:
  Span span_;
};

} // namespace clonewright
