#include "clonewright/text.hpp"

#include <algorithm>
#include <stdexcept>

namespace clonewright {

std::string apply_edits(std::string_view text, std::vector<TextEdit> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const TextEdit &a, const TextEdit &b) {
              return a.begin < b.begin;
            });
  std::string out;
  std::size_t pos = 0;
  for (const auto &e : edits) {
    if (e.begin < pos || e.end < e.begin || e.end > text.size())
      throw std::invalid_argument("overlapping or out-of-range edit");
    out.append(text.substr(pos, e.begin - pos));
    out += e.replacement;
    pos = e.end;
  }
  out.append(text.substr(pos));
  return out;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos + 1));
    pos = nl + 1;
  }
  return lines;
}

struct Op {
  char kind; // ' ', '-', '+'
  std::string_view line;
};

std::string range(std::size_t start, std::size_t count) {
  if (count == 0)
    return std::to_string(start) + ",0";
  if (count == 1)
    return std::to_string(start + 1);
  return std::to_string(start + 1) + "," + std::to_string(count);
}

} // namespace

std::string unified_diff(std::string_view path, std::string_view before,
                         std::string_view after) {
  if (before == after)
    return {};
  auto a = split_lines(before);
  auto b = split_lines(after);
  // Trim the common prefix and suffix, then LCS on the middle.
  std::size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre] == b[pre])
    ++pre;
  std::size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre &&
         a[a.size() - 1 - suf] == b[b.size() - 1 - suf])
    ++suf;
  std::size_t n = a.size() - pre - suf, m = b.size() - pre - suf;
  std::vector<std::vector<std::uint32_t>> lcs(
      n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[pre + i] == b[pre + j]
                      ? lcs[i + 1][j + 1] + 1
                      : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<Op> ops;
  for (std::size_t i = 0; i < pre; ++i)
    ops.push_back({' ', a[i]});
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[pre + i] == b[pre + j]) {
      ops.push_back({' ', a[pre + i]});
      ++i;
      ++j;
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', a[pre + i]});
      ++i;
    } else {
      ops.push_back({'+', b[pre + j]});
      ++j;
    }
  }
  for (std::size_t k = a.size() - suf; k < a.size(); ++k)
    ops.push_back({' ', a[k]});

  std::string out = "--- a/" + std::string(path) + "\n+++ b/" +
                    std::string(path) + "\n";
  const std::size_t ctx = 3;
  std::size_t k = 0;
  while (k < ops.size()) {
    if (ops[k].kind == ' ') {
      ++k;
      continue;
    }
    std::size_t start = k >= ctx ? k - ctx : 0;
    std::size_t end = k;
    // Extend the hunk while changes are within 2*ctx lines of each other.
    while (true) {
      while (end < ops.size() && ops[end].kind != ' ')
        ++end;
      std::size_t next = end;
      while (next < ops.size() && ops[next].kind == ' ' && next - end < 2 * ctx)
        ++next;
      if (next < ops.size() && ops[next].kind != ' ') {
        end = next;
        continue;
      }
      break;
    }
    std::size_t stop = std::min(ops.size(), end + ctx);
    std::size_t a_start = 0, b_start = 0;
    for (std::size_t q = 0; q < start; ++q) {
      if (ops[q].kind != '+')
        ++a_start;
      if (ops[q].kind != '-')
        ++b_start;
    }
    std::size_t a_count = 0, b_count = 0;
    std::string body;
    for (std::size_t q = start; q < stop; ++q) {
      if (ops[q].kind != '+')
        ++a_count;
      if (ops[q].kind != '-')
        ++b_count;
      body += ops[q].kind;
      body += ops[q].line;
      if (ops[q].line.empty() || ops[q].line.back() != '\n')
        body += "\n\\ No newline at end of file\n";
    }
    out += "@@ -" + range(a_start, a_count) + " +" + range(b_start, b_count) +
           " @@\n" + body;
    k = stop;
  }
  return out;
}

std::string indent_continuation(std::string_view text, std::size_t indent) {
  std::string out;
  for (char c : text) {
    out += c;
    if (c == '\n')
      out.append(indent, ' ');
  }
  return out;
}

} // namespace clonewright
