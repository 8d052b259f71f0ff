#include "clonewright/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "clonewright/printer.hpp"

namespace clonewright {

using nlohmann::ordered_json;

ReportOrder parse_order(std::string_view s) {
  if (s == "size")
    return ReportOrder::BySize;
  if (s == "freq" || s == "frequency")
    return ReportOrder::ByFrequency;
  throw std::invalid_argument("unknown report order: " + std::string(s));
}

namespace {

bool location_less(const CloneClass &a, const CloneClass &b) {
  const auto &x = a.instances.front();
  const auto &y = b.instances.front();
  if (x.file != y.file)
    return x.file < y.file;
  if (x.span.begin != y.span.begin)
    return x.span.begin < y.span.begin;
  return x.span.end < y.span.end;
}

std::string location(const CloneInstance &i) {
  return i.file + ":" + format_span(i.span) + ":";
}

} // namespace

ReportDocument make_report(std::vector<CloneClass> classes, ReportOrder order) {
  std::stable_sort(classes.begin(), classes.end(), location_less);
  std::stable_sort(classes.begin(), classes.end(),
                   [&](const CloneClass &a, const CloneClass &b) {
                     if (order == ReportOrder::BySize)
                       return a.size_loc > b.size_loc;
                     return a.instances.size() > b.instances.size();
                   });
  return {order, std::move(classes)};
}

std::string clone_kind(const Project &p, const CloneClass &c) {
  for (const auto &i : c.instances)
    if (i.site.start != 0 ||
        i.site.length != site_clause(p, i.site).body().size())
      return "expression";
  return "function";
}

std::string times_phrase(std::size_t extra) {
  if (extra == 1)
    return "once";
  if (extra == 2)
    return "twice";
  return std::to_string(extra) + " times";
}

std::string render_class_text(const Project &p, const CloneClass &c,
                              const EffectTable &effects) {
  std::string out = location(c.instances.front());
  if (c.inter_module)
    out += " (cross-module)";
  out += "\nThis code has been cloned " +
         times_phrase(c.instances.size() - 1) + ":\n";
  for (std::size_t i = 1; i < c.instances.size(); ++i)
    out += location(c.instances[i]) + "\n";
  out += "\nThe cloned expression/function after generalisation:\n\n";
  out += print(generalise(p, c, effects).def) + "\n";
  return out;
}

std::string render_text(const Project &p, const ReportDocument &doc,
                        const EffectTable &effects) {
  if (doc.classes.empty())
    return "No clones found.\n";
  std::string out;
  for (std::size_t i = 0; i < doc.classes.size(); ++i) {
    if (i)
      out += "\n";
    out += render_class_text(p, doc.classes[i], effects);
  }
  return out;
}

namespace {

ordered_json span_json(const Span &s) {
  return {{"begin", {{"line", s.begin.line}, {"col", s.begin.col}}},
          {"end", {{"line", s.end.line}, {"col", s.end.col}}}};
}

// Four decimal places, emitted as a JSON number.
double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

ordered_json class_json(const Project &p, const CloneClass &c,
                        const EffectTable &effects) {
  ordered_json inst = ordered_json::array();
  for (const auto &i : c.instances) {
    ordered_json actuals = ordered_json::array();
    for (const auto &a : i.actuals)
      actuals.push_back(print(a));
    inst.push_back(
        {{"file", i.file}, {"span", span_json(i.span)}, {"actuals", actuals}});
  }
  return {{"instances", inst},
          {"instanceCount", c.instances.size()},
          {"template", print(generalise(p, c, effects).def)},
          {"params", c.tmpl.params},
          {"similarity", round4(c.similarity)},
          {"newParams", c.new_params()},
          {"totalParams", c.total_params()},
          {"sizeLoc", c.size_loc},
          {"length", c.length},
          {"kind", clone_kind(p, c)},
          {"crossModule", c.inter_module}};
}

// nlohmann prints 1.0 as "1.0"; reformat similarity with 4 decimals.
std::string fix_similarity(std::string text) {
  const std::string key = "\"similarity\":";
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    std::size_t start = pos + key.size();
    while (start < text.size() && text[start] == ' ')
      ++start;
    std::size_t end = start;
    while (end < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[end])) ||
            text[end] == '.' || text[end] == '-' || text[end] == 'e' ||
            text[end] == 'E' || text[end] == '+'))
      ++end;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f",
                  std::stod(text.substr(start, end - start)));
    text.replace(start, end - start, buf);
    pos = start;
  }
  return text;
}

} // namespace

std::string render_class_json(const Project &p, const CloneClass &c,
                              const EffectTable &effects) {
  return fix_similarity(class_json(p, c, effects).dump());
}

std::string render_json(const Project &p, const ReportDocument &doc,
                        const EffectTable &effects) {
  ordered_json classes = ordered_json::array();
  for (std::size_t i = 0; i < doc.classes.size(); ++i) {
    ordered_json c = class_json(p, doc.classes[i], effects);
    c["id"] = i;
    classes.push_back(std::move(c));
  }
  ordered_json doc_json = {{"classes", classes}};
  return fix_similarity(doc_json.dump(2)) + "\n";
}

// ---------------------------------------------------------------- metrics

namespace {

std::string fmt_number(double v, bool always_decimal) {
  if (!always_decimal && v == std::floor(v))
    return std::to_string(static_cast<long long>(v));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::vector<double> column(const std::vector<CloneClass> &cs, int col) {
  std::vector<double> out;
  for (const auto &c : cs) {
    switch (col) {
    case 0:
      out.push_back(static_cast<double>(c.size_loc));
      break;
    case 1:
      out.push_back(static_cast<double>(c.instances.size()));
      break;
    case 2:
      out.push_back(static_cast<double>(c.total_params()));
      break;
    default:
      out.push_back(static_cast<double>(c.new_params()));
    }
  }
  return out;
}

std::vector<std::string> class_cells(const CloneClass &c) {
  return {std::to_string(c.size_loc), std::to_string(c.instances.size()),
          std::to_string(c.total_params()), std::to_string(c.new_params())};
}

// Classes ordered by `key` descending, ties by location.
template <typename Key>
std::vector<const CloneClass *> ranked(const std::vector<CloneClass> &cs,
                                       Key key) {
  std::vector<const CloneClass *> out;
  for (const auto &c : cs)
    out.push_back(&c);
  std::stable_sort(out.begin(), out.end(),
                   [](const CloneClass *a, const CloneClass *b) {
                     return location_less(*a, *b);
                   });
  std::stable_sort(out.begin(), out.end(),
                   [&](const CloneClass *a, const CloneClass *b) {
                     return key(*a) > key(*b);
                   });
  return out;
}

} // namespace

Metrics compute_metrics(const std::vector<CloneClass> &classes) {
  Metrics m;
  m.columns = {"Size (LOC)", "Occurrences", "Total parameters",
               "New parameters"};
  const std::vector<std::string> na(4, "n/a");
  MetricsRow median{"Median", {}}, mean{"Mean", {}}, max{"Maximum", {}},
      min{"Minimum", {}};
  for (int col = 0; col < 4; ++col) {
    auto v = column(classes, col);
    if (v.empty()) {
      for (auto *r : {&median, &mean, &max, &min})
        r->cells.push_back("n/a");
      continue;
    }
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    double med = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    double sum = 0;
    for (double x : v)
      sum += x;
    median.cells.push_back(fmt_number(med, false));
    mean.cells.push_back(fmt_number(sum / static_cast<double>(n), true));
    max.cells.push_back(fmt_number(v.back(), false));
    min.cells.push_back(fmt_number(v.front(), false));
  }
  m.rows = {median, mean, max, min};

  auto standout = [&](const std::string &label,
                      const std::vector<const CloneClass *> &order,
                      std::size_t k) {
    m.rows.push_back(
        {label, k < order.size() ? class_cells(*order[k]) : na});
  };
  auto by_size = ranked(classes, [](const CloneClass &c) { return c.size_loc; });
  auto by_freq = ranked(classes,
                        [](const CloneClass &c) { return c.instances.size(); });
  auto by_params = ranked(classes, [](const CloneClass &c) {
    return std::make_pair(c.total_params(), c.new_params());
  });
  standout("Largest clone", by_size, 0);
  standout("Second largest", by_size, 1);
  standout("Most occurring clone", by_freq, 0);
  standout("Second most occurring", by_freq, 1);
  standout("Most parameterised", by_params, 0);
  m.rows.push_back({"Number of clones", {std::to_string(classes.size())}});
  return m;
}

std::string render_metrics_text(const Metrics &m) {
  std::vector<std::size_t> width(m.columns.size() + 1, 0);
  for (const auto &r : m.rows)
    width[0] = std::max(width[0], r.label.size());
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    width[c + 1] = m.columns[c].size();
    for (const auto &r : m.rows)
      if (c < r.cells.size())
        width[c + 1] = std::max(width[c + 1], r.cells[c].size());
  }
  auto line = [&](const std::string &label,
                  const std::vector<std::string> &cells) {
    std::string out = label + std::string(width[0] - label.size(), ' ');
    for (std::size_t c = 0; c < cells.size(); ++c)
      out += "  " + std::string(width[c + 1] - cells[c].size(), ' ') + cells[c];
    return out + "\n";
  };
  std::string out = line("", m.columns);
  for (const auto &r : m.rows)
    out += line(r.label, r.cells);
  return out;
}

std::string render_metrics_json(const Metrics &m) {
  ordered_json rows = ordered_json::array();
  for (const auto &r : m.rows)
    rows.push_back({{"label", r.label}, {"cells", r.cells}});
  return ordered_json{{"columns", m.columns}, {"rows", rows}}.dump(2) + "\n";
}

} // namespace clonewright
