#pragma once

#include <string>
#include <vector>

#include "clonewright/detector.hpp"
#include "clonewright/refactor.hpp"

namespace clonewright {

enum class ReportOrder { BySize, ByFrequency };

/// Accepts "size" and "freq"/"frequency".
ReportOrder parse_order(std::string_view s);

struct ReportDocument {
  ReportOrder order = ReportOrder::BySize;
  std::vector<CloneClass> classes;
};

/// Sorts by the key (largest first), ties by first-instance location.
ReportDocument make_report(std::vector<CloneClass> classes,
                           ReportOrder order = ReportOrder::BySize);

/// "expression" or "function" (every instance is a whole clause body).
std::string clone_kind(const Project &p, const CloneClass &c);

/// "once", "twice", "3 times", ...
std::string times_phrase(std::size_t extra_copies);

std::string render_class_text(const Project &p, const CloneClass &c,
                              const EffectTable &effects = EffectTable::standard());
std::string render_text(const Project &p, const ReportDocument &doc,
                        const EffectTable &effects = EffectTable::standard());
std::string render_json(const Project &p, const ReportDocument &doc,
                        const EffectTable &effects = EffectTable::standard());
/// A single class object as it appears inside render_json's classes array.
std::string render_class_json(const Project &p, const CloneClass &c,
                              const EffectTable &effects = EffectTable::standard());

struct MetricsRow {
  std::string label;
  std::vector<std::string> cells;
};

/// Summary table over a set of classes: median/mean/max/min per column,
/// the standout classes, and the class count.
struct Metrics {
  std::vector<std::string> columns;
  std::vector<MetricsRow> rows;
};

Metrics compute_metrics(const std::vector<CloneClass> &classes);
std::string render_metrics_text(const Metrics &m);
std::string render_metrics_json(const Metrics &m);

} // namespace clonewright
