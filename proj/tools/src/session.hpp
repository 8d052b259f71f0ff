#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clonewright/cache.hpp"
#include "clonewright/detector.hpp"
#include "clonewright/refactor.hpp"
#include "clonewright/report.hpp"

namespace clonewright::tools {

struct Response {
  int status = 200;
  std::string body; // JSON
};

/// Service state behind the HTTP API. Reads work on an immutable snapshot;
/// mutations are serialized and each one bumps the revision.
class Session {
public:
  Session(std::vector<std::string> inputs, Thresholds t);

  Response report(std::string_view order) const;
  Response source(const std::string &file) const;
  Response clone(std::size_t id) const;
  Response preview(const std::string &request);
  Response apply(const std::string &request);
  Response undo(const std::string &request);
  Response thresholds(const std::string &request);

  std::uint64_t revision() const;

private:
  struct State {
    std::uint64_t revision = 0;
    Thresholds thresholds;
    Project project;
    ReportDocument report; // by size; ids are indices
    std::vector<std::string> parse_errors;
  };
  struct Pending {
    std::uint64_t revision = 0;
    RefactorResult result;
  };
  using Snapshot = std::vector<std::pair<std::string, std::string>>;

  std::shared_ptr<const State> state() const;
  void publish(std::shared_ptr<const State> s);
  std::shared_ptr<const State> detect_state(std::uint64_t revision,
                                            const Thresholds &t);
  RefactorResult build_refactoring(const State &s, const nlohmann::json &req);
  Response stale(std::uint64_t have) const;

  std::vector<std::string> inputs_;
  CloneCache cache_;
  std::mutex mutate_;
  mutable std::mutex state_mutex_;
  std::shared_ptr<const State> state_;
  std::optional<Pending> pending_;
  std::vector<Snapshot> undo_;
};

/// Parses `FILE:L.C` and `FILE:L1.C1-L2.C2`.
struct Location {
  std::string file;
  Pos begin;
  std::optional<Pos> end;
};
Location parse_location(std::string_view text);

} // namespace clonewright::tools
