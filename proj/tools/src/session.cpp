#include "session.hpp"

#include <fstream>
#include <sstream>

#include "clonewright/text.hpp"

namespace clonewright::tools {

using nlohmann::json;

Location parse_location(std::string_view text) {
  auto bad = [&] {
    return std::invalid_argument("expected FILE:LINE.COL or "
                                 "FILE:LINE.COL-LINE.COL, got " +
                                 std::string(text));
  };
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    throw bad();
  Location loc;
  loc.file = std::string(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  auto pos = [&](std::string_view s) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos)
      throw bad();
    Pos p;
    try {
      std::size_t used = 0;
      p.line = std::stoi(std::string(s.substr(0, dot)), &used);
      if (used != dot)
        throw bad();
      std::string col(s.substr(dot + 1));
      p.col = std::stoi(col, &used);
      if (used != col.size())
        throw bad();
    } catch (const std::logic_error &) {
      throw bad();
    }
    if (p.line < 1 || p.col < 1)
      throw bad();
    return p;
  };
  auto dash = rest.find('-');
  if (dash == std::string_view::npos) {
    loc.begin = pos(rest);
  } else {
    loc.begin = pos(rest.substr(0, dash));
    loc.end = pos(rest.substr(dash + 1));
  }
  return loc;
}

namespace {

Response make(int status, json body) { return {status, body.dump()}; }

Response error(int status, std::uint64_t revision, const std::string &msg) {
  return make(status, {{"revision", revision}, {"error", msg}});
}

json thresholds_json(const Thresholds &t) {
  return {{"minLen", t.min_len},
          {"minToks", t.min_toks},
          {"minFreq", t.min_freq},
          {"maxNewParams", t.max_new_params},
          {"sim", t.min_similarity}};
}

Thresholds thresholds_from(const json &j, Thresholds t) {
  auto get = [&](const char *key, auto &field) {
    if (j.contains(key))
      field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("minLen", t.min_len);
  get("minToks", t.min_toks);
  get("minFreq", t.min_freq);
  get("maxNewParams", t.max_new_params);
  get("sim", t.min_similarity);
  t.validate();
  return t;
}

// Class JSON text with its report id spliced in.
std::string class_with_id(const Project &p, const CloneClass &c,
                          std::size_t id) {
  std::string text = render_class_json(p, c);
  return "{\"id\":" + std::to_string(id) + "," + text.substr(1);
}

// Embeds pre-rendered JSON text in place of a placeholder string value.
std::string splice(const json &outer, const std::string &key,
                   const std::string &raw) {
  std::string text = outer.dump();
  std::string marker = "\"@" + key + "@\"";
  auto at = text.find(marker);
  return text.replace(at, marker.size(), raw);
}

json changes_json(const RefactorResult &r) {
  json diffs = json::array();
  for (const auto &c : r.changes)
    diffs.push_back({{"file", c.path},
                     {"diff", unified_diff(c.path, c.before, c.after)}});
  json outcomes = json::array();
  for (const auto &o : r.outcomes)
    outcomes.push_back({{"location", o.location},
                        {"applied", o.applied},
                        {"reason", o.reason}});
  return {{"diffs", diffs}, {"outcomes", outcomes}};
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::uint64_t> request_revision(const json &req) {
  if (!req.contains("revision"))
    return std::nullopt;
  return req.at("revision").get<std::uint64_t>();
}

} // namespace

Session::Session(std::vector<std::string> inputs, Thresholds t)
    : inputs_(std::move(inputs)) {
  t.validate();
  state_ = detect_state(1, t);
}

std::shared_ptr<const Session::State> Session::state() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void Session::publish(std::shared_ptr<const State> s) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(s);
}

std::uint64_t Session::revision() const { return state()->revision; }

std::shared_ptr<const Session::State>
Session::detect_state(std::uint64_t revision, const Thresholds &t) {
  std::vector<FileError> read_errors;
  auto sources = read_sources(inputs_, &read_errors);
  Detection d = detect_incremental(sources, t, cache_);
  auto s = std::make_shared<State>();
  s->revision = revision;
  s->thresholds = t;
  for (const auto &e : read_errors)
    s->parse_errors.push_back(e.path + ": " + e.message);
  for (const auto &e : d.project.errors)
    s->parse_errors.push_back(
        e.path + (e.span ? ":" + format_span(*e.span) : "") + ": " + e.message);
  s->report = make_report(std::move(d.classes), ReportOrder::BySize);
  s->project = std::move(d.project);
  return s;
}

Response Session::stale(std::uint64_t have) const {
  return error(409, revision(),
               "stale revision " + std::to_string(have) + "; current is " +
                   std::to_string(revision()));
}

Response Session::report(std::string_view order) const {
  auto s = state();
  ReportOrder o;
  try {
    o = order.empty() ? ReportOrder::BySize : parse_order(order);
  } catch (const std::invalid_argument &e) {
    return error(400, s->revision, e.what());
  }
  std::vector<std::size_t> ids(s->report.classes.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    ids[i] = i;
  if (o == ReportOrder::ByFrequency)
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return s->report.classes[a].instances.size() >
             s->report.classes[b].instances.size();
    });
  std::string classes = "[";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k)
      classes += ",";
    classes += class_with_id(s->project, s->report.classes[ids[k]], ids[k]);
  }
  classes += "]";
  json outer = {{"revision", s->revision},
                {"order", o == ReportOrder::BySize ? "size" : "freq"},
                {"thresholds", thresholds_json(s->thresholds)},
                {"errors", s->parse_errors},
                {"metrics", json::parse(render_metrics_json(
                                compute_metrics(s->report.classes)))},
                {"classes", "@classes@"}};
  return {200, splice(outer, "classes", classes)};
}

Response Session::source(const std::string &file) const {
  auto s = state();
  auto id = s->project.find_path(file);
  if (!id)
    return error(404, s->revision, "unknown file " + file);
  return make(200, {{"revision", s->revision},
                    {"file", file},
                    {"module", s->project.file(*id).ast.name},
                    {"text", s->project.file(*id).text}});
}

Response Session::clone(std::size_t id) const {
  auto s = state();
  if (id >= s->report.classes.size())
    return error(404, s->revision, "no clone " + std::to_string(id));
  const CloneClass &c = s->report.classes[id];
  json outer = {{"revision", s->revision},
                {"text", render_class_text(s->project, c)},
                {"clone", "@clone@"}};
  return {200, splice(outer, "clone", class_with_id(s->project, c, id))};
}

RefactorResult Session::build_refactoring(const State &s, const json &req) {
  const Project &p = s.project;
  std::string kind = req.at("refactoring").get<std::string>();
  json args = req.value("args", json::object());
  auto at = [&](const char *key) {
    Location loc = parse_location(args.at(key).get<std::string>());
    return loc;
  };
  auto site_at = [&](const std::string &text) {
    Location loc = parse_location(text);
    if (!loc.end)
      throw std::invalid_argument("expected a range: " + text);
    return select_site(p, loc.file, loc.begin, *loc.end);
  };

  if (kind == "eliminate") {
    std::size_t id = args.at("clone").get<std::size_t>();
    if (id >= s.report.classes.size())
      throw RefactorError("no clone " + std::to_string(id));
    EliminateOptions o;
    o.name = args.value("name", std::string("new_fun"));
    o.module = args.value("module", std::string());
    if (args.contains("rename"))
      o.params.rename =
          args.at("rename").get<std::map<std::string, std::string>>();
    if (args.contains("order"))
      o.params.order = args.at("order").get<std::vector<std::string>>();
    if (args.contains("instances")) {
      o.instances = args.at("instances").get<std::vector<std::size_t>>();
      if (o.instances.empty())
        throw RefactorError("no instances selected");
    }
    return eliminate(p, s.report.classes[id], o);
  }
  if (kind == "fold") {
    FunRef f = FunRef::parse(args.at("function").get<std::string>());
    std::vector<SiteRef> sites;
    if (args.contains("instances")) {
      for (const auto &loc : args.at("instances"))
        sites.push_back(site_at(loc.get<std::string>()));
    } else {
      sites = fold_instances(p, f);
    }
    return fold(p, f, sites);
  }
  if (kind == "rename_function")
    return rename_function(p, FunRef::parse(args.at("function").get<std::string>()),
                           args.at("name").get<std::string>());
  if (kind == "rename_variable") {
    Location loc = at("at");
    return rename_variable(p, loc.file, loc.begin,
                           args.at("name").get<std::string>());
  }
  if (kind == "swap")
    return swap_arguments(p, FunRef::parse(args.at("function").get<std::string>()),
                          args.at("i").get<std::size_t>(),
                          args.at("j").get<std::size_t>());
  if (kind == "inline") {
    Location loc = at("at");
    return inline_call(p, loc.file, loc.begin);
  }
  if (kind == "extract")
    return extract_function(p, site_at(args.at("at").get<std::string>()),
                            args.at("name").get<std::string>());
  throw std::invalid_argument("unknown refactoring " + kind);
}

Response Session::preview(const std::string &request) {
  std::lock_guard lock(mutate_);
  auto s = state();
  json req;
  try {
    req = json::parse(request);
  } catch (const json::exception &e) {
    return error(400, s->revision, std::string("bad JSON: ") + e.what());
  }
  try {
    if (auto have = request_revision(req); have && *have != s->revision)
      return stale(*have);
    RefactorResult r = build_refactoring(*s, req);
    json body = changes_json(r);
    body["revision"] = s->revision;
    bool any_applied = r.outcomes.empty() ||
                       std::any_of(r.outcomes.begin(), r.outcomes.end(),
                                   [](const auto &o) { return o.applied; });
    if (!any_applied) {
      body["error"] = "no instance could be refactored";
      return make(422, body);
    }
    pending_ = Pending{s->revision, std::move(r)};
    return make(200, body);
  } catch (const SelectionError &e) {
    json body = {{"revision", s->revision}, {"error", e.what()}};
    if (const auto &sug = e.suggestion())
      body["suggestion"] =
          s->project.file(sug->file).path + ":" + format_span(*sug);
    return make(422, body);
  } catch (const MelError &e) {
    return error(422, s->revision, e.what());
  } catch (const RefactorError &e) {
    return error(422, s->revision, e.what());
  } catch (const json::exception &e) {
    return error(400, s->revision, std::string("bad request: ") + e.what());
  } catch (const std::invalid_argument &e) {
    return error(400, s->revision, e.what());
  }
}

Response Session::apply(const std::string &request) {
  std::lock_guard lock(mutate_);
  auto s = state();
  std::optional<std::uint64_t> have;
  try {
    have = request_revision(json::parse(request));
  } catch (const json::exception &e) {
    return error(400, s->revision, std::string("bad request: ") + e.what());
  }
  if (!have)
    return error(400, s->revision, "missing revision");
  if (*have != s->revision)
    return stale(*have);
  if (!pending_)
    return error(422, s->revision, "no pending preview");
  if (pending_->revision != s->revision)
    return stale(pending_->revision);
  const RefactorResult &r = pending_->result;
  Snapshot snap;
  for (const auto &c : r.changes) {
    if (read_file(c.path) != c.before)
      return error(409, s->revision, c.path + " changed on disk");
    snap.emplace_back(c.path, c.before);
  }
  try {
    write_changes(r);
  } catch (const RefactorError &e) {
    return error(422, s->revision, e.what());
  }
  undo_.push_back(std::move(snap));
  pending_.reset();
  publish(detect_state(s->revision + 1, s->thresholds));
  return report("size");
}

Response Session::undo(const std::string &request) {
  std::lock_guard lock(mutate_);
  auto s = state();
  std::optional<std::uint64_t> have;
  try {
    have = request_revision(json::parse(request));
  } catch (const json::exception &e) {
    return error(400, s->revision, std::string("bad request: ") + e.what());
  }
  if (!have)
    return error(400, s->revision, "missing revision");
  if (*have != s->revision)
    return stale(*have);
  if (undo_.empty())
    return error(422, s->revision, "nothing to undo");
  RefactorResult restore;
  for (const auto &[path, bytes] : undo_.back())
    restore.changes.push_back({path, read_file(path), bytes});
  try {
    write_changes(restore);
  } catch (const RefactorError &e) {
    return error(422, s->revision, e.what());
  }
  undo_.pop_back();
  pending_.reset();
  publish(detect_state(s->revision + 1, s->thresholds));
  return report("size");
}

Response Session::thresholds(const std::string &request) {
  std::lock_guard lock(mutate_);
  auto s = state();
  Thresholds t;
  try {
    json req = json::parse(request);
    auto have = request_revision(req);
    if (!have)
      return error(400, s->revision, "missing revision");
    if (*have != s->revision)
      return stale(*have);
    t = thresholds_from(req.value("thresholds", json::object()), s->thresholds);
  } catch (const json::exception &e) {
    return error(400, s->revision, std::string("bad request: ") + e.what());
  } catch (const std::invalid_argument &e) {
    return error(422, s->revision, e.what());
  }
  pending_.reset();
  publish(detect_state(s->revision + 1, t));
  return report("size");
}

} // namespace clonewright::tools
