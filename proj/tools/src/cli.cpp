#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "clonewright/cache.hpp"
#include "clonewright/propex.hpp"
#include "clonewright/refactor.hpp"
#include "clonewright/report.hpp"
#include "clonewright/text.hpp"
#include "config.hpp"
#include "http.hpp"
#include "session.hpp"

namespace clonewright::tools {

namespace fs = std::filesystem;

namespace {

/// Failure already explained to the user; maps to exit status 1.
struct DomainFailure {};

struct Common {
  std::vector<std::string> files{"."};
  bool dry_run = false;
};

void add_threshold_flags(CLI::App *cmd, Thresholds &t) {
  cmd->add_option("--min-len", t.min_len, "minimum clone length in expressions")
      ->capture_default_str();
  cmd->add_option("--min-toks", t.min_toks, "minimum clone size in tokens")
      ->capture_default_str();
  cmd->add_option("--min-freq", t.min_freq, "minimum number of instances")
      ->capture_default_str();
  cmd->add_option("--max-new-params", t.max_new_params,
                  "maximum number of new parameters")
      ->capture_default_str();
  cmd->add_option("--sim", t.min_similarity, "similarity threshold in (0, 1]")
      ->capture_default_str();
}

void add_files(CLI::App *cmd, Common &c) {
  cmd->add_option("files", c.files, "source files or directories")
      ->capture_default_str();
}

Project load(const Common &c, std::ostream &err) {
  std::vector<FileError> errors;
  auto sources = read_sources(c.files, &errors);
  Project p = build_project(sources);
  for (const auto &e : errors)
    err << "warning: " << e.path << ": " << e.message << "\n";
  for (const auto &e : p.errors)
    err << "warning: skipping " << e.path
        << (e.span ? ":" + format_span(*e.span) : "") << ": " << e.message
        << "\n";
  return p;
}

// Matches a user-supplied path against the project's file paths.
std::string project_path(const Project &p, const std::string &path) {
  if (p.find_path(path))
    return path;
  std::error_code ec;
  auto want = fs::weakly_canonical(path, ec);
  for (const auto &f : p.files)
    if (fs::weakly_canonical(f->path, ec) == want)
      return f->path;
  throw RefactorError("file not in project: " + path);
}

SiteRef select(const Project &p, const std::string &range) {
  Location loc = parse_location(range);
  if (!loc.end)
    throw std::invalid_argument("expected FILE:L1.C1-L2.C2, got " + range);
  return select_site(p, project_path(p, loc.file), loc.begin, *loc.end);
}

void write_text(const fs::path &path, const std::string &text) {
  std::error_code ec;
  if (path.has_parent_path())
    fs::create_directories(path.parent_path(), ec);
  std::ofstream o(path, std::ios::binary);
  o << text;
  if (!o)
    throw RefactorError("cannot write " + path.string());
}

int finish(const RefactorResult &r, bool dry_run, std::ostream &out) {
  for (const auto &c : r.changes)
    out << unified_diff(c.path, c.before, c.after);
  for (const auto &o : r.outcomes)
    out << (o.applied ? "folded " : "skipped ") << o.location
        << (o.reason.empty() ? "" : ": " + o.reason) << "\n";
  if (!r.changed()) {
    out << "No changes.\n";
    return 0;
  }
  if (!dry_run) {
    write_changes(r);
    for (const auto &c : r.changes)
      out << "updated " << c.path << "\n";
  }
  return 0;
}

std::vector<CloneClass> detect_with(const Project &p, const Thresholds &t,
                                    std::ostream *stream) {
  ClassCallback cb;
  if (stream)
    cb = [&](const CloneClass &c) {
      *stream << render_class_text(p, c) << "\n";
      stream->flush();
    };
  return detect(p, t, cb);
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  std::vector<std::string> warnings;
  Config config = load_config(fs::current_path(), warnings);
  for (const auto &w : warnings)
    err << "warning: " << w << "\n";

  CLI::App app{"clonewright: clone detection and elimination for Mel"};
  app.require_subcommand(1);
  Common common;
  Thresholds t = config.thresholds;
  std::function<int()> action;

  // detect
  auto *detect_cmd = app.add_subcommand("detect", "report clone classes");
  add_threshold_flags(detect_cmd, t);
  add_files(detect_cmd, common);
  std::string json_path, report_path, order = "size", cache_path;
  bool incremental = false, quiet = false;
  detect_cmd->add_option("--json", json_path, "also write the report as JSON (- for stdout)");
  detect_cmd->add_option("--report", report_path, "also write the text report");
  detect_cmd->add_option("--order", order, "size or freq")
      ->check(CLI::IsMember({"size", "freq"}));
  detect_cmd->add_flag("--incremental", incremental,
                       "reuse results cached by earlier runs");
  detect_cmd->add_option("--cache", cache_path, "cache file for --incremental");
  detect_cmd->add_flag("-q,--quiet", quiet,
                       "do not stream classes to stderr as they are found");
  detect_cmd->callback([&] {
    action = [&] {
      t.validate();
      Project p;
      std::vector<CloneClass> classes;
      std::ostream *stream = quiet ? nullptr : &err;
      if (incremental) {
        fs::path path = cache_path.empty() ? default_cache_path(fs::current_path())
                                           : fs::path(cache_path);
        CloneCache cache;
        std::string warning;
        if (!cache.load(path, &warning))
          err << "warning: " << warning << "\n";
        std::vector<FileError> errors;
        auto sources = read_sources(common.files, &errors);
        for (const auto &e : errors)
          err << "warning: " << e.path << ": " << e.message << "\n";
        Detection d = detect_incremental(sources, t, cache);
        if (stream)
          for (const auto &c : d.classes)
            *stream << render_class_text(d.project, c) << "\n";
        for (const auto &e : d.project.errors)
          err << "warning: skipping " << e.path << ": " << e.message << "\n";
        fs::create_directories(path.parent_path());
        cache.save(path);
        p = std::move(d.project);
        classes = std::move(d.classes);
      } else {
        p = load(common, err);
        classes = detect_with(p, t, stream);
      }
      ReportDocument doc = make_report(std::move(classes), parse_order(order));
      std::string text = render_text(p, doc);
      // `--json -` replaces the text report on stdout.
      if (json_path == "-")
        out << render_json(p, doc);
      else
        out << text;
      if (!report_path.empty())
        write_text(report_path, text);
      if (!json_path.empty() && json_path != "-")
        write_text(json_path, render_json(p, doc));
      return 0;
    };
  });

  // search
  auto *search_cmd =
      app.add_subcommand("search", "find code similar to a selection");
  add_threshold_flags(search_cmd, t);
  add_files(search_cmd, common);
  std::string at;
  search_cmd->add_option("--at", at, "FILE:L1.C1-L2.C2")->required();
  search_cmd->callback([&] {
    action = [&] {
      t.validate();
      Project p = load(common, err);
      CloneClass c = search(p, select(p, at), t);
      out << render_class_text(p, c);
      return 0;
    };
  });

  // paste
  auto *paste_cmd = app.add_subcommand(
      "paste", "add the generalisation of a reported clone class to a module");
  add_threshold_flags(paste_cmd, t);
  add_files(paste_cmd, common);
  std::size_t clone_id = 0;
  EliminateOptions elim;
  std::vector<std::string> renames;
  std::vector<std::string> param_order;
  bool also_fold = false;
  paste_cmd->add_option("--clone", clone_id, "class id in the by-size report")
      ->required();
  paste_cmd->add_option("--name", elim.name, "function name")
      ->capture_default_str();
  paste_cmd->add_option("--module", elim.module, "target module");
  paste_cmd->add_option("--rename", renames, "OLD=NEW parameter rename");
  paste_cmd->add_option("--order", param_order, "parameter order (new names)")
      ->delimiter(',');
  paste_cmd->add_option("--instances", elim.instances,
                        "instance indices to fold (with --fold)")
      ->delimiter(',');
  paste_cmd->add_flag("--fold", also_fold, "also fold the class instances");
  paste_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  paste_cmd->callback([&] {
    action = [&] {
      t.validate();
      Project p = load(common, err);
      ReportDocument doc = make_report(detect(p, t));
      if (clone_id >= doc.classes.size())
        throw RefactorError("no clone " + std::to_string(clone_id));
      for (const auto &r : renames) {
        auto eq = r.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("expected OLD=NEW, got " + r);
        elim.params.rename[r.substr(0, eq)] = r.substr(eq + 1);
      }
      elim.params.order = param_order;
      const CloneClass &c = doc.classes[clone_id];
      if (also_fold)
        return finish(eliminate(p, c, elim), common.dry_run, out);
      std::string module = elim.module.empty()
                               ? p.file(c.instances.front().site.file).ast.name
                               : elim.module;
      FunDef def = edit_params(generalise(p, c, EffectTable::standard(), elim.name).def,
                               elim.params);
      return finish(add_function(p, module, def), common.dry_run, out);
    };
  });

  // fold
  auto *fold_cmd =
      app.add_subcommand("fold", "replace instances of a function body by calls");
  std::string fun;
  std::vector<std::string> fold_at;
  fold_cmd->add_option("function", fun, "[MODULE:]NAME/ARITY")->required();
  add_files(fold_cmd, common);
  fold_cmd->add_option("--at", fold_at, "instance range (default: all)");
  fold_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  fold_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      FunRef f = FunRef::parse(fun);
      std::vector<SiteRef> sites;
      for (const auto &r : fold_at)
        sites.push_back(select(p, r));
      if (fold_at.empty())
        sites = fold_instances(p, f);
      if (sites.empty()) {
        out << "No instances of " << f.str() << " found.\n";
        return 0;
      }
      return finish(fold(p, f, sites), common.dry_run, out);
    };
  });

  // rename-fn
  auto *rename_fn_cmd = app.add_subcommand("rename-fn", "rename a function");
  std::string new_name;
  rename_fn_cmd->add_option("function", fun, "[MODULE:]NAME/ARITY")->required();
  rename_fn_cmd->add_option("new_name", new_name, "new name")->required();
  add_files(rename_fn_cmd, common);
  rename_fn_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  rename_fn_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      return finish(rename_function(p, FunRef::parse(fun), new_name),
                    common.dry_run, out);
    };
  });

  // rename-var
  auto *rename_var_cmd = app.add_subcommand("rename-var", "rename a variable");
  std::string where;
  rename_var_cmd->add_option("at", where, "FILE:LINE.COL of the binding")
      ->required();
  rename_var_cmd->add_option("new_name", new_name, "new name")->required();
  add_files(rename_var_cmd, common);
  rename_var_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  rename_var_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      Location loc = parse_location(where);
      return finish(rename_variable(p, project_path(p, loc.file), loc.begin,
                                    new_name),
                    common.dry_run, out);
    };
  });

  // swap
  auto *swap_cmd = app.add_subcommand("swap", "swap two function arguments");
  std::size_t swap_i = 0, swap_j = 0;
  swap_cmd->add_option("function", fun, "[MODULE:]NAME/ARITY")->required();
  swap_cmd->add_option("i", swap_i, "first position (1-based)")->required();
  swap_cmd->add_option("j", swap_j, "second position (1-based)")->required();
  add_files(swap_cmd, common);
  swap_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  swap_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      return finish(swap_arguments(p, FunRef::parse(fun), swap_i, swap_j),
                    common.dry_run, out);
    };
  });

  // inline
  auto *inline_cmd = app.add_subcommand("inline", "inline a function call");
  inline_cmd->add_option("at", where, "FILE:LINE.COL of the call")->required();
  add_files(inline_cmd, common);
  inline_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  inline_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      Location loc = parse_location(where);
      return finish(inline_call(p, project_path(p, loc.file), loc.begin),
                    common.dry_run, out);
    };
  });

  // extract
  auto *extract_cmd =
      app.add_subcommand("extract", "extract expressions into a new function");
  extract_cmd->add_option("at", where, "FILE:L1.C1-L2.C2")->required();
  extract_cmd->add_option("new_name", new_name, "function name")->required();
  add_files(extract_cmd, common);
  extract_cmd->add_flag("--dry-run", common.dry_run, "show the diff only");
  extract_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      return finish(extract_function(p, select(p, where), new_name),
                    common.dry_run, out);
    };
  });

  // props
  auto *props_cmd =
      app.add_subcommand("props", "turn calls of a test function into a property");
  bool generalize_literals = false;
  std::string out_dir = ".";
  props_cmd->add_option("--fun", fun, "[MODULE:]NAME/ARITY")->required();
  props_cmd->add_flag("--generalize-literals", generalize_literals,
                      "replace integer literals by nat()");
  props_cmd->add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  add_files(props_cmd, common);
  props_cmd->callback([&] {
    action = [&] {
      Project p = load(common, err);
      FunRef f = FunRef::parse(fun);
      PropertySketch s = extract_property(p, f, generalize_literals);
      for (const auto &w : s.warnings)
        err << "warning: " << w << "\n";
      ResolvedFun rf = resolve_fun(p, f);
      fs::path path = fs::path(out_dir) /
                      props_file_name(p.file(rf.file).ast.name);
      write_text(path, s.text);
      out << s.text;
      err << "wrote " << path.string() << "\n";
      return 0;
    };
  });

  // metrics
  auto *metrics_cmd =
      app.add_subcommand("metrics", "summary statistics of the clone report");
  add_threshold_flags(metrics_cmd, t);
  add_files(metrics_cmd, common);
  metrics_cmd->add_option("--json", json_path, "also write the table as JSON (- for stdout)");
  metrics_cmd->callback([&] {
    action = [&] {
      t.validate();
      Project p = load(common, err);
      Metrics m = compute_metrics(detect(p, t));
      if (json_path == "-")
        out << render_metrics_json(m);
      else
        out << render_metrics_text(m);
      if (!json_path.empty() && json_path != "-")
        write_text(json_path, render_metrics_json(m));
      return 0;
    };
  });

  // serve
  auto *serve_cmd = app.add_subcommand("serve", "run the HTTP JSON service");
  add_threshold_flags(serve_cmd, t);
  add_files(serve_cmd, common);
  std::optional<int> port;
  std::string host = "127.0.0.1";
  serve_cmd->add_option("--port", port, "port (overrides CLONEWRIGHT_PORT)");
  serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
  serve_cmd->callback([&] {
    action = [&] {
      int chosen = resolve_port(config, port);
      Session session(common.files, t);
      err << "serving on http://" << host << ":" << chosen << "\n";
      if (!serve(session, host, chosen)) {
        err << "error: cannot listen on " << host << ":" << chosen << "\n";
        return 1;
      }
      return 0;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const ReadOnlyError &e) {
    err << "error: refusing to refactor: " << e.path()
        << " is not writable\n";
  } catch (const SelectionError &e) {
    err << "error: " << e.what() << "\n";
    if (const auto &s = e.suggestion())
      err << "hint: the nearest whole expressions span " << format_span(*s)
          << "\n";
  } catch (const RefactorError &e) {
    err << "error: " << e.what() << "\n";
  } catch (const MelError &e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

} // namespace clonewright::tools
