#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "config.hpp"
#include "http.hpp"
#include "session.hpp"
#include "util.hpp"

using namespace clonewright;
using namespace clonewright::testing;
using namespace clonewright::tools;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Thresholds pingpong_thresholds() {
  Thresholds t;
  t.min_len = 3;
  t.min_toks = 10;
  return t;
}

json body(const Response &r) { return json::parse(r.body); }

std::string request(std::uint64_t revision, json fields = json::object()) {
  fields["revision"] = revision;
  return fields.dump();
}

} // namespace

TEST(Config, ParsesKeysAndWarns) {
  std::vector<std::string> warnings;
  Config c = parse_config("# thresholds\n"
                          "min_len = 3\n"
                          "min-toks = 12   # inline\n"
                          "sim = 0.5\n"
                          "port = \"9000\"\n"
                          "colour = red\n"
                          "max_new_params = many\n"
                          "nonsense\n",
                          warnings);
  EXPECT_EQ(c.thresholds.min_len, 3u);
  EXPECT_EQ(c.thresholds.min_toks, 12u);
  EXPECT_DOUBLE_EQ(c.thresholds.min_similarity, 0.5);
  EXPECT_EQ(c.thresholds.max_new_params, Thresholds{}.max_new_params);
  EXPECT_EQ(c.port, 9000);
  ASSERT_EQ(warnings.size(), 3u);
  EXPECT_NE(warnings[0].find(":6:"), std::string::npos);
  EXPECT_NE(warnings[0].find("colour"), std::string::npos);
}

TEST(Config, PortPrecedence) {
  Config c;
  unsetenv(kPortVariable);
  EXPECT_EQ(resolve_port(c, std::nullopt), kDefaultPort);
  c.port = 9001;
  EXPECT_EQ(resolve_port(c, std::nullopt), 9001);
  setenv(kPortVariable, "9002", 1);
  EXPECT_EQ(resolve_port(c, std::nullopt), 9002);
  EXPECT_EQ(resolve_port(c, 9003), 9003);
  unsetenv(kPortVariable);
}

TEST(Location, Parse) {
  Location a = parse_location("dir/a.mel:5.3-8.44");
  EXPECT_EQ(a.file, "dir/a.mel");
  EXPECT_EQ(a.begin.line, 5);
  EXPECT_EQ(a.begin.col, 3);
  ASSERT_TRUE(a.end);
  EXPECT_EQ(a.end->col, 44);
  Location b = parse_location("a.mel:2.9");
  EXPECT_FALSE(b.end);
  for (const char *bad : {"a.mel", ":1.1", "a.mel:1", "a.mel:0.1", "a.mel:1.x",
                          "a.mel:1.1-2"})
    EXPECT_THROW(parse_location(bad), std::invalid_argument) << bad;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  dir.populate(load_corpus("pingpong"));
  std::string root = dir.path().string();

  CliRun ok = cli({"detect", "-q", "--min-len", "3", "--min-toks", "10", root});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("This code has been cloned once:"), std::string::npos);

  EXPECT_EQ(cli({"detect", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"detect", "--min-freq", "1", root}).code, 2);
  CliRun missing = cli({"rename-fn", "nosuch/2", "other", root});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);
}

TEST(Cli, EmptyDirectory) {
  TempDir dir;
  CliRun r = cli({"detect", "-q", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "No clones found.\n");
}

TEST(Cli, IdentitySwapIsANoOp) {
  TempDir dir;
  dir.populate({{"m.mel", "-module(m).\nf(A, B, C) -> {A, B, C}.\ng() -> f(1, 2, 3).\n"}});
  std::string before = read_file(dir / "m.mel");
  CliRun r = cli({"swap", "f/3", "2", "2", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("No changes."), std::string::npos);
  EXPECT_EQ(read_file(dir / "m.mel"), before);
}

TEST(Cli, DryRunLeavesFiles) {
  TempDir dir;
  dir.populate(load_corpus("pingpong"));
  std::string before = read_file(dir / "pingpong.mel");
  CliRun r = cli({"paste", "--clone", "0", "--fold", "--dry-run", "--min-len", "3",
               "--min-toks", "10", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("+new_fun("), std::string::npos) << r.out;
  EXPECT_EQ(read_file(dir / "pingpong.mel"), before);
}

TEST(Session, ApplyMatchesCliAndUndoRestores) {
  TempDir via_cli, via_service;
  via_cli.populate(load_corpus("pingpong"));
  via_service.populate(load_corpus("pingpong"));
  std::string original = read_file(via_service / "pingpong.mel");

  CliRun r = cli({"paste", "--clone", "0", "--fold", "--min-len", "3", "--min-toks",
               "10", via_cli.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;

  Session s({via_service.path().string()}, pingpong_thresholds());
  EXPECT_EQ(s.revision(), 1u);
  json rep = body(s.report("size"));
  ASSERT_EQ(rep["classes"].size(), 1u);

  Response pv = s.preview(request(1, {{"refactoring", "eliminate"},
                                      {"args", {{"clone", 0}}}}));
  ASSERT_EQ(pv.status, 200) << pv.body;
  EXPECT_EQ(body(pv)["diffs"].size(), 1u);
  EXPECT_EQ(read_file(via_service / "pingpong.mel"), original);

  Response ap = s.apply(request(1));
  ASSERT_EQ(ap.status, 200) << ap.body;
  EXPECT_EQ(s.revision(), 2u);
  EXPECT_EQ(body(ap)["revision"], 2);
  EXPECT_EQ(read_file(via_service / "pingpong.mel"),
            read_file(via_cli / "pingpong.mel"));

  Response un = s.undo(request(2));
  ASSERT_EQ(un.status, 200) << un.body;
  EXPECT_EQ(s.revision(), 3u);
  EXPECT_EQ(read_file(via_service / "pingpong.mel"), original);
  EXPECT_EQ(s.undo(request(3)).status, 422);
}

TEST(Session, StaleRevisionsConflict) {
  TempDir dir;
  dir.populate(load_corpus("pingpong"));
  Session s({dir.path().string()}, pingpong_thresholds());
  std::string req = request(1, {{"refactoring", "eliminate"}, {"args", {{"clone", 0}}}});
  ASSERT_EQ(s.preview(req).status, 200);
  ASSERT_EQ(s.apply(request(1)).status, 200);
  // A second client still holding revision 1.
  EXPECT_EQ(s.preview(req).status, 409);
  EXPECT_EQ(s.apply(request(1)).status, 409);
  EXPECT_EQ(s.thresholds(request(1, {{"thresholds", {{"sim", 0.5}}}})).status, 409);
  EXPECT_EQ(s.apply(request(2)).status, 422); // nothing previewed
  EXPECT_EQ(s.apply("{}").status, 400);
  EXPECT_EQ(s.preview("not json").status, 400);
}

TEST(Session, PreconditionFailuresAre422) {
  TempDir dir;
  dir.populate(load_corpus("pingpong"));
  Session s({dir.path().string()}, pingpong_thresholds());
  std::string file = (dir / "pingpong.mel").string();
  EXPECT_EQ(s.preview(request(1, {{"refactoring", "eliminate"},
                                  {"args", {{"clone", 7}}}})).status, 422);
  EXPECT_EQ(s.preview(request(1, {{"refactoring", "rename_function"},
                                  {"args", {{"function", "nosuch/1"},
                                            {"name", "x"}}}})).status, 422);
  EXPECT_EQ(s.preview(request(1, {{"refactoring", "teleport"}})).status, 400);
  EXPECT_EQ(s.clone(3).status, 404);
  EXPECT_EQ(s.source("nope.mel").status, 404);
  Response src = s.source(file);
  ASSERT_EQ(src.status, 200);
  EXPECT_EQ(body(src)["text"], read_file(file));
  EXPECT_EQ(s.thresholds(request(1, {{"thresholds", {{"minFreq", 1}}}})).status, 422);
  EXPECT_EQ(s.revision(), 1u);
}

TEST(Session, ThresholdChangeBumpsRevision) {
  TempDir dir;
  dir.populate(load_corpus("smm_52"));
  Session s({dir.path().string()}, Thresholds{});
  std::size_t before = body(s.report("size"))["classes"].size();
  Response r = s.thresholds(request(1, {{"thresholds", {{"sim", 0.5}}}}));
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(s.revision(), 2u);
  EXPECT_GT(body(r)["classes"].size(), before);
}

TEST(Http, EndpointsOverLoopback) {
  TempDir dir;
  dir.populate(load_corpus("pingpong"));
  Session s({dir.path().string()}, pingpong_thresholds());
  httplib::Server server;
  mount(server, s);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client c("127.0.0.1", port);
  auto rep = c.Get("/report?order=freq");
  ASSERT_TRUE(rep);
  EXPECT_EQ(rep->status, 200);
  EXPECT_EQ(json::parse(rep->body)["classes"].size(), 1u);
  auto cl = c.Get("/clone/0");
  ASSERT_TRUE(cl);
  EXPECT_EQ(cl->status, 200);
  auto pv = c.Post("/preview",
                   request(1, {{"refactoring", "eliminate"}, {"args", {{"clone", 0}}}}),
                   "application/json");
  ASSERT_TRUE(pv);
  EXPECT_EQ(pv->status, 200);
  auto stale = c.Post("/apply", request(6), "application/json");
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->status, 409);
  auto ap = c.Post("/apply", request(1), "application/json");
  ASSERT_TRUE(ap);
  EXPECT_EQ(ap->status, 200);
  EXPECT_EQ(json::parse(ap->body)["revision"], 2);

  server.stop();
  t.join();
}
