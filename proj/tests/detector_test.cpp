#include <gtest/gtest.h>

#include "checks.hpp"
#include "clonewright/parser.hpp"
#include "clonewright/printer.hpp"
#include "clonewright/report.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "util.hpp"

using namespace clonewright;
using namespace clonewright::testing;

namespace {

std::string join(const std::vector<std::string> &xs) {
  std::string out;
  for (const auto &x : xs)
    out += x + "\n";
  return out;
}

Thresholds with(std::size_t min_len, std::size_t min_toks, double sim = 0.8) {
  Thresholds t;
  t.min_len = min_len;
  t.min_toks = min_toks;
  t.min_similarity = sim;
  return t;
}

// Every class of `strict` survives in `loose`, possibly grown: each of its
// instances lies inside an instance of one looser class.
std::vector<std::string> lost(const Project &p,
                              const std::vector<CloneClass> &strict,
                              const std::vector<CloneClass> &loose) {
  std::vector<std::string> out;
  for (const auto &c : strict) {
    bool kept = std::any_of(loose.begin(), loose.end(), [&](const CloneClass &d) {
      return std::all_of(c.instances.begin(), c.instances.end(),
                         [&](const CloneInstance &ci) {
                           return std::any_of(d.instances.begin(), d.instances.end(),
                                              [&](const CloneInstance &di) {
                                                return di.site.contains(ci.site);
                                              });
                         });
    });
    if (!kept)
      out.push_back(site_location(p, c.instances[0].site));
  }
  return out;
}

std::uint32_t function_index(const Project &p, const std::string &name) {
  const auto &fs = p.file(0).ast.functions;
  for (std::uint32_t i = 0; i < fs.size(); ++i)
    if (fs[i].name == name)
      return i;
  throw std::runtime_error("no function " + name);
}

} // namespace

TEST(Detect, PingPong) {
  Project p = build_project(load_corpus("pingpong"));
  auto classes = detect(p, with(3, 10));
  ASSERT_EQ(classes.size(), 1u);
  const CloneClass &c = classes[0];
  EXPECT_EQ(c.instances.size(), 2u);
  EXPECT_EQ(c.new_params(), 2u);
  EXPECT_EQ(c.length, 3u);
  EXPECT_FALSE(c.inter_module);
  FunDef want = parse_function("new_fun(Msg, N, NewVar_1, NewVar_2) -> "
                               "io:format(NewVar_1), timer:sleep(500), "
                               "NewVar_2 ! {msg, Msg, N - 1}.");
  EXPECT_TRUE(alpha_equal(generalise(p, c).def, want)) << print(generalise(p, c).def);
  EXPECT_EQ(print(c.instances[0].actuals[2]), "\"pong!~n\"");
  EXPECT_EQ(print(c.instances[0].actuals[3]), "a");
  EXPECT_EQ(print(c.instances[1].actuals[2]), "\"ping...~n\"");
  EXPECT_EQ(print(c.instances[1].actuals[3]), "b");
  EXPECT_EQ(render_text(p, make_report(classes)),
            read_file(data_path("golden/pingpong.txt")));
}

TEST(Detect, DefaultsMissThePingPongClone) {
  Project p = build_project(load_corpus("pingpong"));
  EXPECT_TRUE(detect(p, Thresholds{}).empty());
}

TEST(Detect, UniqueFunctions) {
  Project p = build_project({{"u.mel", "-module(u).\n"
                                       "f(X) -> X + 1.\n"
                                       "g() -> {ok, [1, 2]}.\n"
                                       "h(A, B) -> io:format(\"~p\", [A]), B.\n"}});
  EXPECT_TRUE(detect(p, with(1, 1)).empty());
  EXPECT_TRUE(detect(Project{}, Thresholds{}).empty());
}

TEST(Detect, StepOneHasNoParameters) {
  Project p = build_project(load_corpus("smm_step1"));
  auto classes = detect(p, Thresholds{});
  ASSERT_FALSE(classes.empty());
  const CloneClass &c = classes[0];
  EXPECT_EQ(c.instances.size(), 16u);
  EXPECT_EQ(c.total_params(), 0u);
  EXPECT_DOUBLE_EQ(c.similarity, 1.0);
}

TEST(Detect, StepTwoExportsFiveBindings) {
  Project p = build_project(load_corpus("smm_step2"));
  auto classes = detect(p, Thresholds{});
  ASSERT_FALSE(classes.empty());
  EXPECT_EQ(classes[0].instances.size(), 6u);
  auto g = generalise(p, classes[0]);
  EXPECT_EQ(g.exports, (std::vector<std::string>{"FilterKey1", "FilterName1",
                                                 "FilterState", "FilterKey2",
                                                 "FilterName2"}));
  EXPECT_EQ(print(g.def.clauses[0].body().back()),
            "{FilterKey1, FilterName1, FilterState, FilterKey2, FilterName2}");
}

TEST(Detect, Thresholds) {
  Project p = build_project(load_corpus("smm_52"));
  for (const auto &c : detect(p, with(1, 0, 0.5))) {
    EXPECT_GE(c.similarity, 0.5);
    EXPECT_LE(c.new_params(), 4u);
    EXPECT_GE(c.instances.size(), 2u);
  }
  Thresholds t;
  t.min_freq = 3;
  t.min_similarity = 0.5;
  for (const auto &c : detect(p, t))
    EXPECT_GE(c.instances.size(), 3u);
  t.max_new_params = 1;
  for (const auto &c : detect(p, t))
    EXPECT_LE(c.new_params(), 1u);
  Thresholds bad;
  bad.min_freq = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.min_similarity = 0;
  EXPECT_THROW(detect(p, bad), std::invalid_argument);
}

TEST(Detect, StreamsInReportOrder) {
  Project p = build_project(load_corpus("smm_52"));
  std::vector<std::size_t> seen;
  auto classes = detect(p, with(2, 10, 0.5), [&](const CloneClass &c) {
    seen.push_back(c.length);
  });
  ASSERT_EQ(seen.size(), classes.size());
  for (std::size_t i = 0; i < seen.size(); ++i)
    EXPECT_EQ(seen[i], classes[i].length);
  EXPECT_TRUE(std::is_sorted(seen.rbegin(), seen.rend()));
}

TEST(Detect, NoFalsePositives) {
  for (const char *name : {"pingpong", "smm_step1", "smm_step2", "smm_52",
                           "cell_trace", "metrics"}) {
    Project p = build_project(load_corpus(name));
    for (auto t : {Thresholds{}, with(3, 10), with(2, 1, 0.5), with(1, 1, 0.3)}) {
      auto fp = false_positives(p, detect(p, t));
      EXPECT_TRUE(fp.empty()) << name << "\n" << join(fp);
    }
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CorpusModel model(seed, {});
    Project p = build_project(model.sources());
    auto fp = false_positives(p, detect(p, with(2, 8, 0.5)));
    EXPECT_TRUE(fp.empty()) << "seed " << seed << "\n" << join(fp);
  }
}

TEST(Detect, SimilarityMonotone) {
  Project p = build_project(load_corpus("smm_52"));
  auto strict = detect(p, Thresholds{});
  auto loose = detect(p, with(5, 40, 0.5));
  EXPECT_GT(loose.size(), strict.size());
  EXPECT_TRUE(lost(p, strict, loose).empty());
}

TEST(Detect, EveryThresholdMonotone) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CorpusModel model(seed, {3, 5, 6, 4, 300});
    Project p = build_project(model.sources());
    Thresholds base = with(3, 15, 0.8);
    base.max_new_params = 2;
    base.min_freq = 3;
    auto strict = detect(p, base);
    std::vector<Thresholds> looser(5, base);
    looser[0].min_similarity = 0.5;
    looser[1].min_len = 2;
    looser[2].min_toks = 5;
    looser[3].min_freq = 2;
    looser[4].max_new_params = 4;
    for (std::size_t k = 0; k < looser.size(); ++k) {
      auto l = lost(p, strict, detect(p, looser[k]));
      EXPECT_TRUE(l.empty()) << "seed " << seed << " relaxation " << k << "\n"
                             << join(l);
    }
  }
}

TEST(Search, FindsTheFourExpressionBlock) {
  Project p = build_project(load_corpus("smm_52"));
  for (const auto &c : detect(p, Thresholds{}))
    EXPECT_NE(c.length, 4u);
  SiteRef sel{0, function_index(p, "load_filters_reset"), 0, 1, 4};
  CloneClass c = search(p, sel, Thresholds{});
  ASSERT_EQ(c.instances.size(), 3u);
  EXPECT_EQ(c.instances[0].site, sel);
  EXPECT_GE(c.similarity, 0.8);
  EXPECT_EQ(c.new_params(), 2u);
}

TEST(Search, SelectsBySourceRange) {
  Project p = build_project(load_corpus("smm_52"));
  SiteRef s = select_site(p, "smm_SUITE13.mel", {5, 3}, {8, 44});
  EXPECT_EQ(s.function, function_index(p, "load_filters_reset"));
  EXPECT_EQ(s.start, 1u);
  EXPECT_EQ(s.length, 4u);
  try {
    select_site(p, "smm_SUITE13.mel", {5, 10}, {8, 44});
    FAIL() << "no error";
  } catch (const SelectionError &e) {
    ASSERT_TRUE(e.suggestion().has_value());
    EXPECT_EQ(format_span(*e.suggestion()), "5.3-8.44");
  }
}

TEST(Search, UniqueSelection) {
  Project p = build_project(load_corpus("smm_52"));
  SiteRef sel{0, function_index(p, "code_is_loaded"), 0, 0, 2};
  EXPECT_EQ(search(p, sel, Thresholds{}).instances.size(), 1u);
}

TEST(Search, ContainedInDetect) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CorpusModel model(seed, {});
    Project p = build_project(model.sources());
    auto classes = detect(p, with(2, 0));
    for (const auto &c : classes) {
      if (c.length != 2)
        continue;
      CloneClass s = search(p, c.instances[0].site, with(2, 0));
      auto found = with(2, 0);
      found.min_len = c.length;
      auto all = oracle_detect(p, found);
      for (const auto &inst : s.instances) {
        bool covered = std::any_of(all.begin(), all.end(), [&](const OracleClass &o) {
          return std::find(o.sites.begin(), o.sites.end(), inst.site) != o.sites.end();
        });
        EXPECT_TRUE(covered || s.instances.size() < 2)
            << "seed " << seed << " " << site_location(p, inst.site);
      }
    }
  }
}

TEST(Detect, InterModuleFlag) {
  std::string body = "(X) -> Y = X + 1, io:format(\"~p~n\", [Y]), {Y, X}.\n";
  Project p = build_project({{"a.mel", "-module(a).\nf" + body + "g" + body},
                             {"b.mel", "-module(b).\nh" + body}});
  auto classes = detect(p, with(3, 10));
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].instances.size(), 3u);
  EXPECT_TRUE(classes[0].inter_module);
  Project q = build_project({{"a.mel", "-module(a).\nf" + body + "g" + body}});
  ASSERT_EQ(detect(q, with(3, 10)).size(), 1u);
  EXPECT_FALSE(detect(q, with(3, 10))[0].inter_module);
}

TEST(Detect, RemoteCallToOwnModuleIsLocal) {
  SourceFile m{"m.mel", "-module(m).\n"
                        "f(X) -> Y = helper(X), io:format(\"~p~n\", [Y]), {Y, X}.\n"
                        "g(X) -> Y = m:helper(X), io:format(\"~p~n\", [Y]), {Y, X}.\n"
                        "helper(X) -> X.\n"};
  SourceFile n{"n.mel", "-module(n).\n"
                        "k(X) -> Y = helper(X), io:format(\"~p~n\", [Y]), {Y, X}.\n"
                        "helper(X) -> X + 1.\n"};
  Project p = build_project({m});
  auto classes = detect(p, with(3, 10));
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].instances.size(), 2u);
  EXPECT_EQ(classes[0].new_params(), 0u);

  // n's helper/1 is a different function: the call is abstracted.
  Project q = build_project({m, n});
  classes = detect(q, with(3, 10));
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].instances.size(), 3u);
  EXPECT_EQ(classes[0].new_params(), 1u);
  EXPECT_TRUE(classes[0].inter_module);
}
