#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "clonewright/anti_unify.hpp"
#include "clonewright/detector.hpp"
#include "clonewright/parser.hpp"
#include "clonewright/printer.hpp"
#include "util.hpp"

using namespace clonewright;
using namespace clonewright::testing;

namespace {

std::string body_text(const Template &t) { return print_sequence(t.body, 0); }

Expr random_tree(std::mt19937_64 &rng, int budget) {
  static const char *leaves[] = {"1", "2", "a"};
  if (budget < 3 || rng() % 3 == 0)
    return parse_expression(leaves[rng() % 3]);
  int left = 1 + static_cast<int>(rng() % (budget - 2));
  Expr l = random_tree(rng, left);
  Expr r = random_tree(rng, budget - 1 - static_cast<int>(node_count(l)));
  return make_binop(rng() % 2 ? "+" : "-", std::move(l), std::move(r));
}

// Positions in preorder, each a path of child indices.
void positions(const Expr &e, std::vector<std::size_t> &path,
               std::vector<std::vector<std::size_t>> &out) {
  out.push_back(path);
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    path.push_back(i);
    positions(e.children[i], path, out);
    path.pop_back();
  }
}

bool prefix_of(const std::vector<std::size_t> &a,
               const std::vector<std::size_t> &b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Abstracts the chosen positions of `a`; fails unless `b` agrees with `a`
// everywhere outside them. Equal (a, b) subtree pairs share a hole.
std::optional<Expr> generalise_at(const Expr &a, const Expr &b,
                                  const std::vector<std::vector<std::size_t>> &cut,
                                  std::vector<std::size_t> &path,
                                  std::vector<std::pair<Expr, Expr>> &holes) {
  if (std::find(cut.begin(), cut.end(), path) != cut.end()) {
    std::pair<Expr, Expr> key{a, b};
    auto it = std::find(holes.begin(), holes.end(), key);
    std::size_t k = it - holes.begin();
    if (it == holes.end())
      holes.push_back(key);
    return make_var("NewVar_" + std::to_string(k + 1));
  }
  if (a.kind != b.kind || a.text != b.text ||
      a.children.size() != b.children.size())
    return std::nullopt;
  Expr out = a;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    path.push_back(i);
    auto c = generalise_at(a.children[i], b.children[i], cut, path, holes);
    path.pop_back();
    if (!c)
      return std::nullopt;
    out.children[i] = std::move(*c);
  }
  return out;
}

// Largest common generalisation over every antichain of positions of `a`.
std::optional<Expr> brute_lgg(const Expr &a, const Expr &b) {
  std::vector<std::vector<std::size_t>> pos, cut;
  std::vector<std::size_t> path;
  positions(a, path, pos);
  std::optional<Expr> best;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == pos.size()) {
      std::vector<std::pair<Expr, Expr>> holes;
      std::vector<std::size_t> p;
      auto g = generalise_at(a, b, cut, p, holes);
      if (g && !g->is_var() && (!best || node_count(*g) > node_count(*best)))
        best = g;
      return;
    }
    go(i + 1);
    for (const auto &c : cut)
      if (prefix_of(c, pos[i]))
        return;
    cut.push_back(pos[i]);
    go(i + 1);
    cut.pop_back();
  };
  go(0);
  return best;
}

std::vector<Expr> seq(const char *src) { return parse_expressions(src); }

AuInstance inst(const std::vector<Expr> &body) {
  AuInstance i;
  i.exprs = body;
  return i;
}

} // namespace

TEST(AntiUnify, WorkedExample) {
  Expr a = parse_expression("(X+3)+4");
  Expr b = parse_expression("4+(5-(3*X))");
  auto r = anti_unify_pair(a, b);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(body_text(r->tmpl), "NewVar_1 + NewVar_2");
  EXPECT_EQ(r->tmpl.params, (std::vector<std::string>{"NewVar_1", "NewVar_2"}));
  EXPECT_EQ(r->tmpl.new_params(), 2u);
  ASSERT_EQ(r->subs.size(), 2u);
  EXPECT_EQ(r->subs[0], (Substitution{parse_expression("X+3"), parse_expression("4")}));
  EXPECT_EQ(r->subs[1], (Substitution{parse_expression("4"), parse_expression("5-(3*X)")}));
  EXPECT_DOUBLE_EQ(r->similarity, 3.0 / 7.0);
}

TEST(AntiUnify, Identity) {
  Expr e = parse_expression("{ok, [1, 2 | T], f(T)}");
  auto r = anti_unify_pair(e, e);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->tmpl.body, std::vector<Expr>{e});
  EXPECT_EQ(r->tmpl.new_params(), 0u);
  EXPECT_DOUBLE_EQ(r->similarity, 1.0);
}

TEST(AntiUnify, PingPongBodies) {
  Project p = build_project(load_corpus("pingpong"));
  auto r = anti_unify({make_instance(p, {0, 0, 0, 0, 3}),
                       make_instance(p, {0, 1, 0, 0, 3})});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->tmpl.params,
            (std::vector<std::string>{"Msg", "N", "NewVar_1", "NewVar_2"}));
  EXPECT_EQ(r->tmpl.free_params, 2u);
  EXPECT_EQ(body_text(r->tmpl), "io:format(NewVar_1),\n"
                                "timer:sleep(500),\n"
                                "NewVar_2 ! {msg, Msg, N - 1}");
  EXPECT_EQ(print(r->subs[0][2]), "\"pong!~n\"");
  EXPECT_EQ(print(r->subs[0][3]), "a");
  EXPECT_EQ(print(r->subs[1][2]), "\"ping...~n\"");
  EXPECT_EQ(print(r->subs[1][3]), "b");
}

TEST(AntiUnify, MemoizedHoles) {
  auto a = seq("{1, 2, 3, 1, 5}");
  auto b = seq("{a, b, c, a, e}");
  auto r = anti_unify({inst(a), inst(b)});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->tmpl.new_params(), 4u);
  EXPECT_EQ(body_text(r->tmpl),
            "{NewVar_1, NewVar_2, NewVar_3, NewVar_1, NewVar_4}");
}

TEST(AntiUnify, PatternMismatchFails) {
  auto a = seq("{ok, A} = f(), A");
  auto b = seq("{ok, B} = f(), B");
  auto c = seq("{error, C} = f(), C");
  EXPECT_TRUE(anti_unify({inst(a), inst(b)}).has_value());
  EXPECT_FALSE(anti_unify({inst(a), inst(b), inst(c)}).has_value());
}

TEST(AntiUnify, LocalBindersCorrespond) {
  auto a = seq("X = f(), g(X)");
  auto b = seq("Y = f(), g(Y)");
  auto c = seq("Y = f(), g(Z)");
  auto r = anti_unify({inst(a), inst(b)});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->tmpl.new_params(), 0u);
  // Z is free: abstracting the use of a local binding would capture it.
  EXPECT_FALSE(anti_unify({inst(a), inst(c)}).has_value());
}

TEST(AntiUnify, CalleeMismatchAbstractsTheCall) {
  auto r = anti_unify_pair(parse_expression("{f(1), 2}"),
                           parse_expression("{g(1), 2}"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(body_text(r->tmpl), "{NewVar_1, 2}");
}

TEST(AntiUnify, AllPlaceholderTemplateFails) {
  EXPECT_FALSE(anti_unify_pair(parse_expression("f(1)"),
                               parse_expression("{1}")).has_value());
}

TEST(AntiUnify, SimilarityByNodeCount) {
  Template t;
  t.params = {"NewVar_1", "NewVar_2"};
  t.body = {parse_expression("NewVar_1 + NewVar_2")};
  auto a = seq("(X+3)+4");
  auto b = seq("4+(5-(3*X))");
  EXPECT_DOUBLE_EQ(similarity(t, {a}), 0.6);
  EXPECT_DOUBLE_EQ(similarity(t, {a, b}), 3.0 / 7.0);
  Template same;
  same.body = a;
  EXPECT_DOUBLE_EQ(similarity(same, {a}), 1.0);
}

TEST(AntiUnify, LeastGeneralOnSmallTrees) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 400; ++round) {
    Expr a = random_tree(rng, 1 + static_cast<int>(rng() % 7));
    Expr b = random_tree(rng, 1 + static_cast<int>(rng() % 7));
    auto want = brute_lgg(a, b);
    auto got = anti_unify_pair(a, b);
    ASSERT_EQ(got.has_value(), want.has_value())
        << print(a) << " / " << print(b);
    if (got)
      EXPECT_EQ(body_text(got->tmpl), print(*want))
          << print(a) << " / " << print(b);
  }
}

TEST(AntiUnify, InstantiationReproducesInstances) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::vector<Expr>> bodies(2 + rng() % 3);
    for (auto &b : bodies)
      b = {random_tree(rng, 9), random_tree(rng, 5)};
    std::vector<AuInstance> in;
    for (const auto &b : bodies)
      in.push_back(inst(b));
    auto r = anti_unify(in);
    if (!r)
      continue;
    for (std::size_t i = 0; i < bodies.size(); ++i)
      EXPECT_EQ(instantiate(r->tmpl, r->subs[i]), bodies[i]) << round;
  }
}

TEST(AntiUnify, FoldOrderIndependent) {
  std::mt19937_64 rng(5);
  std::size_t checked = 0;
  for (int round = 0; round < 300; ++round) {
    Expr base = random_tree(rng, 9);
    std::vector<std::vector<Expr>> bodies;
    for (int k = 0; k < 3; ++k) {
      Expr e = base;
      if (!e.children.empty())
        e.children[rng() % e.children.size()] = random_tree(rng, 3);
      bodies.push_back({e});
    }
    std::vector<std::size_t> order = {0, 1, 2};
    std::optional<std::string> first;
    bool ok = true;
    do {
      std::vector<AuInstance> in;
      for (auto i : order)
        in.push_back(inst(bodies[i]));
      auto r = anti_unify(in);
      std::string got = r ? body_text(r->tmpl) : "<none>";
      if (!first)
        first = got;
      ok &= got == *first;
    } while (std::next_permutation(order.begin(), order.end()));
    EXPECT_TRUE(ok) << round;
    checked += *first != "<none>";
  }
  EXPECT_GT(checked, 100u);
}
