#include <doctest.h>

#include <set>

#include "ccl/analyses.hpp"
#include "ccl/error.hpp"
#include "ccl/parser.hpp"
#include "model_util.hpp"

using namespace ccl;
using testutil::load_flat;
using testutil::student_vote;

namespace {

Expr ex(const std::string &s) {
  std::string err;
  auto e = parse_expr(s, &err);
  REQUIRE_MESSAGE(e, err);
  // Untyped names become int symbolic inputs.
  std::map<std::string, Expr> sub;
  for_each_node(*e, [&](const Expr &n) {
    if (n.node().kind == ExprKind::Var)
      sub.emplace(n.node().name, make_sym(n.node().name, TypeTag::int_()));
  });
  return simplify(substitute(*e, sub));
}

InterestingInput path(const std::vector<std::string> &conds,
                      const std::string &out) {
  InterestingInput in;
  for (const auto &c : conds) {
    BranchRecord r;
    r.transition = "t";
    r.cond = ex(c);
    r.taken = true;
    in.path_condition.records.push_back(r);
  }
  in.outputs_symbolic.push_back({{"y", ex(out)}});
  return in;
}

std::vector<Expr> list(const std::vector<std::string> &xs) {
  std::vector<Expr> out;
  for (const auto &x : xs)
    out.push_back(ex(x));
  return out;
}

} // namespace

TEST_CASE("minimality groups equal canonical outputs") {
  auto r = minimality({path({}, "x + 1 - 4"), path({}, "x - 5 + 2")});
  CHECK(r.groups.size() == 1);
  CHECK(r.duplicate_ratio == doctest::Approx(0.5));
  CHECK(minimality({path({}, "x")}).duplicate_ratio == 0.0);
  CHECK_THROWS_AS(minimality({}), Error);
}

TEST_CASE("redundant paths share condition and output") {
  auto a = path({"x + 1 < 5"}, "x + 1 - 2");
  auto b = path({"x + 2 < 6"}, "x + 2 - 3");
  auto c = path({"x < 3"}, "x - 1");
  auto pairs = redundancy_pairs({a, b, c});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a == 0);
  CHECK(pairs[0].b == 1);
  CHECK(redundancy_pairs({a, a}).size() == 1);
}

TEST_CASE("nondeterministic alternatives and disjoint paths") {
  SolverConfig s;
  CHECK(nondet_compare(list({"x > 5", "y + 2 < 6"}), list({"x > 5", "y + 2 < 8"}),
                       s) == NondetVerdict::Alternative);
  CHECK(nondet_compare(list({"x > 5", "y + 2 < 6"}), list({"x < 3", "y + 2 < 8"}),
                       s) == NondetVerdict::Disjoint);
  CHECK(nondet_compare(list({"x > 5"}), list({"x > 5", "y < 1"}), s) ==
        NondetVerdict::Disjoint);
  auto l = list({"x > 5", "y < 2"});
  CHECK(nondet_compare(l, l, s) == NondetVerdict::Alternative);
  auto rep = nondet_pairs({path({"x > 5", "y + 2 < 6"}, "0"),
                           path({"x > 5", "y + 2 < 8"}, "0"),
                           path({"x < 3", "y < 0"}, "0")},
                          s, NondetMode::Full);
  REQUIRE(rep.pairs.size() == 1);
  CHECK(rep.pairs[0].b == 1);
  auto ex_only = nondet_pairs({path({"x > 5"}, "0"), path({"x > 4"}, "0"),
                               path({"x > 3"}, "0")},
                              s, NondetMode::ExistenceOnly);
  CHECK(ex_only.exists);
  CHECK(ex_only.solver_calls == 1);
}

TEST_CASE("property: nondet relation is symmetric") {
  SolverConfig s;
  std::vector<std::vector<Expr>> ls = {
      list({"x > 5", "y < 1"}), list({"x < 3", "y < 1"}),
      list({"x >= 5", "y > 0"}), list({"x == 6", "y == 0"})};
  for (const auto &a : ls)
    for (const auto &b : ls)
      CHECK(nondet_compare(a, b, s) == nondet_compare(b, a, s));
}

TEST_CASE("coverage of the student vote model") {
  auto flat = student_vote();
  for (int len = 1; len <= 3; ++len) {
    ControllerConfig cfg;
    cfg.input_length = len;
    auto res = explore(flat, cfg);
    auto cov = coverage(res.interesting, flat);
    CHECK(cov.transitions_visited <= cov.transitions_total);
    if (len < 3)
      CHECK(cov.transition_ratio < 1.0);
    else
      CHECK(cov.transition_ratio == 1.0);
    // Monotone: dropping results never increases coverage.
    auto fewer = res.interesting;
    fewer.pop_back();
    auto c2 = coverage(fewer, flat);
    CHECK(c2.transitions_visited <= cov.transitions_visited);
    CHECK(c2.states_with_vars_visited <= cov.states_with_vars_visited);
  }
  auto empty = coverage({}, flat);
  CHECK(empty.transitions_visited == 0);
  CHECK(empty.states_visited == 0);
}

TEST_CASE("run-once has no duplicates and covers one path") {
  auto flat = load_flat("controller_b.arc");
  ControllerConfig cfg;
  cfg.kind = ControllerKind::RunOnce;
  cfg.input_length = 2;
  auto res = explore(flat, cfg);
  CHECK(minimality(res.interesting).duplicate_ratio == 0.0);
  auto cov = coverage(res.interesting, flat, 10);
  std::set<std::string> taken;
  for (const auto &tick : res.interesting[0].trace.ticks)
    for (const auto &t : tick.taken)
      taken.insert(t.transition);
  CHECK(cov.transitions_visited == taken.size());
  REQUIRE(cov.states_with_vars_ratio);
}
