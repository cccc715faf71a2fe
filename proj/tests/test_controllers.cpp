#include <doctest.h>

#include <set>

#include "ccl/controllers.hpp"
#include "ccl/error.hpp"
#include "model_util.hpp"

using namespace ccl;
using testutil::load_flat;
using testutil::student_vote;

namespace {

std::string signs(const Trace &t) {
  std::string s;
  for (const auto &r : t.path_condition.records)
    s += (r.taken ? "" : "!") + r.transition + ",";
  return s;
}

std::string path_key(const Trace &t) {
  return prefix_key(path_events(t), path_events(t).size());
}

ControllerConfig pc(int length) {
  ControllerConfig c;
  c.input_length = length;
  return c;
}

} // namespace

TEST_CASE("walk model: path coverage finds the three feasible classes") {
  auto flat = load_flat("controller_b.arc");
  for (bool gc : {false, true}) {
    auto cfg = pc(2);
    cfg.gc = gc;
    auto res = explore(flat, cfg);
    std::set<std::string> got;
    for (const auto &i : res.interesting)
      got.insert(signs(i.trace));
    CHECK(got == std::set<std::string>{"!A,B,", "A,!B,C,!D,", "A,!B,!C,D,"});
    CHECK(res.stats.paths_explored == 3);
    CHECK(res.stats.paths_unsat == 4);
    CHECK(res.stats.solver_calls == 6);
  }
}

TEST_CASE("walk model: deepest open event is negated first") {
  auto flat = load_flat("controller_b.arc");
  Trace t = run(flat, {{{"x", Value::of_int(7)}}, {{"x", Value::of_int(1)}}},
                Oracle::strict({}));
  auto ev = path_events(t);
  REQUIRE(ev.size() == 4);
  auto target = next_negation_target(ev, {});
  REQUIRE(target);
  CHECK(ev[*target].id.find("D") != std::string::npos);
  std::set<std::string> done;
  for (std::size_t i = 2; i < 4; ++i)
    for (const auto &k : sibling_keys(ev, i))
      done.insert(k);
  CHECK(*next_negation_target(ev, done) == 1);
}

TEST_CASE("termination with single visits aborts repeated transitions") {
  auto flat = load_flat("controller_b.arc");
  auto cfg = pc(2);
  cfg.kind = ControllerKind::Termination;
  cfg.criterion = TermCriterion::TransitionVisits;
  cfg.max_visits = 1;
  auto res = explore(flat, cfg);
  // After the first A path, every other A path exceeds the budget.
  std::set<std::string> got;
  for (const auto &i : res.interesting)
    got.insert(signs(i.trace));
  CHECK(got.size() == 2);
  CHECK(got.count("!A,B,"));
  CHECK(res.stats.paths_aborted == 1);
}

TEST_CASE("run-once and random-input budgets") {
  auto flat = load_flat("controller_b.arc");
  auto cfg = pc(3);
  cfg.kind = ControllerKind::RunOnce;
  auto once = explore(flat, cfg);
  CHECK(once.interesting.size() == 1);
  CHECK(once.stats.solver_calls == 0);
  cfg.kind = ControllerKind::RandomInput;
  cfg.iterations = 10;
  auto rnd = explore(flat, cfg);
  CHECK(rnd.interesting.size() == 10);
  CHECK(rnd.stats.solver_calls == 0);
  auto again = explore(flat, cfg);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(rnd.interesting[i].inputs == again.interesting[i].inputs);
}

TEST_CASE("run budget is enforced") {
  auto flat = load_flat("controller_b.arc");
  auto cfg = pc(2);
  cfg.max_runs = 1;
  CHECK_THROWS_AS(explore(flat, cfg), Error);
}

TEST_CASE("student vote: no duplicate paths and every result replays") {
  auto flat = student_vote();
  for (int len = 1; len <= 3; ++len) {
    for (bool rn : {false, true}) {
      auto cfg = pc(len);
      cfg.random_negation = rn;
      cfg.seed = 7;
      auto res = explore(flat, cfg);
      std::set<std::string> keys;
      for (const auto &i : res.interesting) {
        CHECK(keys.insert(path_key(i.trace)).second);
        CHECK(replay_check(flat, i));
      }
      CHECK(res.stats.paths_skipped_timeout == 0);
      CHECK(res.stats.paths_skipped_unknown == 0);
      if (len == 1)
        CHECK(!res.interesting.empty());
    }
  }
}

TEST_CASE("random negation explores the same classes as depth-first") {
  auto flat = student_vote();
  auto cfg = pc(2);
  std::set<std::string> a, b;
  for (const auto &i : explore(flat, cfg).interesting)
    a.insert(path_key(i.trace));
  cfg.random_negation = true;
  cfg.seed = 99;
  for (const auto &i : explore(flat, cfg).interesting)
    b.insert(path_key(i.trace));
  CHECK(a == b);
}

TEST_CASE("nondeterministic choices are enumerated") {
  auto flat = load_flat("nondet.arc");
  auto res = explore(flat, pc(1));
  std::set<std::vector<int>> oracles;
  for (const auto &i : res.interesting) {
    oracles.insert(i.oracle.choices);
    CHECK(replay_check(flat, i));
  }
  CHECK(oracles.size() >= 2);
}

TEST_CASE("test mode keeps inputs inside the domain") {
  auto flat = student_vote();
  auto cfg = pc(2);
  cfg.domain = {{"mtr",
                 {Value::of_int(349999), Value::of_int(355555),
                  Value::of_int(400001)}},
                {"vote",
                 {Value::of_str("mbse"), Value::of_str("sa"),
                  Value::of_str("mbse&sa"), Value::of_str("x")}}};
  cfg.expand_domain = true;
  auto res = explore(flat, cfg);
  std::set<InputSeq> seen;
  for (const auto &i : res.interesting) {
    for (const auto &tick : i.inputs) {
      auto m = tick.at("mtr");
      CHECK((m == Value::of_int(349999) || m == Value::of_int(355555) ||
             m == Value::of_int(400001)));
    }
    seen.insert(i.inputs);
  }
  // 12 inputs per tick; expansion reaches every one of 12^2 sequences.
  CHECK(seen.size() == 144);
}
