#include <doctest.h>

#include <random>

#include "ccl/error.hpp"
#include "ccl/executor.hpp"
#include "model_util.hpp"

using namespace ccl;
using testutil::load_flat;
using testutil::student_vote;

namespace {

TickInputs vote(std::int64_t mtr, const char *v) {
  return {{"mtr", Value::of_int(mtr)}, {"vote", Value::of_str(v)}};
}

Value rat(std::int64_t n, std::int64_t d = 1) {
  return Value::of_rat(Rational(n, d));
}

} // namespace

TEST_CASE("student vote trace reproduces the worked run") {
  auto flat = student_vote();
  Trace t = run(flat,
                {vote(355555, "mbse"), vote(500000, "sa"), vote(399999, "sa")},
                Oracle::strict({0, 1}));
  REQUIRE(t.ticks.size() == 3);
  CHECK(t.ticks[0].outputs.at("mbse").conc == rat(0));
  CHECK(t.ticks[0].outputs.at("sa").conc == rat(0));
  CHECK(t.ticks[1].outputs.at("mbse").conc == rat(3, 2));
  CHECK(t.ticks[1].outputs.at("sa").conc == rat(0));
  CHECK(t.ticks[2].outputs.at("mbse").conc == rat(3, 2));
  CHECK(t.ticks[2].outputs.at("sa").conc == rat(1));
  // After the first tick the counter already holds 1.5.
  CHECK(t.ticks[0].state.at("cm").vars.at("c").conc == rat(3, 2));
  CHECK(canonical_text(t.ticks[2].outputs.at("sa").sym) == "1.0");
  CHECK(t.oracle_used.choices == std::vector<int>{0, 1});
  CHECK(t.decisions.size() == 2);
}

TEST_CASE("empty input gives an empty trace") {
  auto flat = student_vote();
  Trace t = run(flat, {}, Oracle::strict({}));
  CHECK(t.ticks.empty());
  CHECK(t.path_condition.records.empty());
}

TEST_CASE("oracle errors") {
  auto flat = student_vote();
  try {
    run(flat, {vote(355555, "mbse")}, Oracle::strict({}));
    FAIL("expected ORACLE_EXHAUSTED");
  } catch (const Error &e) {
    CHECK(e.code() == "ORACLE_EXHAUSTED");
  }
  try {
    run(flat, {vote(355555, "mbse")}, Oracle::strict({2}));
    FAIL("expected ORACLE_OUT_OF_RANGE");
  } catch (const Error &e) {
    CHECK(e.code() == "ORACLE_OUT_OF_RANGE");
  }
  // Prefix oracles fill missing choices with 0.
  Trace t = run(flat, {vote(355555, "mbse")}, Oracle::prefix({}));
  CHECK(t.oracle_used.choices == std::vector<int>{0});
}

TEST_CASE("property: first output is zero and the delay law holds") {
  auto flat = student_vote();
  std::mt19937_64 rng(2026);
  const char *votes[] = {"mbse", "sa", "mbse&sa", "x"};
  for (int i = 0; i < 200; ++i) {
    InputSeq in;
    for (int k = 0; k < 3; ++k)
      in.push_back(vote(std::int64_t(rng() % 700000), votes[rng() % 4]));
    Trace t = run(flat, in, Oracle::prefix({}));
    CHECK(t.ticks[0].outputs.at("mbse").conc == rat(0));
    CHECK(t.ticks[0].outputs.at("sa").conc == rat(0));
    for (int k = 0; k + 1 < 3; ++k) {
      CHECK(t.ticks[k + 1].outputs.at("mbse").conc ==
            t.ticks[k].state.at("cm").vars.at("c").conc);
      CHECK(t.ticks[k + 1].outputs.at("sa").conc ==
            t.ticks[k].state.at("cs").vars.at("c").conc);
    }
    // Every signed branch condition holds for the run's inputs.
    Env env = input_env(in);
    for (const auto &r : t.path_condition.records) {
      Value v = eval_concrete(r.signed_cond(), env);
      CHECK(v.as_bool());
    }
  }
}

TEST_CASE("partial automaton ignores unmatched input") {
  auto flat = load_flat("partial.arc");
  InputSeq in{{{"x", Value::of_int(5)}},
              {{"x", Value::of_int(1)}},
              {{"x", Value::of_int(7)}}};
  Trace t = run(flat, in, Oracle::strict({}));
  CHECK(t.ticks[0].outputs.at("y").conc.is_null());
  CHECK(t.ticks[0].taken.empty());
  CHECK(t.ticks[0].state.at("").state == "Closed");
  CHECK(t.ticks[1].outputs.at("y").conc == Value::of_int(0));
  CHECK(t.ticks[2].outputs.at("y").conc == Value::of_int(7));
  CHECK(to_string(t.ticks[2].outputs.at("y").sym) == "in_root_x_t2");
}

TEST_CASE("guard order fixes branch records") {
  auto flat = load_flat("controller_b.arc");
  Trace t = run(flat, {{{"x", Value::of_int(6)}}, {{"x", Value::of_int(0)}}},
                Oracle::strict({}));
  std::vector<std::string> sig;
  for (const auto &r : t.path_condition.records)
    sig.push_back((r.taken ? "" : "!") + r.transition);
  CHECK(sig == std::vector<std::string>{"A", "!B", "C", "!D"});
  CHECK(to_string(t.path_condition.records[0].cond) == "in_root_x_t0 >= 6");
}

TEST_CASE("replay check accepts runs and rejects tampering") {
  auto flat = student_vote();
  InputSeq in{vote(355555, "mbse"), vote(360000, "sa")};
  auto w = make_interesting(in, run(flat, in, Oracle::prefix({1})));
  CHECK(replay_check(flat, w));
  auto bad = w;
  bad.path_condition.records[0].taken = !bad.path_condition.records[0].taken;
  CHECK_FALSE(replay_check(flat, bad));
  auto other = w;
  other.outputs_concrete[1]["mbse"] = rat(7);
  CHECK_FALSE(replay_check(flat, other));
}
