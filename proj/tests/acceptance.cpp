// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "ccl/analyses.hpp"
#include "ccl/bruteforce.hpp"
#include "ccl/error.hpp"
#include "ccl/parser.hpp"
#include "ccl/semdiff.hpp"
#include "conj_gen.hpp"
#include "model_util.hpp"

using namespace ccl;
using testutil::load_flat;
using testutil::student_vote;

namespace {

// Pinned limits.
constexpr double kTraceBudgetMs = 1000;
constexpr int kFirstOutputCases = 200;
constexpr double kSemdiffBudgetMs = 60000;
constexpr double kOracleBudgetMs = 120000;
constexpr int kSolverFuzzCases = 10000;
constexpr int kRandomInputRuns = 10;
constexpr int kTimeoutBudgetMs = 1;
constexpr int kTimeoutInputLength = 2;
constexpr int kParserFuzzCases = 10000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

Value rat(std::int64_t n, std::int64_t d = 1) {
  return Value::of_rat(Rational(n, d));
}

TickInputs vote(std::int64_t mtr, const std::string &v) {
  return {{"mtr", Value::of_int(mtr)}, {"vote", Value::of_str(v)}};
}

std::vector<Value> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> out;
  for (auto x : xs)
    out.push_back(Value::of_int(x));
  return out;
}

FiniteDomain vote_domain() {
  return {{"mtr", ints({349999, 355555, 400001})},
          {"vote",
           {Value::of_str("mbse"), Value::of_str("sa"),
            Value::of_str("mbse&sa"), Value::of_str("x")}}};
}

Expr int_expr(const std::string &text) {
  std::string err;
  auto e = parse_expr(text, &err);
  if (!e)
    throw Error("PARSE", err);
  std::map<std::string, Expr> sub;
  for_each_node(*e, [&](const Expr &n) {
    if (n.node().kind == ExprKind::Var)
      sub.emplace(n.node().name, make_sym(n.node().name, TypeTag::int_()));
  });
  return simplify(substitute(*e, sub));
}

std::set<std::string> dse_classes(const FlatInstance &flat,
                                  const FiniteDomain &d, int length) {
  ControllerConfig cfg;
  cfg.input_length = length;
  cfg.domain = d;
  std::set<std::string> out;
  for (const auto &i : explore(flat, cfg).interesting)
    out.insert(path_class(i.trace));
  return out;
}

std::set<InputSeq> semdiff_witnesses(const FlatInstance &a,
                                     const FlatInstance &b,
                                     const FiniteDomain &d, int length,
                                     std::size_t *unknown) {
  SemdiffConfig cfg;
  cfg.controller.input_length = length;
  cfg.controller.domain = d;
  cfg.controller.expand_domain = true;
  DiffReport r = semantic_diff(a, b, cfg);
  *unknown += r.unknown.size();
  std::set<InputSeq> out;
  for (const auto &w : r.witnesses)
    out.insert(w.inputs);
  return out;
}

Outcome trace_reproduction() {
  auto t0 = Clock::now();
  auto flat = student_vote();
  Trace t = run(flat,
                {vote(355555, "mbse"), vote(500000, "sa"), vote(399999, "sa")},
                Oracle::strict({0, 1}));
  double ms = ms_since(t0);
  std::vector<std::pair<Value, Value>> want = {
      {rat(0), rat(0)}, {rat(3, 2), rat(0)}, {rat(3, 2), rat(1)}};
  bool ok = t.ticks.size() == 3;
  std::ostringstream got;
  for (std::size_t k = 0; ok && k < 3; ++k) {
    const auto &o = t.ticks[k].outputs;
    got << "(" << o.at("mbse").conc.to_string() << ","
        << o.at("sa").conc.to_string() << ")";
    ok = ok && o.at("mbse").conc == want[k].first &&
         o.at("sa").conc == want[k].second;
  }
  ok = ok && ms < kTraceBudgetMs;

  // Same run through the command-line tool.
  auto c0 = Clock::now();
  std::string inputs = std::string(CCL_BINARY_DIR) + "/acceptance_inputs.json";
  std::ofstream(inputs) << R"([{"mtr":355555,"vote":"mbse"},)"
                        << R"({"mtr":500000,"vote":"sa"},)"
                        << R"({"mtr":399999,"vote":"sa"}])";
  std::string cmd = std::string(CCL_BINARY) + " run " +
                    testutil::model_path("student_vote.arc") +
                    " --args 400000 --oracle 0,1 --inputs " + inputs;
  std::string out;
  if (FILE *p = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
      out.append(buf, n);
    ok = ok && pclose(p) == 0;
  } else {
    ok = false;
  }
  double cli_ms = ms_since(c0);
  json j = json::parse(out, nullptr, false);
  std::string cli;
  if (j.is_discarded() || !j.contains("result")) {
    ok = false;
  } else {
    for (const auto &tick : j["result"]["ticks"])
      cli += "(" + tick["outputs"]["mbse"]["conc"].get<std::string>() + "," +
             tick["outputs"]["sa"]["conc"].get<std::string>() + ")";
  }
  ok = ok && cli == got.str() && cli_ms < kTraceBudgetMs;
  return {ok, "outputs " + got.str() + " in " + std::to_string(ms) +
                  " ms, cli " + cli + " in " + std::to_string(cli_ms) + " ms"};
}

Outcome first_output_law() {
  auto flat = student_vote();
  std::mt19937_64 rng(2024);
  const std::vector<std::string> votes = {"mbse", "sa", "mbse&sa", "x", ""};
  int bad = 0;
  for (int i = 0; i < kFirstOutputCases; ++i) {
    int len = 1 + int(rng() % 3);
    InputSeq in;
    for (int k = 0; k < len; ++k)
      in.push_back(vote(std::int64_t(rng() % 1000000), votes[rng() % votes.size()]));
    auto oracles = calc_oracles(flat, in);
    Trace t = run(flat, in, oracles[rng() % oracles.size()]);
    const auto &o = t.ticks.at(0).outputs;
    if (o.at("mbse").conc != rat(0) || o.at("sa").conc != rat(0))
      ++bad;
  }
  return {bad == 0, std::to_string(kFirstOutputCases - bad) + "/" +
                        std::to_string(kFirstOutputCases) +
                        " inputs start with (0.0, 0.0)"};
}

Outcome worked_exploration() {
  auto flat = load_flat("controller_b.arc");
  ControllerConfig cfg;
  cfg.input_length = 2;
  auto res = explore(flat, cfg);
  std::set<std::string> got;
  for (const auto &i : res.interesting) {
    std::string s;
    for (const auto &r : i.path_condition.records)
      s += (r.taken ? "" : "!") + r.transition;
    got.insert(s);
  }
  std::set<std::string> want = {"A!BC!D", "A!B!CD", "!AB"};
  // [!A, !B] at tick 0 must be refuted by the solver.
  SolverSession s(cfg.solver);
  Expr x0 = make_sym(input_var_name("x", 0), TypeTag::int_());
  s.assert_expr(make_not(make_cmp(CmpOp::Gt, x0, make_const(Value::of_int(5)))));
  s.assert_expr(make_not(make_cmp(CmpOp::Le, x0, make_const(Value::of_int(5)))));
  bool refuted = s.check_sat().unsat();
  FiniteDomain d = {{"x", ints({0, 6, 10, 12})}};
  auto brute = feasible_path_classes(enumerate_runs(flat, d, 2));
  bool equal = dse_classes(flat, d, 2) == brute;
  bool ok = got == want && refuted && res.stats.paths_unsat > 0 && equal;
  return {ok, std::to_string(got.size()) + " path classes, [!A,!B] " +
                  (refuted ? "unsat" : "NOT unsat") +
                  ", brute-force classes " + (equal ? "equal" : "differ")};
}

Outcome simplifier_anchors() {
  auto a = int_expr("x + 1 - 4"), b = int_expr("x - 5 + 2"),
       c = int_expr("x + 1 < 5"), d = int_expr("x + 2 < 6");
  auto x = make_sym("x", TypeTag::int_());
  Expr want1 = simplify(make_sub(x, make_const(Value::of_int(3))));
  Expr want2 = simplify(make_cmp(CmpOp::Lt, x, make_const(Value::of_int(4))));
  bool ok = structurally_equal(a, b) && structurally_equal(a, want1) &&
            structurally_equal(c, d) && structurally_equal(c, want2);
  return {ok, canonical_text(a) + " | " + canonical_text(c)};
}

Outcome nondet_anchor() {
  SolverConfig s;
  auto l = [](std::initializer_list<const char *> xs) {
    std::vector<Expr> out;
    for (const char *x : xs)
      out.push_back(int_expr(x));
    return out;
  };
  auto alt = nondet_compare(l({"x > 5", "y + 2 < 6"}), l({"x > 5", "y + 2 < 8"}), s);
  auto dis = nondet_compare(l({"x > 5", "y + 2 < 6"}), l({"x < 3", "y + 2 < 8"}), s);
  return {alt == NondetVerdict::Alternative && dis == NondetVerdict::Disjoint,
          to_string(alt) + " / " + to_string(dis)};
}

Outcome semdiff_threshold() {
  auto t0 = Clock::now();
  auto m1 = student_vote(), m2 = student_vote(true);
  std::vector<std::size_t> counts;
  std::size_t unknown = 0;
  bool agree = true;
  for (int len = 1; len <= 3; ++len) {
    auto w = semdiff_witnesses(m1, m2, vote_domain(), len, &unknown);
    counts.push_back(w.size());
    agree = agree && w == brute_diff(m1, m2, vote_domain(), len);
  }
  double ms = ms_since(t0);
  bool ok = counts[0] == 0 && counts[1] == 0 && counts[2] >= 1 &&
            unknown == 0 && agree && ms < kSemdiffBudgetMs;
  return {ok, "witnesses " + std::to_string(counts[0]) + ", " +
                  std::to_string(counts[1]) + ", " + std::to_string(counts[2]) +
                  (agree ? ", brute-force equal, " : ", brute-force DIFFERS, ") +
                  std::to_string(ms) + " ms"};
}

Outcome oracle_equivalence() {
  auto t0 = Clock::now();
  struct Case {
    const char *a, *b;
    FiniteDomain d;
    int len;
  };
  std::vector<Case> cases = {
      {"controller_b.arc", "controller_b_alt.arc", {{"x", ints({0, 6, 10, 12})}}, 2},
      {"partial.arc", "partial_alt.arc", {{"x", ints({-1, 0, 1, 2, 3})}}, 3},
      {"nondet.arc",
       "nondet_alt.arc",
       {{"x", ints({-1, 1, 2, 3})},
        {"hold", {Value::of_bool(true), Value::of_bool(false)}}},
       2},
  };
  int matched = 0, total = 0;
  std::size_t unknown = 0;
  for (const auto &c : cases) {
    auto m1 = load_flat(c.a), m2 = load_flat(c.b);
    for (auto [x, y] : {std::pair{&m1, &m2}, std::pair{&m2, &m1}}) {
      total += 2;
      auto brute_runs = enumerate_runs(*x, c.d, c.len);
      matched += dse_classes(*x, c.d, c.len) == feasible_path_classes(brute_runs);
      matched += semdiff_witnesses(*x, *y, c.d, c.len, &unknown) ==
                 brute_diff(*x, *y, c.d, c.len);
    }
  }
  double ms = ms_since(t0);
  return {matched == total && ms < kOracleBudgetMs,
          std::to_string(matched) + "/" + std::to_string(total) +
              " set equalities, " + std::to_string(unknown) + " unknown, " +
              std::to_string(ms) + " ms"};
}

Outcome solver_soundness() {
  testgen::ConjGen gen(20240);
  SolverConfig cfg;
  cfg.enums = testgen::conj_enums();
  int disagree = 0, unverified = 0, unknown = 0, sat = 0;
  for (int i = 0; i < kSolverFuzzCases; ++i) {
    auto c = gen.next();
    auto assertions = c.assertions();
    SolveResult r;
    try {
      r = solve_builtin(assertions, cfg, {});
    } catch (const Error &) {
      ++unverified;
      continue;
    }
    if (r.unknown()) {
      ++unknown;
      continue;
    }
    if (r.sat() != testgen::brute_sat(c))
      ++disagree;
    if (r.sat()) {
      ++sat;
      for (const auto &a : assertions) {
        Value v = eval_concrete(a, r.model);
        if (!v.is_bool() || !v.as_bool()) {
          ++unverified;
          break;
        }
      }
    }
  }
  bool ok = disagree == 0 && unverified == 0 && unknown == 0;
  return {ok, std::to_string(kSolverFuzzCases) + " cases, " +
                  std::to_string(sat) + " sat, " + std::to_string(disagree) +
                  " disagreements, " + std::to_string(unverified) +
                  " unverified models, " + std::to_string(unknown) + " unknown"};
}

Outcome controller_budgets() {
  auto flat = student_vote();
  ControllerConfig cfg;
  cfg.input_length = 3;
  cfg.kind = ControllerKind::RunOnce;
  auto once = explore(flat, cfg);
  double ratio = minimality(once.interesting).duplicate_ratio;
  cfg.kind = ControllerKind::RandomInput;
  cfg.iterations = kRandomInputRuns;
  auto rnd = explore(flat, cfg);
  bool ok = once.interesting.size() == 1 && once.stats.solver_calls == 0 &&
            ratio == 0.0 && rnd.stats.runs == kRandomInputRuns &&
            rnd.interesting.size() == std::size_t(kRandomInputRuns) &&
            rnd.stats.solver_calls == 0;
  return {ok, "run-once " + std::to_string(once.interesting.size()) + " input, " +
                  std::to_string(once.stats.solver_calls) + " calls, ratio " +
                  std::to_string(ratio) + "; random " +
                  std::to_string(rnd.stats.runs) + " runs, " +
                  std::to_string(rnd.stats.solver_calls) + " calls"};
}

Outcome timeout_mechanism() {
  auto flat = load_flat("dense.arc");
  ControllerConfig cfg;
  cfg.input_length = kTimeoutInputLength;
  cfg.solver.timeout_ms = kTimeoutBudgetMs;
  auto res = explore(flat, cfg);
  std::size_t replayed = 0;
  for (const auto &i : res.interesting)
    replayed += replay_check(flat, i);
  bool ok = res.stats.paths_skipped_timeout > 0 &&
            replayed == res.interesting.size();
  return {ok, std::to_string(res.stats.paths_skipped_timeout) + " timeouts, " +
                  std::to_string(replayed) + "/" +
                  std::to_string(res.interesting.size()) + " results replay"};
}

Outcome parser_round_trip() {
  int files = 0, round_trips = 0;
  for (const auto &e : std::filesystem::directory_iterator(
           std::string(CCL_SOURCE_DIR) + "/models")) {
    if (e.path().extension() != ".arc")
      continue;
    ++files;
    std::ifstream in(e.path());
    std::stringstream ss;
    ss << in.rdbuf();
    auto r = parse_model(ss.str(), e.path().string());
    if (!r.ok())
      continue;
    auto back = parse_model(render_model(*r.model));
    round_trips += back.ok() && models_equal(*r.model, *back.model);
  }
  std::mt19937_64 rng(7);
  int crashes = 0;
  for (int i = 0; i < kParserFuzzCases; ++i) {
    std::string text(rng() % 200, '\0');
    for (auto &ch : text)
      ch = char(rng() % 256);
    try {
      parse_model(text);
    } catch (...) {
      ++crashes;
    }
  }
  return {files > 0 && round_trips == files && crashes == 0,
          std::to_string(round_trips) + "/" + std::to_string(files) +
              " models round trip, " + std::to_string(crashes) + "/" +
              std::to_string(kParserFuzzCases) + " fuzz inputs threw"};
}

} // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"trace reproduction", trace_reproduction},
      {"first-output law", first_output_law},
      {"worked exploration", worked_exploration},
      {"simplifier anchors", simplifier_anchors},
      {"non-determinism anchor", nondet_anchor},
      {"semantic-diff length threshold", semdiff_threshold},
      {"oracle equivalence", oracle_equivalence},
      {"solver soundness", solver_soundness},
      {"controller budgets", controller_budgets},
      {"timeout mechanism", timeout_mechanism},
      {"parser round trip and fuzz", parser_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL")
              << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
