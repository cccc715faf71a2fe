// ccl: command-line front end for validation, execution, exploration,
// metrics, semantic differencing and brute-force checking.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ccl/analyses.hpp"
#include "ccl/bruteforce.hpp"
#include "ccl/error.hpp"
#include "ccl/parser.hpp"
#include "ccl/semdiff.hpp"

using namespace ccl;

namespace {

constexpr const char *kVersion = "0.1.0";

struct Common {
  std::string format = "json";
  std::string solver_cmd;
  int solver_timeout_ms = 0;
};

struct ExploreFlags {
  std::string controller = "pc";
  int input_length = 1;
  int max_visits = 1;
  int iterations = 10;
  std::uint64_t seed = 0;
  std::string interesting;
  int max_boring = 1;
  int max_interesting = 1;
  std::string domain_file;
  std::string inputs_file;
  std::size_t max_runs = 0;
};

void add_common(CLI::App *c, Common &o) {
  c->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  c->add_option("--solver-cmd", o.solver_cmd,
                "External SMT-LIB2 solver command (default: builtin)");
  c->add_option("--solver-timeout-ms", o.solver_timeout_ms,
                "Per-query solver budget, 0 for none");
}

void add_explore(CLI::App *c, ExploreFlags &f) {
  c->add_option("--controller", f.controller, "Exploration controller")
      ->check(CLI::IsMember({"pc", "pc-gc", "pc-random-negation",
                             "term-transition", "term-state",
                             "term-automaton-state", "boring-interesting",
                             "run-once", "random-input"}));
  c->add_option("--input-length", f.input_length, "Ticks per input sequence")
      ->check(CLI::Range(0, 1000));
  c->add_option("--max-visits", f.max_visits, "Visit budget for term-*");
  c->add_option("--iterations", f.iterations, "Runs for random-input");
  c->add_option("--seed", f.seed, "Random seed");
  c->add_option("--interesting", f.interesting,
                "Comma-separated tags (inst/transition or inst:state)");
  c->add_option("--max-boring", f.max_boring);
  c->add_option("--max-interesting", f.max_interesting);
  c->add_option("--domain", f.domain_file,
                "JSON port->values file; restricts every query to the domain");
  c->add_option("--inputs", f.inputs_file, "Seed inputs (JSON list of ticks)");
  c->add_option("--max-runs", f.max_runs, "Abort after this many runs");
}

json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("IO", "cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw Error("BAD_INPUT", path + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty())
      out.push_back(item);
  return out;
}

std::vector<int> parse_ints(const std::string &s) {
  std::vector<int> out;
  for (const auto &p : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(p, &used));
      if (used != p.size())
        throw std::invalid_argument(p);
    } catch (const std::exception &) {
      throw Error("BAD_INPUT", "not an integer list: '" + s + "'");
    }
  }
  return out;
}

FlatInstance load(const std::string &path, const std::string &args) {
  Model m = load_model_file(path);
  return flatten(m, parse_root_args(args, m));
}

SolverConfig solver_config(const Common &c) {
  SolverConfig s;
  s.timeout_ms = c.solver_timeout_ms;
  std::string cmd = resolve_solver_cmd(c.solver_cmd);
  if (!cmd.empty()) {
    s.backend = Backend::External;
    s.external_cmd = cmd;
  }
  return s;
}

ControllerConfig controller_config(const ExploreFlags &f, const Common &c,
                                   const FlatInstance &flat) {
  ControllerConfig cfg;
  const std::string &k = f.controller;
  if (k == "pc-gc")
    cfg.gc = true;
  else if (k == "pc-random-negation")
    cfg.random_negation = true;
  else if (k == "run-once")
    cfg.kind = ControllerKind::RunOnce;
  else if (k == "random-input")
    cfg.kind = ControllerKind::RandomInput;
  else if (k.rfind("term-", 0) == 0 || k == "boring-interesting") {
    cfg.kind = ControllerKind::Termination;
    if (k == "term-transition")
      cfg.criterion = TermCriterion::TransitionVisits;
    else if (k == "boring-interesting")
      cfg.criterion = TermCriterion::BoringInteresting;
    else {
      cfg.criterion = TermCriterion::StateVisits;
      cfg.with_vars = k == "term-state";
    }
  }
  cfg.max_visits = f.max_visits;
  for (const auto &t : split(f.interesting, ','))
    cfg.interesting.insert(t);
  cfg.max_boring = f.max_boring;
  cfg.max_interesting = f.max_interesting;
  cfg.iterations = f.iterations;
  cfg.seed = f.seed;
  cfg.input_length = f.input_length;
  cfg.solver = solver_config(c);
  cfg.max_runs = f.max_runs;
  if (!f.domain_file.empty()) {
    cfg.domain = domain_from_json(read_json(f.domain_file), flat);
    cfg.expand_domain = true;
  }
  if (!f.inputs_file.empty())
    cfg.seed_inputs = inputs_from_json(read_json(f.inputs_file), flat);
  return cfg;
}

json config_echo(const ExploreFlags &f, const Common &c) {
  return {{"controller", f.controller},
          {"input_length", f.input_length},
          {"max_visits", f.max_visits},
          {"iterations", f.iterations},
          {"seed", f.seed},
          {"domain", f.domain_file},
          {"solver", c.solver_cmd.empty() ? "builtin" : c.solver_cmd},
          {"solver_timeout_ms", c.solver_timeout_ms}};
}

double ms_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t)
      .count();
}

json report(const std::string &command, json config, json result,
            double wall_ms) {
  return {{"schema", 1},         {"command", command},
          {"tool_version", kVersion}, {"config", std::move(config)},
          {"wall_ms", wall_ms},  {"result", std::move(result)}};
}

std::string outputs_text(const std::vector<std::map<std::string, Value>> &o) {
  std::string s;
  for (const auto &tick : o) {
    s += "(";
    bool first = true;
    for (const auto &[p, v] : tick) {
      s += (first ? "" : ", ") + p + "=" + v.to_string();
      first = false;
    }
    s += ") ";
  }
  return s;
}

std::string inputs_text(const InputSeq &in) {
  std::vector<std::map<std::string, Value>> o(in.begin(), in.end());
  return outputs_text(o);
}

void emit(const Common &c, const json &j, const std::string &text) {
  if (c.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int cmd_validate(const std::string &path, const Common &c) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("IO", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseResult r = parse_model(ss.str(), path);
  ValidationReport diags = r.errors;
  if (r.ok()) {
    ValidationReport v = validate_model(*r.model);
    diags.insert(diags.end(), v.begin(), v.end());
  }
  json ds = json::array();
  std::string text;
  for (const auto &d : diags) {
    ds.push_back({{"code", d.code},
                  {"message", d.message},
                  {"line", d.span.line},
                  {"column", d.span.column}});
    text += path + ":" + std::to_string(d.span.line) + ":" +
            std::to_string(d.span.column) + ": " + d.code + ": " + d.message +
            "\n";
  }
  if (diags.empty())
    text = path + ": ok\n";
  emit(c, report("validate", {{"model", path}},
                 {{"valid", diags.empty()}, {"diagnostics", ds}}, 0),
       text);
  return diags.empty() ? 0 : 1;
}

int cmd_run(const std::string &path, const std::string &args,
            const std::string &inputs_file, const std::string &oracle,
            const Common &c) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance flat = load(path, args);
  InputSeq in = inputs_from_json(read_json(inputs_file), flat);
  Oracle o = oracle.empty() ? Oracle::prefix({}) : Oracle::strict(parse_ints(oracle));
  Trace t = run(flat, in, o);
  InterestingInput w = make_interesting(in, t);
  std::string text;
  for (std::size_t k = 0; k < w.outputs_concrete.size(); ++k)
    text += "tick " + std::to_string(k) + ": " +
            outputs_text({w.outputs_concrete[k]}) + "\n";
  emit(c, report("run", {{"model", path}, {"args", args}, {"oracle", oracle}},
                 trace_to_json(t), ms_since(t0)),
       text);
  return 0;
}

std::string stats_text(const ExplorationStats &s) {
  return "runs " + std::to_string(s.runs) + ", paths " +
         std::to_string(s.paths_explored) + ", solver calls " +
         std::to_string(s.solver_calls) + ", unsat " +
         std::to_string(s.paths_unsat) + ", timeouts " +
         std::to_string(s.paths_skipped_timeout) + ", aborted " +
         std::to_string(s.paths_aborted) + "\n";
}

int cmd_dse(const std::string &path, const std::string &args,
            const ExploreFlags &f, const Common &c) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance flat = load(path, args);
  auto res = explore(flat, controller_config(f, c, flat));
  json items = json::array();
  std::string text;
  for (const auto &w : res.interesting) {
    items.push_back(interesting_to_json(w));
    text += inputs_text(w.inputs) + "-> " + outputs_text(w.outputs_concrete) +
            "\n";
  }
  text += stats_text(res.stats);
  emit(c, report("dse", config_echo(f, c),
                 {{"interesting", items}, {"stats", to_json(res.stats)}},
                 ms_since(t0)),
       text);
  return 0;
}

int cmd_metrics(const std::string &path, const std::string &args,
                const ExploreFlags &f, const Common &c,
                const std::string &nondet, std::size_t bound) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance flat = load(path, args);
  ControllerConfig cfg = controller_config(f, c, flat);
  auto res = explore(flat, cfg);
  json m = {{"size", res.interesting.size()},
            {"stats", to_json(res.stats)},
            {"minimality", nullptr}};
  std::string text = "interesting inputs: " +
                     std::to_string(res.interesting.size()) + "\n";
  if (!res.interesting.empty()) {
    auto mini = minimality(res.interesting);
    m["minimality"] = to_json(mini);
    text += "duplicate ratio: " + std::to_string(mini.duplicate_ratio) + "\n";
  }
  auto cov = coverage(res.interesting, flat,
                      bound ? std::optional<std::size_t>(bound) : std::nullopt);
  m["coverage"] = to_json(cov);
  text += "transitions: " + std::to_string(cov.transitions_visited) + "/" +
          std::to_string(cov.transitions_total) + ", states: " +
          std::to_string(cov.states_visited) + "/" +
          std::to_string(cov.states_total) + ", states with vars: " +
          std::to_string(cov.states_with_vars_visited) + "\n";
  auto red = redundancy_pairs(res.interesting);
  m["redundancy"] = to_json(red);
  text += "redundant pairs: " + std::to_string(red.size()) + "\n";
  if (nondet != "off") {
    auto nd = nondet_pairs(res.interesting, cfg.solver,
                           nondet == "full" ? NondetMode::Full
                                            : NondetMode::ExistenceOnly);
    m["nondet"] = to_json(nd);
    text += "nondeterministic alternatives: " +
            std::string(nd.exists ? "yes" : "no") + "\n";
  }
  emit(c, report("metrics", config_echo(f, c), m, ms_since(t0)), text);
  return 0;
}

int cmd_semdiff(const std::string &p1, const std::string &p2,
                const std::string &args1, const std::string &args2,
                const ExploreFlags &f, const Common &c, std::size_t bound) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance m1 = load(p1, args1);
  FlatInstance m2 = load(p2, args2.empty() ? args1 : args2);
  SemdiffConfig cfg;
  cfg.controller = controller_config(f, c, m1);
  cfg.oracle_bound = bound;
  DiffReport r = semantic_diff(m1, m2, cfg);
  std::string text;
  for (const auto &w : r.witnesses)
    text += "witness: " + inputs_text(w.inputs) + "-> " +
            outputs_text(w.out_conc) + "\n";
  text += std::to_string(r.witnesses.size()) + " witnesses, " +
          std::to_string(r.unknown.size()) + " unknown\n";
  json cfg_json = config_echo(f, c);
  cfg_json["m1"] = p1;
  cfg_json["m2"] = p2;
  emit(c, report("semdiff", cfg_json, to_json(r), ms_since(t0)), text);
  if (!r.unknown.empty() || r.stats.exploration.paths_skipped_timeout ||
      r.stats.exploration.paths_skipped_unknown)
    return 2;
  return r.witnesses.empty() ? 0 : 1;
}

int cmd_brute(const std::string &p1, const std::string &p2,
              const std::string &args, const std::string &domain_file,
              int length, std::size_t cap, const Common &c) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance m1 = load(p1, args);
  FiniteDomain d = domain_from_json(read_json(domain_file), m1);
  auto runs = enumerate_runs(m1, d, length, cap);
  auto classes = feasible_path_classes(runs);
  json result = {{"runs", runs.size()},
                 {"path_classes", std::vector<std::string>(classes.begin(),
                                                           classes.end())}};
  std::string text = std::to_string(runs.size()) + " runs, " +
                     std::to_string(classes.size()) + " path classes\n";
  int code = 0;
  if (!p2.empty()) {
    FlatInstance m2 = load(p2, args);
    check_interfaces(m1, m2);
    auto ws = brute_diff(m1, m2, d, length, cap);
    json a = json::array();
    for (const auto &w : ws) {
      a.push_back(inputs_to_json(w));
      text += "witness: " + inputs_text(w) + "\n";
    }
    result["witnesses"] = a;
    result["witness_count"] = ws.size();
    text += std::to_string(ws.size()) + " witnesses\n";
    code = ws.empty() ? 0 : 1;
  }
  emit(c, report("brute",
                 {{"m1", p1}, {"m2", p2}, {"domain", domain_file},
                  {"input_length", length}, {"cap", cap}},
                 result, ms_since(t0)),
       text);
  return code;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

int cmd_sweep(const std::string &path, const std::string &args,
              const ExploreFlags &f, const Common &c,
              const std::string &timeouts) {
  auto t0 = std::chrono::steady_clock::now();
  FlatInstance flat = load(path, args);
  ControllerConfig cfg = controller_config(f, c, flat);
  auto measure = [&](int timeout) {
    cfg.solver.timeout_ms = timeout;
    std::vector<double> t, n;
    for (int i = 0; i < 3; ++i) {
      auto res = explore(flat, cfg);
      t.push_back(res.stats.wall_ms);
      n.push_back(double(res.interesting.size()));
    }
    return std::pair{median3(t), median3(n)};
  };
  auto [t_base, n_base] = measure(0);
  json rows = json::array();
  std::string text = "timeout_ms  time_improvement  result_deterioration\n";
  for (int timeout : parse_ints(timeouts)) {
    if (timeout <= 0)
      throw Error("BAD_INPUT", "timeouts must be positive");
    auto [t, n] = measure(timeout);
    double ti = t_base > 0 ? 1 - t / t_base : 0;
    double rd = n_base > 0 ? 1 - n / n_base : 0;
    rows.push_back({{"timeout_ms", timeout},
                    {"time_improvement", ti},
                    {"result_deterioration", rd},
                    {"median_wall_ms", t},
                    {"median_interesting", n}});
    std::ostringstream line;
    line << timeout << "  " << ti << "  " << rd << "\n";
    text += line.str();
  }
  json result = {{"baseline", {{"median_wall_ms", t_base},
                               {"median_interesting", n_base}}},
                 {"rows", rows}};
  emit(c, report("sweep", config_echo(f, c), result, ms_since(t0)), text);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Symbolic execution and semantic differencing for "
               "component-and-connector models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  ExploreFlags ef;
  std::string model, model2, args, args2, inputs_file, oracle, nondet = "full",
                                                               timeouts;
  std::string domain_file;
  std::size_t bound = 0, oracle_bound = 100000, cap = 1000000;
  int length = 1;

  auto *validate = app.add_subcommand("validate", "Parse and check a model");
  validate->add_option("model", model)->required();
  add_common(validate, common);

  auto *runc = app.add_subcommand("run", "Execute one input sequence");
  runc->add_option("model", model)->required();
  runc->add_option("--args", args, "Root parameters, comma separated");
  runc->add_option("--inputs", inputs_file, "JSON list of per-tick inputs")
      ->required();
  runc->add_option("--oracle", oracle, "Choice indices, comma separated");
  add_common(runc, common);

  auto *dse = app.add_subcommand("dse", "Explore paths symbolically");
  dse->add_option("model", model)->required();
  dse->add_option("--args", args, "Root parameters, comma separated");
  add_explore(dse, ef);
  add_common(dse, common);

  auto *metrics = app.add_subcommand("metrics", "Explore and report metrics");
  metrics->add_option("model", model)->required();
  metrics->add_option("--args", args, "Root parameters, comma separated");
  metrics->add_option("--nondet", nondet, "Nondeterminism check")
      ->check(CLI::IsMember({"full", "existence", "off"}));
  metrics->add_option("--reachable-bound", bound,
                      "Bound for the states-with-vars ratio");
  add_explore(metrics, ef);
  add_common(metrics, common);

  auto *semdiff = app.add_subcommand("semdiff", "Find diff witnesses");
  semdiff->add_option("m1", model)->required();
  semdiff->add_option("m2", model2)->required();
  semdiff->add_option("--args", args, "Root parameters for both models");
  semdiff->add_option("--args2", args2, "Root parameters for m2");
  semdiff->add_option("--oracle-bound", oracle_bound,
                      "Oracle sequences per input before giving up");
  add_explore(semdiff, ef);
  add_common(semdiff, common);

  auto *brute = app.add_subcommand("brute", "Enumerate a finite domain");
  brute->add_option("model", model)->required();
  brute->add_option("m2", model2, "Second model for a brute-force diff");
  brute->add_option("--args", args, "Root parameters");
  brute->add_option("--domain", domain_file, "JSON port->values file")
      ->required();
  brute->add_option("--input-length", length)->check(CLI::Range(0, 1000));
  brute->add_option("--cap", cap, "Maximum number of runs");
  add_common(brute, common);

  auto *sweep = app.add_subcommand("sweep", "Timeout benchmark");
  sweep->add_option("model", model)->required();
  sweep->add_option("--args", args, "Root parameters");
  sweep->add_option("--timeouts", timeouts, "Comma-separated budgets in ms")
      ->required();
  add_explore(sweep, ef);
  add_common(sweep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate)
      return cmd_validate(model, common);
    if (*runc)
      return cmd_run(model, args, inputs_file, oracle, common);
    if (*dse)
      return cmd_dse(model, args, ef, common);
    if (*metrics)
      return cmd_metrics(model, args, ef, common, nondet, bound);
    if (*semdiff)
      return cmd_semdiff(model, model2, args, args2, ef, common, oracle_bound);
    if (*brute)
      return cmd_brute(model, model2, args, domain_file, length, cap, common);
    if (*sweep)
      return cmd_sweep(model, args, ef, common, timeouts);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
