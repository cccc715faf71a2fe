#include "ccl/analyses.hpp"

#include <map>
#include <set>

#include "ccl/error.hpp"

namespace ccl {

std::string output_key(const InterestingInput &in) {
  std::string k;
  for (const auto &tick : in.outputs_symbolic) {
    for (const auto &[port, e] : tick)
      k += port + "=" + canonical_text(e) + ",";
    k += "|";
  }
  return k;
}

MinimalityReport minimality(const std::vector<InterestingInput> &result) {
  if (result.empty())
    throw Error("EMPTY_RESULT", "minimality needs at least one input");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < result.size(); ++i)
    groups[output_key(result[i])].push_back(i);
  MinimalityReport r;
  r.group_count = groups.size();
  r.duplicate_ratio = double(result.size() - groups.size()) / result.size();
  for (auto &[k, g] : groups)
    if (g.size() > 1)
      r.groups.push_back(std::move(g));
  std::sort(r.groups.begin(), r.groups.end());
  return r;
}

std::vector<RedundancyPair>
redundancy_pairs(const std::vector<InterestingInput> &result) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto &in : result)
    keys.emplace_back(canonical_text(in.path_condition.conjunction()),
                      output_key(in));
  std::vector<RedundancyPair> out;
  for (std::size_t i = 0; i < result.size(); ++i)
    for (std::size_t j = i + 1; j < result.size(); ++j)
      if (keys[i] == keys[j])
        out.push_back({i, j, keys[i].first, keys[i].second});
  return out;
}

std::string to_string(NondetVerdict v) {
  switch (v) {
  case NondetVerdict::Alternative:
    return "alternative";
  case NondetVerdict::Disjoint:
    return "disjoint";
  case NondetVerdict::Unknown:
    return "unknown";
  }
  return "?";
}

NondetVerdict nondet_compare(const std::vector<Expr> &a,
                             const std::vector<Expr> &b,
                             const SolverConfig &solver, int *solver_calls) {
  if (a.size() != b.size())
    return NondetVerdict::Disjoint;
  bool unknown = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Expr x = simplify(a[i]), y = simplify(b[i]);
    if (structurally_equal(x, y))
      continue;
    SolverSession s(solver);
    s.assert_expr(x);
    s.assert_expr(y);
    if (solver_calls)
      ++*solver_calls;
    SolveResult r = s.check_sat();
    if (r.unsat())
      return NondetVerdict::Disjoint;
    if (r.unknown())
      unknown = true;
  }
  return unknown ? NondetVerdict::Unknown : NondetVerdict::Alternative;
}

std::vector<Expr> decomposed(const InterestingInput &in) {
  std::vector<Expr> out;
  for (const auto &r : in.path_condition.records)
    out.push_back(r.signed_cond());
  return out;
}

NondetReport nondet_pairs(const std::vector<InterestingInput> &result,
                          const SolverConfig &solver, NondetMode mode) {
  NondetReport rep;
  rep.mode = mode;
  std::vector<std::vector<Expr>> lists;
  for (const auto &in : result)
    lists.push_back(decomposed(in));
  for (std::size_t i = 0; i < result.size(); ++i) {
    for (std::size_t j = i + 1; j < result.size(); ++j) {
      NondetVerdict v =
          nondet_compare(lists[i], lists[j], solver, &rep.solver_calls);
      if (v == NondetVerdict::Alternative) {
        rep.pairs.push_back({i, j, v});
        rep.exists = true;
        if (mode == NondetMode::ExistenceOnly)
          return rep;
      } else if (v == NondetVerdict::Unknown) {
        rep.unknown.push_back({i, j, v});
      }
    }
  }
  return rep;
}

namespace {

std::string inst_label(const std::string &path) {
  return path.empty() ? "root" : path;
}

std::string with_vars_key(const std::string &inst,
                          const InstanceSnapshot &snap) {
  std::string k = inst_label(inst) + ":" + snap.state;
  for (const auto &[n, v] : snap.vars)
    k += "," + n + "=" + canonical_text(v.sym);
  return k;
}

} // namespace

CoverageReport coverage(const std::vector<InterestingInput> &result,
                        const FlatInstance &flat,
                        std::optional<std::size_t> reachable_bound) {
  std::set<std::string> trans, states, states_vars;
  if (!result.empty()) {
    ExecutionState init = initial_state(flat);
    for (std::size_t i = 0; i < flat.atomics.size(); ++i) {
      InstanceSnapshot snap{init.atomics[i].state, init.atomics[i].vars};
      states.insert(inst_label(flat.atomics[i].path) + ":" + snap.state);
      states_vars.insert(with_vars_key(flat.atomics[i].path, snap));
    }
  }
  for (const auto &in : result) {
    for (const auto &tick : in.trace.ticks) {
      for (const auto &t : tick.taken)
        trans.insert(inst_label(t.instance) + "/" + t.transition);
      for (const auto &[inst, snap] : tick.state) {
        states.insert(inst_label(inst) + ":" + snap.state);
        states_vars.insert(with_vars_key(inst, snap));
      }
    }
  }
  CoverageReport r;
  r.transitions_total = flat.transition_count();
  r.states_total = flat.state_count();
  r.transitions_visited = trans.size();
  r.states_visited = states.size();
  r.states_with_vars_visited = states_vars.size();
  r.transition_ratio =
      r.transitions_total ? double(r.transitions_visited) / r.transitions_total
                          : 0.0;
  r.state_ratio =
      r.states_total ? double(r.states_visited) / r.states_total : 0.0;
  if (reachable_bound && *reachable_bound > 0)
    r.states_with_vars_ratio =
        std::min(1.0, double(r.states_with_vars_visited) / *reachable_bound);
  return r;
}

json to_json(const MinimalityReport &r) {
  return {{"duplicate_ratio", r.duplicate_ratio},
          {"groups", r.groups},
          {"group_count", r.group_count}};
}

json to_json(const CoverageReport &r) {
  json j = {{"transitions_visited", r.transitions_visited},
            {"transitions_total", r.transitions_total},
            {"transition_ratio", r.transition_ratio},
            {"states_visited", r.states_visited},
            {"states_total", r.states_total},
            {"state_ratio", r.state_ratio},
            {"states_with_vars_visited", r.states_with_vars_visited},
            {"states_with_vars_ratio", nullptr}};
  if (r.states_with_vars_ratio)
    j["states_with_vars_ratio"] = *r.states_with_vars_ratio;
  return j;
}

json to_json(const std::vector<RedundancyPair> &r) {
  json a = json::array();
  for (const auto &p : r)
    a.push_back({{"a", p.a},
                 {"b", p.b},
                 {"condition", p.condition},
                 {"outputs", p.outputs}});
  return a;
}

json to_json(const NondetReport &r) {
  auto pairs = [](const std::vector<NondetPair> &ps) {
    json a = json::array();
    for (const auto &p : ps)
      a.push_back({{"a", p.a}, {"b", p.b}, {"verdict", to_string(p.verdict)}});
    return a;
  };
  json j = {{"mode", r.mode == NondetMode::Full ? "full" : "existence"},
            {"exists", r.exists},
            {"unknown", pairs(r.unknown)},
            {"solver_calls", r.solver_calls}};
  if (r.mode == NondetMode::Full)
    j["pairs"] = pairs(r.pairs);
  return j;
}

json to_json(const ExplorationStats &s) {
  return {{"solver_calls", s.solver_calls},
          {"runs", s.runs},
          {"paths_explored", s.paths_explored},
          {"paths_unsat", s.paths_unsat},
          {"paths_skipped_timeout", s.paths_skipped_timeout},
          {"paths_skipped_unknown", s.paths_skipped_unknown},
          {"paths_aborted", s.paths_aborted},
          {"paths_diverged", s.paths_diverged},
          {"wall_ms", s.wall_ms}};
}

} // namespace ccl
