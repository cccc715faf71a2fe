#include "ccl/semdiff.hpp"

#include <chrono>
#include <deque>
#include <set>

#include "ccl/analyses.hpp"
#include "ccl/error.hpp"

namespace ccl {

std::vector<Oracle> calc_oracles(const FlatInstance &flat,
                                 const InputSeq &inputs, std::size_t bound) {
  std::vector<Oracle> out;
  std::deque<std::vector<int>> queue{{}};
  while (!queue.empty()) {
    std::vector<int> p = std::move(queue.front());
    queue.pop_front();
    Trace t = run(flat, inputs, Oracle::prefix(p));
    const auto &ds = t.decisions;
    for (std::size_t j = p.size(); j < ds.size(); ++j) {
      for (int alt = 1; alt < ds[j].count; ++alt) {
        std::vector<int> next = t.oracle_used.choices;
        next.resize(j);
        next.push_back(alt);
        queue.push_back(std::move(next));
      }
    }
    out.push_back(Oracle::strict(t.oracle_used.choices));
    if (out.size() + queue.size() > bound)
      throw Error("ORACLE_SPACE_EXCEEDED",
                  "more than " + std::to_string(bound) + " oracle sequences");
  }
  return out;
}

InterestingInput replay_on_m2(const FlatInstance &flat, const InputSeq &inputs,
                              const Oracle &oracle) {
  return make_interesting(inputs, run(flat, inputs, oracle));
}

void check_interfaces(const FlatInstance &m1, const FlatInstance &m2) {
  auto sig = [](const std::vector<const Port *> &ps) {
    std::map<std::string, std::string> m;
    for (const Port *p : ps)
      m[p->name] = p->type.to_string();
    return m;
  };
  if (sig(m1.root_inputs()) != sig(m2.root_inputs()))
    throw Error("INTERFACE_MISMATCH", "root input ports differ");
  if (sig(m1.root_outputs()) != sig(m2.root_outputs()))
    throw Error("INTERFACE_MISMATCH", "root output ports differ");
}

namespace {

bool same_outputs(const InterestingInput &a, const InterestingInput &b,
                  bool *symbolic_only) {
  if (output_key(a) == output_key(b))
    return true;
  if (a.outputs_concrete == b.outputs_concrete) {
    *symbolic_only = true;
    return true;
  }
  return false;
}

} // namespace

DiffReport semantic_diff(const FlatInstance &m1, const FlatInstance &m2,
                         const SemdiffConfig &cfg) {
  auto start = std::chrono::steady_clock::now();
  check_interfaces(m1, m2);
  DiffReport rep;
  rep.input_length = cfg.controller.input_length;
  ExplorationResult dse = explore(m1, cfg.controller);
  rep.stats.exploration = dse.stats;
  rep.stats.solver_calls = dse.stats.solver_calls;
  rep.stats.dse_size = dse.interesting.size();
  std::set<InputSeq> reported;
  for (const auto &in : dse.interesting) {
    bool sym_only = false;
    ++rep.stats.oracle_runs;
    auto first = replay_on_m2(m2, in.inputs, Oracle::prefix({}));
    if (same_outputs(in, first, &sym_only)) {
      rep.stats.symbolic_only += sym_only;
      continue;
    }
    std::vector<Oracle> oracles;
    try {
      oracles = calc_oracles(m2, in.inputs, cfg.oracle_bound);
    } catch (const Error &e) {
      if (e.code() != "ORACLE_SPACE_EXCEEDED")
        throw;
      rep.unknown.push_back({in.inputs, e.code()});
      continue;
    }
    bool matched = false;
    for (const auto &o : oracles) {
      ++rep.stats.oracle_runs;
      if (same_outputs(in, replay_on_m2(m2, in.inputs, o), &sym_only)) {
        matched = true;
        break;
      }
    }
    rep.stats.symbolic_only += sym_only;
    if (!matched && reported.insert(in.inputs).second)
      rep.witnesses.push_back(
          {in.inputs, in.outputs_symbolic, in.outputs_concrete, oracles.size()});
  }
  rep.stats.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return rep;
}

json to_json(const DiffReport &r) {
  json ws = json::array();
  for (const auto &w : r.witnesses) {
    json outs = json::array();
    for (std::size_t k = 0; k < w.out_conc.size(); ++k) {
      json tick = json::object();
      for (const auto &[port, v] : w.out_conc[k])
        tick[port] = {{"conc", value_to_json(v)},
                      {"sym", canonical_text(w.out_sym[k].at(port))}};
      outs.push_back(tick);
    }
    ws.push_back({{"inputs", inputs_to_json(w.inputs)},
                  {"outputs_m1", outs},
                  {"m2_outputs_checked", w.m2_outputs_checked}});
  }
  json unk = json::array();
  for (const auto &u : r.unknown)
    unk.push_back({{"inputs", inputs_to_json(u.inputs)}, {"reason", u.reason}});
  return {{"input_length", r.input_length},
          {"witness_count", r.witnesses.size()},
          {"witnesses", ws},
          {"unknown", unk},
          {"stats",
           {{"solver_calls", r.stats.solver_calls},
            {"dse_size", r.stats.dse_size},
            {"oracle_runs", r.stats.oracle_runs},
            {"symbolic_only", r.stats.symbolic_only},
            {"wall_ms", r.stats.wall_ms},
            {"exploration", to_json(r.stats.exploration)}}}};
}

} // namespace ccl
