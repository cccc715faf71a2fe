#pragma once

#include <string>
#include <vector>

#include "ccl/controllers.hpp"
#include "ccl/json_io.hpp"

namespace ccl {

/// Concrete output sequence of a run, compared literally (Null included).
using OutputSeq = std::vector<std::map<std::string, Value>>;

/// Every complete choice sequence feasible for `inputs`, breadth first.
/// A deterministic run gives the single empty oracle. Throws
/// Error("ORACLE_SPACE_EXCEEDED") past `bound` sequences.
std::vector<Oracle> calc_oracles(const FlatInstance &flat,
                                 const InputSeq &inputs,
                                 std::size_t bound = 100000);

/// Runs the model and returns canonical outputs.
InterestingInput replay_on_m2(const FlatInstance &flat, const InputSeq &inputs,
                              const Oracle &oracle);

struct DiffWitness {
  InputSeq inputs;
  std::vector<std::map<std::string, Expr>> out_sym;
  OutputSeq out_conc;
  std::size_t m2_outputs_checked = 0;
};

struct DiffUnknown {
  InputSeq inputs;
  std::string reason;
};

struct SemdiffConfig {
  ControllerConfig controller;
  std::size_t oracle_bound = 100000;
};

struct DiffStats {
  int solver_calls = 0;
  std::size_t dse_size = 0;
  std::size_t oracle_runs = 0;
  /// Inputs whose canonical outputs differed but concrete outputs agreed.
  std::size_t symbolic_only = 0;
  double wall_ms = 0;
  ExplorationStats exploration;
};

struct DiffReport {
  std::vector<DiffWitness> witnesses; // one per distinct input sequence
  std::vector<DiffUnknown> unknown;
  int input_length = 0;
  DiffStats stats;
};

/// Throws Error("INTERFACE_MISMATCH") when the root port sets differ in
/// name or type.
void check_interfaces(const FlatInstance &m1, const FlatInstance &m2);

DiffReport semantic_diff(const FlatInstance &m1, const FlatInstance &m2,
                         const SemdiffConfig &cfg);

json to_json(const DiffReport &r);

} // namespace ccl
