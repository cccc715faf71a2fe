#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ccl/model.hpp"
#include "ccl/symbolic.hpp"

namespace ccl {

/// Resolves non-deterministic transition choices.
struct Oracle {
  std::vector<int> choices;
  std::size_t cursor = 0;
  /// When set, decisions beyond the supplied choices take index 0 instead of
  /// failing with ORACLE_EXHAUSTED. Used to complete prefixes during search.
  bool extend_with_zero = false;
  /// Choices actually consumed, in order.
  std::vector<int> used;

  static Oracle strict(std::vector<int> c) { return {std::move(c), 0, false, {}}; }
  static Oracle prefix(std::vector<int> c) { return {std::move(c), 0, true, {}}; }

  /// Throws Error("ORACLE_EXHAUSTED") / Error("ORACLE_OUT_OF_RANGE").
  int next(int count);
};

/// One non-deterministic decision point.
struct Decision {
  std::string instance;
  int tick = 0;
  int count = 0;  // number of enabled transitions
  int choice = 0; // index into the enabled transitions
  /// Number of branch records in the path condition before this decision;
  /// fixes the interleaving of decisions and branches.
  std::size_t position = 0;
};

struct TakenTransition {
  std::string instance;
  std::string transition;
  std::string source, target;
};

struct InstanceSnapshot {
  std::string state;
  std::map<std::string, AnnotatedValue> vars;
};

struct TraceTick {
  int index = 0;
  std::map<std::string, AnnotatedValue> inputs;
  std::map<std::string, AnnotatedValue> outputs;
  std::vector<BranchRecord> branches;
  std::vector<Decision> decisions;
  std::vector<TakenTransition> taken;
  std::map<std::string, InstanceSnapshot> state; // after all firing
};

struct Trace {
  std::vector<TraceTick> ticks;
  PathCondition path_condition;
  std::vector<Decision> decisions;
  Oracle oracle_used; // strict oracle with exactly the consumed choices
};

using PortValues = std::map<PortRef, AnnotatedValue>;

struct ExecutionState {
  struct Atomic {
    std::string state;
    std::map<std::string, AnnotatedValue> vars;
  };
  std::vector<Atomic> atomics;
  PortValues delayed; // stored value per delayed atomic out-port
  int tick = 0;
};

using BranchSink = std::function<void(const BranchRecord &)>;
using TickInputs = std::map<std::string, Value>;
using InputSeq = std::vector<TickInputs>;

ExecutionState initial_state(const FlatInstance &flat);

/// Symbolic variable name of a root in-port at a tick.
std::string input_var_name(const std::string &port, int tick);

/// One synchronous tick. `inputs` must cover every root in-port.
TraceTick step(const FlatInstance &flat, ExecutionState &state,
               const std::map<std::string, AnnotatedValue> &inputs,
               Oracle &oracle, const BranchSink &sink = {});

/// Runs from the initial state. Root inputs get fresh symbolic variables.
/// Missing ports in a tick map are Null.
Trace run(const FlatInstance &flat, const InputSeq &inputs, Oracle oracle);

/// Exploration result element.
struct InterestingInput {
  InputSeq inputs;
  std::vector<std::map<std::string, Value>> outputs_concrete;
  std::vector<std::map<std::string, Expr>> outputs_symbolic; // canonical
  PathCondition path_condition;
  std::vector<Decision> decisions;
  Oracle oracle; // strict
  Trace trace;
};

InterestingInput make_interesting(const InputSeq &inputs, Trace trace);

/// Re-runs the witness and compares branch truth values and concrete
/// outputs.
bool replay_check(const FlatInstance &flat, const InterestingInput &witness);

/// Environment binding the input variables of a run to their values.
Env input_env(const InputSeq &inputs);

} // namespace ccl
