#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccl/executor.hpp"
#include "ccl/solver.hpp"

namespace ccl {

enum class ControllerKind { PathCoverage, Termination, RunOnce, RandomInput };
enum class TermCriterion { TransitionVisits, StateVisits, BoringInteresting };

/// Per root in-port finite value list (test mode).
using FiniteDomain = std::map<std::string, std::vector<Value>>;

struct ControllerConfig {
  ControllerKind kind = ControllerKind::PathCoverage;
  // PathCoverage variants
  bool gc = false;              // fresh solver session for every query
  bool random_negation = false; // random order over unexplored targets
  // Termination
  TermCriterion criterion = TermCriterion::TransitionVisits;
  int max_visits = 1;
  bool with_vars = false;
  /// Tags of interesting elements: "inst/transition" or "inst:state"
  /// (root instance written as "root").
  std::set<std::string> interesting;
  int max_boring = 1;
  int max_interesting = 1;
  // Random
  int iterations = 10;
  std::uint64_t seed = 0;

  int input_length = 1;
  SolverConfig solver;
  std::optional<InputSeq> seed_inputs;

  /// Non-empty enables test mode: every solver query is conjoined with
  /// domain membership of every input variable.
  FiniteDomain domain;
  /// Test mode only: also run every domain input of each discovered path.
  bool expand_domain = false;

  /// 0 = unlimited; exceeding it throws Error("BUDGET_EXCEEDED").
  std::size_t max_runs = 0;
};

struct ExplorationStats {
  std::size_t solver_calls = 0;
  std::size_t runs = 0;
  std::size_t paths_explored = 0;
  std::size_t paths_unsat = 0;
  std::size_t paths_skipped_timeout = 0;
  std::size_t paths_skipped_unknown = 0;
  std::size_t paths_aborted = 0;
  std::size_t paths_diverged = 0;
  double wall_ms = 0;
};

struct ExplorationResult {
  std::vector<InterestingInput> interesting;
  ExplorationStats stats;
};

/// One element of a path: a signed branch record or an oracle decision.
struct PathEvent {
  bool decision = false;
  std::string id; // branch id, or decision point "inst@tick"
  bool taken = false;
  int choice = 0, count = 0;

  std::string key() const;
};

std::vector<PathEvent> path_events(const Trace &t);

/// Key of events[0..n).
std::string prefix_key(const std::vector<PathEvent> &events, std::size_t n);

/// Keys of the siblings of event i under the prefix events[0..i).
std::vector<std::string> sibling_keys(const std::vector<PathEvent> &events,
                                      std::size_t i);

/// Deepest index with a sibling prefix not yet in `done`.
std::optional<std::size_t>
next_negation_target(const std::vector<PathEvent> &events,
                     const std::set<std::string> &done);

ExplorationResult explore(const FlatInstance &flat, const ControllerConfig &cfg);

/// Type defaults per root in-port for every tick (first domain value in
/// test mode).
InputSeq seed_inputs(const FlatInstance &flat, const ControllerConfig &cfg);

/// Enum declarations of the model in solver form.
EnumTable enum_table(const Model &m);

/// Domain membership of every input variable up to `length` ticks.
std::vector<Expr> domain_constraints(const FlatInstance &flat,
                                     const FiniteDomain &domain, int length);

} // namespace ccl
