#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccl/controllers.hpp"
#include "ccl/json_io.hpp"

namespace ccl {

struct MinimalityReport {
  double duplicate_ratio = 0;
  /// Indices of inputs with identical canonical output sequences; only
  /// groups of size > 1 are listed.
  std::vector<std::vector<std::size_t>> groups;
  std::size_t group_count = 0;
};

/// Throws Error("EMPTY_RESULT") for an empty list.
MinimalityReport minimality(const std::vector<InterestingInput> &result);

/// Canonical per-tick output text, used as the duplicate key.
std::string output_key(const InterestingInput &in);

struct RedundancyPair {
  std::size_t a = 0, b = 0;
  std::string condition; // shared canonical path condition
  std::string outputs;   // shared canonical outputs
};

std::vector<RedundancyPair>
redundancy_pairs(const std::vector<InterestingInput> &result);

enum class NondetVerdict { Alternative, Disjoint, Unknown };
enum class NondetMode { Full, ExistenceOnly };

std::string to_string(NondetVerdict v);

/// Position-wise comparison of two decomposed condition lists. Lists of
/// different length are Disjoint.
NondetVerdict nondet_compare(const std::vector<Expr> &a,
                             const std::vector<Expr> &b,
                             const SolverConfig &solver,
                             int *solver_calls = nullptr);

/// Signed branch conditions of a path, in evaluation order.
std::vector<Expr> decomposed(const InterestingInput &in);

struct NondetPair {
  std::size_t a = 0, b = 0;
  NondetVerdict verdict = NondetVerdict::Alternative;
};

struct NondetReport {
  NondetMode mode = NondetMode::Full;
  std::vector<NondetPair> pairs;   // Alternative pairs
  std::vector<NondetPair> unknown; // pairs with an undecided position
  bool exists = false;
  int solver_calls = 0;
};

/// Compares distinct paths (i < j) only.
NondetReport nondet_pairs(const std::vector<InterestingInput> &result,
                          const SolverConfig &solver, NondetMode mode);

struct CoverageReport {
  std::size_t transitions_visited = 0, transitions_total = 0;
  std::size_t states_visited = 0, states_total = 0;
  std::size_t states_with_vars_visited = 0;
  double transition_ratio = 0, state_ratio = 0;
  std::optional<double> states_with_vars_ratio;
};

CoverageReport coverage(const std::vector<InterestingInput> &result,
                        const FlatInstance &flat,
                        std::optional<std::size_t> reachable_bound = {});

json to_json(const MinimalityReport &r);
json to_json(const CoverageReport &r);
json to_json(const std::vector<RedundancyPair> &r);
json to_json(const NondetReport &r);
json to_json(const ExplorationStats &s);

} // namespace ccl
