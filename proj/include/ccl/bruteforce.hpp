#pragma once

#include <set>
#include <string>
#include <vector>

#include "ccl/controllers.hpp"
#include "ccl/json_io.hpp"

namespace ccl {

struct BruteRun {
  InputSeq inputs;
  std::vector<int> oracle;
  Trace trace;
};

/// Every domain input sequence of the given length times every feasible
/// oracle, executed concretely. Throws Error("CAP_EXCEEDED") past `cap`
/// runs and Error("BAD_DOMAIN") when a root in-port has no values.
std::vector<BruteRun> enumerate_runs(const FlatInstance &flat,
                                     const FiniteDomain &domain, int length,
                                     std::size_t cap = 1000000);

/// Signed branch and decision sequence of a trace.
std::string path_class(const Trace &t);

std::set<std::string> feasible_path_classes(const std::vector<BruteRun> &runs);

/// Inputs for which some m1 output sequence is produced by no m2 run.
std::set<InputSeq> brute_diff(const FlatInstance &m1, const FlatInstance &m2,
                              const FiniteDomain &domain, int length,
                              std::size_t cap = 1000000);

/// Domain file: {"port": [v, ...], ...}, values typed by the root ports.
FiniteDomain domain_from_json(const json &j, const FlatInstance &flat);
json domain_to_json(const FiniteDomain &d);

} // namespace ccl
