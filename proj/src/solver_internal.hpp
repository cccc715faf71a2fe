#pragma once
// Internals shared by the builtin solver layers.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ccl/solver.hpp"

namespace ccl::detail {

using Q = boost::multiprecision::cpp_rational;

struct TimeoutSignal {};

enum class Rel { Le, Lt, Eq };

/// sum(a[x] * x) rel k
struct LinCon {
  std::map<std::string, Q> a;
  Q k;
  Rel rel = Rel::Le;
};

struct ArithResult {
  SolveStatus status = SolveStatus::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::map<std::string, Q> model;

  bool sat() const { return status == SolveStatus::Sat; }
  bool unknown() const { return status == SolveStatus::Unknown; }
};

/// Decides a conjunction of linear constraints. Variables in `ints` must
/// take integer values. When `relax_ints` is set integrality is ignored
/// (used for cheap pruning). Throws TimeoutSignal when the deadline passes.
ArithResult solve_arith(const std::vector<LinCon> &cons,
                        const std::set<std::string> &ints, bool relax_ints,
                        const SolverConfig &cfg, const Deadline &deadline);

} // namespace ccl::detail
