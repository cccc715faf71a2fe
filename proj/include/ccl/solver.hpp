#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccl/expr.hpp"
#include "ccl/symbolic.hpp"

namespace ccl {

enum class SolveStatus { Sat, Unsat, Unknown };
enum class UnknownReason { None, Timeout, Unsupported };

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  UnknownReason reason = UnknownReason::None;
  Env model; // Sat only: every asserted symbolic variable, Null-free
  std::string detail;

  bool sat() const { return status == SolveStatus::Sat; }
  bool unsat() const { return status == SolveStatus::Unsat; }
  bool unknown() const { return status == SolveStatus::Unknown; }
};

std::string to_string(SolveStatus s);
std::string to_string(UnknownReason r);

/// Enum name -> ordered variants. Needed for finite-domain reasoning and for
/// printing declared datatypes.
using EnumTable = std::map<std::string, std::vector<std::string>>;

enum class Backend { Builtin, External };

struct SolverConfig {
  Backend backend = Backend::Builtin;
  std::string external_cmd; // e.g. "/usr/local/bin/z3 -in"
  int timeout_ms = 0;       // 0 = no budget
  EnumTable enums;
  /// Hard bound on linear constraints kept during elimination.
  std::size_t max_constraints = 20000;
  /// Branch-and-bound node budget before reporting Unsupported.
  std::size_t max_bb_nodes = 4000;
};

/// Absolute wall-clock budget shared by the layers of one query.
class Deadline {
public:
  Deadline() = default;
  static Deadline after_ms(int ms);
  bool expired() const;
  bool bounded() const { return at_.has_value(); }

private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

/// Assertion stack with push/pop frames.
class SolverSession {
public:
  explicit SolverSession(SolverConfig cfg = {});

  /// Simplifies and stores the assertion. Throws Error("UNSUPPORTED_ATOM")
  /// for atoms outside the supported fragment.
  void assert_expr(const Expr &e);
  void push();
  void pop();
  std::size_t depth() const { return frames_.size(); }
  const std::vector<Expr> &assertions() const { return assertions_; }

  SolveResult check_sat();
  SolveResult check_with_timeout(int budget_ms);

  const SolverConfig &config() const { return cfg_; }
  SolverConfig &config() { return cfg_; }
  std::size_t calls() const { return calls_; }

private:
  SolverConfig cfg_;
  std::vector<Expr> assertions_;
  std::vector<std::size_t> frames_;
  std::size_t calls_ = 0;
};

/// Rejects expressions outside the decidable fragment.
void check_supported(const Expr &e, const EnumTable &enums);

/// The builtin decision procedure over a conjunction of assertions.
SolveResult solve_builtin(const std::vector<Expr> &assertions,
                          const SolverConfig &cfg, const Deadline &deadline);

/// SMT-LIB2 over a subprocess. Throws Error("BACKEND_SPAWN") and
/// Error("BACKEND_PROTOCOL").
SolveResult solve_external(const std::vector<Expr> &assertions,
                           const SolverConfig &cfg);

/// Script text sent to the external backend (exposed for tests).
std::string to_smtlib(const std::vector<Expr> &assertions,
                      const EnumTable &enums);

/// Default value of a type for model completion.
Value default_value(const TypeTag &t, const EnumTable &enums);

/// Resolves the external command: flag value, else CCL_SOLVER_CMD, else "".
std::string resolve_solver_cmd(const std::string &flag);

} // namespace ccl
