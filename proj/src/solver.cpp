#include "ccl/solver.hpp"

#include <cstdlib>

#include "ccl/error.hpp"

namespace ccl {

std::string to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat:
    return "sat";
  case SolveStatus::Unsat:
    return "unsat";
  default:
    return "unknown";
  }
}

std::string to_string(UnknownReason r) {
  switch (r) {
  case UnknownReason::Timeout:
    return "timeout";
  case UnknownReason::Unsupported:
    return "unsupported";
  default:
    return "none";
  }
}

Deadline Deadline::after_ms(int ms) {
  Deadline d;
  d.at_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
  return d;
}

bool Deadline::expired() const {
  return at_ && std::chrono::steady_clock::now() >= *at_;
}

void check_supported(const Expr &e, const EnumTable &enums) {
  for_each_node(e, [&](const Expr &node_expr) {
    const ExprNode &n = node_expr.node();
    if (n.kind == ExprKind::Var && !n.var_type)
      throw Error("UNSUPPORTED_ATOM",
                  "unbound component name '" + n.name + "' in assertion");
    if (n.kind == ExprKind::Var && n.var_type->kind == TypeKind::Enum &&
        !enums.count(n.var_type->enum_name))
      throw Error("UNSUPPORTED_ATOM",
                  "unknown enum '" + n.var_type->enum_name + "'");
    if (n.kind == ExprKind::Mul) {
      bool has_const = false;
      for (const auto &k : n.kids) {
        Expr s = simplify(k);
        has_const = has_const || s.is_const();
      }
      if (!has_const)
        throw Error("UNSUPPORTED_ATOM", "non-linear product in assertion");
    }
  });
}

SolverSession::SolverSession(SolverConfig cfg) : cfg_(std::move(cfg)) {}

void SolverSession::assert_expr(const Expr &e) {
  check_supported(e, cfg_.enums);
  assertions_.push_back(simplify(e));
}

void SolverSession::push() { frames_.push_back(assertions_.size()); }

void SolverSession::pop() {
  if (frames_.empty())
    throw Error("SOLVER_STACK", "pop without matching push");
  assertions_.resize(frames_.back());
  frames_.pop_back();
}

SolveResult SolverSession::check_sat() {
  return check_with_timeout(cfg_.timeout_ms);
}

SolveResult SolverSession::check_with_timeout(int budget_ms) {
  ++calls_;
  if (cfg_.backend == Backend::External) {
    SolverConfig c = cfg_;
    c.timeout_ms = budget_ms;
    return solve_external(assertions_, c);
  }
  Deadline dl = budget_ms > 0 ? Deadline::after_ms(budget_ms) : Deadline{};
  return solve_builtin(assertions_, cfg_, dl);
}

std::string resolve_solver_cmd(const std::string &flag) {
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("CCL_SOLVER_CMD"))
    return env;
  return "";
}

} // namespace ccl
