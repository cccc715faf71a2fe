#pragma once

#include <map>
#include <string>
#include <vector>

#include "ccl/expr.hpp"
#include "ccl/value.hpp"

namespace ccl {

using Env = std::map<std::string, Value>;
using Binding = std::map<std::string, Expr>;

/// Concrete evaluation with exact arithmetic. Null propagates through
/// arithmetic and connectives; comparisons involving Null are false.
/// Throws Error("UNBOUND_NAME") and Error("OVERFLOW").
Value eval_concrete(const Expr &e, const Env &env);

/// Replaces untyped names by their bound expressions. Typed symbolic
/// variables are left in place. Throws Error("UNBOUND_NAME").
Expr substitute(const Expr &e, const Binding &bind);

/// Canonical normal form. Numeric terms become `c1*x1 + ... + k` with
/// variables in lexicographic order; comparisons become `sum op k` with a
/// positive leading coefficient (gcd-reduced and non-strict over integers,
/// leading coefficient 1 over rationals); connectives are in negation
/// normal form, flattened, sorted and deduplicated. Idempotent and
/// semantics-preserving.
Expr simplify(const Expr &e);

/// Canonical logical negation.
Expr negate(const Expr &e);

/// Text of the canonical form; used as equality key in reports.
std::string canonical_text(const Expr &e);

/// Symbolic and concrete value carried together through execution.
struct AnnotatedValue {
  Expr sym;
  Value conc;

  static AnnotatedValue constant(const Value &v) {
    return {make_const(v), v};
  }
};

/// One guard evaluation.
struct BranchRecord {
  std::string instance;   // atomic instance path
  std::string transition; // transition id
  int tick = 0;
  Expr cond;  // canonical, over symbolic inputs and constants only
  bool taken = false;

  std::string branch_id() const;
  /// cond when taken, canonical negation otherwise.
  Expr signed_cond() const;
};

struct PathCondition {
  std::vector<BranchRecord> records;

  /// Conjunction of the signed records (canonical).
  Expr conjunction() const;
};

/// Signed, simplified branch conditions in execution order.
std::vector<Expr> decompose(const PathCondition &pc);

} // namespace ccl
