#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccl/value.hpp"

namespace ccl {

struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;
};

enum class ExprKind { Const, Var, Neg, Add, Sub, Mul, Not, And, Or, Cmp };
enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

const char *cmp_op_text(CmpOp op);
/// Operator with swapped operands: a < b  <=>  b > a.
CmpOp cmp_flip(CmpOp op);
/// Logical complement: !(a < b)  <=>  a >= b.
CmpOp cmp_negate(CmpOp op);

class Expr;

struct ExprNode {
  ExprKind kind = ExprKind::Const;
  Value constant;
  std::string name;
  /// Set for symbolic input variables; component-level names stay untyped
  /// until substitution replaces them.
  std::optional<TypeTag> var_type;
  CmpOp op = CmpOp::Eq;
  std::vector<Expr> kids;
  SourceSpan span;
};

/// Immutable, shareable expression tree handle.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  bool valid() const { return node_ != nullptr; }
  const ExprNode &node() const { return *node_; }
  const ExprNode *operator->() const { return node_.get(); }
  ExprKind kind() const { return node_->kind; }
  const std::vector<Expr> &kids() const { return node_->kids; }

  bool is_const() const { return node_->kind == ExprKind::Const; }
  bool is_true() const {
    return is_const() && node_->constant.is_bool() && node_->constant.as_bool();
  }
  bool is_false() const {
    return is_const() && node_->constant.is_bool() && !node_->constant.as_bool();
  }
  bool is_null() const { return is_const() && node_->constant.is_null(); }

  /// Identity comparison of the shared node; use structurally_equal for trees.
  bool same_node(const Expr &o) const { return node_ == o.node_; }

private:
  std::shared_ptr<const ExprNode> node_;
};

Expr make_const(Value v, SourceSpan span = {});
Expr make_var(std::string name, SourceSpan span = {});
Expr make_sym(std::string name, TypeTag type);
Expr make_neg(Expr a, SourceSpan span = {});
Expr make_add(Expr a, Expr b, SourceSpan span = {});
Expr make_sub(Expr a, Expr b, SourceSpan span = {});
Expr make_mul(Expr a, Expr b, SourceSpan span = {});
Expr make_not(Expr a, SourceSpan span = {});
Expr make_and(std::vector<Expr> kids, SourceSpan span = {});
Expr make_or(std::vector<Expr> kids, SourceSpan span = {});
Expr make_cmp(CmpOp op, Expr a, Expr b, SourceSpan span = {});

inline Expr make_true() { return make_const(Value::of_bool(true)); }
inline Expr make_false() { return make_const(Value::of_bool(false)); }

/// Structural equality ignoring source spans.
bool structurally_equal(const Expr &a, const Expr &b);

/// Deterministic text in surface syntax with minimal parentheses.
std::string to_string(const Expr &e);

/// Visits every node (pre-order).
void for_each_node(const Expr &e, const std::function<void(const Expr &)> &fn);

/// Names of all Var nodes (typed symbolic variables included).
std::vector<std::string> free_names(const Expr &e);

/// Typed symbolic variables occurring in e, keyed by name.
std::vector<std::pair<std::string, TypeTag>> sym_vars(const Expr &e);

} // namespace ccl
