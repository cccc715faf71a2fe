#include "ccl/expr.hpp"

#include <map>
#include <set>

namespace ccl {

const char *cmp_op_text(CmpOp op) {
  switch (op) {
  case CmpOp::Lt:
    return "<";
  case CmpOp::Le:
    return "<=";
  case CmpOp::Eq:
    return "==";
  case CmpOp::Ne:
    return "!=";
  case CmpOp::Ge:
    return ">=";
  case CmpOp::Gt:
    return ">";
  }
  return "?";
}

CmpOp cmp_flip(CmpOp op) {
  switch (op) {
  case CmpOp::Lt:
    return CmpOp::Gt;
  case CmpOp::Le:
    return CmpOp::Ge;
  case CmpOp::Ge:
    return CmpOp::Le;
  case CmpOp::Gt:
    return CmpOp::Lt;
  default:
    return op;
  }
}

CmpOp cmp_negate(CmpOp op) {
  switch (op) {
  case CmpOp::Lt:
    return CmpOp::Ge;
  case CmpOp::Le:
    return CmpOp::Gt;
  case CmpOp::Eq:
    return CmpOp::Ne;
  case CmpOp::Ne:
    return CmpOp::Eq;
  case CmpOp::Ge:
    return CmpOp::Lt;
  case CmpOp::Gt:
    return CmpOp::Le;
  }
  return op;
}

namespace {

Expr build(ExprKind kind, std::vector<Expr> kids, SourceSpan span,
           CmpOp op = CmpOp::Eq) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->kids = std::move(kids);
  n->span = std::move(span);
  n->op = op;
  return Expr(std::move(n));
}

} // namespace

Expr make_const(Value v, SourceSpan span) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Const;
  n->constant = std::move(v);
  n->span = std::move(span);
  return Expr(std::move(n));
}

Expr make_var(std::string name, SourceSpan span) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Var;
  n->name = std::move(name);
  n->span = std::move(span);
  return Expr(std::move(n));
}

Expr make_sym(std::string name, TypeTag type) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Var;
  n->name = std::move(name);
  n->var_type = std::move(type);
  return Expr(std::move(n));
}

Expr make_neg(Expr a, SourceSpan span) {
  return build(ExprKind::Neg, {std::move(a)}, std::move(span));
}
Expr make_add(Expr a, Expr b, SourceSpan span) {
  return build(ExprKind::Add, {std::move(a), std::move(b)}, std::move(span));
}
Expr make_sub(Expr a, Expr b, SourceSpan span) {
  return build(ExprKind::Sub, {std::move(a), std::move(b)}, std::move(span));
}
Expr make_mul(Expr a, Expr b, SourceSpan span) {
  return build(ExprKind::Mul, {std::move(a), std::move(b)}, std::move(span));
}
Expr make_not(Expr a, SourceSpan span) {
  return build(ExprKind::Not, {std::move(a)}, std::move(span));
}
Expr make_and(std::vector<Expr> kids, SourceSpan span) {
  return build(ExprKind::And, std::move(kids), std::move(span));
}
Expr make_or(std::vector<Expr> kids, SourceSpan span) {
  return build(ExprKind::Or, std::move(kids), std::move(span));
}
Expr make_cmp(CmpOp op, Expr a, Expr b, SourceSpan span) {
  return build(ExprKind::Cmp, {std::move(a), std::move(b)}, std::move(span),
               op);
}

bool structurally_equal(const Expr &a, const Expr &b) {
  if (a.same_node(b))
    return true;
  if (!a.valid() || !b.valid())
    return false;
  const auto &x = a.node();
  const auto &y = b.node();
  if (x.kind != y.kind || x.kids.size() != y.kids.size())
    return false;
  switch (x.kind) {
  case ExprKind::Const:
    return x.constant == y.constant;
  case ExprKind::Var:
    return x.name == y.name && x.var_type == y.var_type;
  case ExprKind::Cmp:
    if (x.op != y.op)
      return false;
    break;
  default:
    break;
  }
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!structurally_equal(x.kids[i], y.kids[i]))
      return false;
  return true;
}

namespace {

int precedence(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Or:
    return 1;
  case ExprKind::And:
    return 2;
  case ExprKind::Not:
    return 3;
  case ExprKind::Cmp:
    return 4;
  case ExprKind::Add:
  case ExprKind::Sub:
    return 5;
  case ExprKind::Mul:
    return 6;
  case ExprKind::Neg:
    return 7;
  case ExprKind::Const:
    // Negative numeric literals read as a unary minus.
    if (e->constant.is_numeric() && e->constant.as_rational() < Rational(0))
      return 7;
    return 8;
  case ExprKind::Var:
    return 8;
  }
  return 8;
}

void print(const Expr &e, std::string &out);

void print_child(const Expr &child, int min_prec, std::string &out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Expr &e, std::string &out) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const:
    out += n.constant.to_string();
    return;
  case ExprKind::Var:
    out += n.name;
    return;
  case ExprKind::Neg:
    out += '-';
    // "-(5)" keeps Neg(Const 5) distinct from the literal -5.
    if (n.kids[0].is_const() || n.kids[0].kind() == ExprKind::Neg) {
      out += '(';
      print(n.kids[0], out);
      out += ')';
    } else {
      print_child(n.kids[0], 7, out);
    }
    return;
  case ExprKind::Add:
  case ExprKind::Sub:
    print_child(n.kids[0], 5, out);
    out += n.kind == ExprKind::Add ? " + " : " - ";
    print_child(n.kids[1], 6, out);
    return;
  case ExprKind::Mul:
    print_child(n.kids[0], 6, out);
    out += " * ";
    print_child(n.kids[1], 7, out);
    return;
  case ExprKind::Not:
    out += '!';
    print_child(n.kids[0], 4, out);
    return;
  case ExprKind::And:
  case ExprKind::Or: {
    if (n.kids.empty()) {
      out += n.kind == ExprKind::And ? "true" : "false";
      return;
    }
    int p = n.kind == ExprKind::And ? 2 : 1;
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
      if (i > 0)
        out += n.kind == ExprKind::And ? " && " : " || ";
      // Nested same-kind children keep their grouping explicit.
      print_child(n.kids[i], n.kids[i].kind() == n.kind ? p + 1 : p, out);
    }
    return;
  }
  case ExprKind::Cmp:
    print_child(n.kids[0], 5, out);
    out += ' ';
    out += cmp_op_text(n.op);
    out += ' ';
    print_child(n.kids[1], 5, out);
    return;
  }
}

} // namespace

std::string to_string(const Expr &e) {
  std::string out;
  if (e.valid())
    print(e, out);
  return out;
}

void for_each_node(const Expr &e,
                   const std::function<void(const Expr &)> &fn) {
  fn(e);
  for (const auto &k : e.kids())
    for_each_node(k, fn);
}

std::vector<std::string> free_names(const Expr &e) {
  std::set<std::string> names;
  for_each_node(e, [&](const Expr &n) {
    if (n.kind() == ExprKind::Var)
      names.insert(n->name);
  });
  return {names.begin(), names.end()};
}

std::vector<std::pair<std::string, TypeTag>> sym_vars(const Expr &e) {
  std::map<std::string, TypeTag> vars;
  for_each_node(e, [&](const Expr &n) {
    if (n.kind() == ExprKind::Var && n->var_type)
      vars.emplace(n->name, *n->var_type);
  });
  return {vars.begin(), vars.end()};
}

} // namespace ccl
