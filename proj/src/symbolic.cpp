#include "ccl/symbolic.hpp"

#include <algorithm>
#include <numeric>

#include "ccl/error.hpp"

namespace ccl {

// ---------------------------------------------------------------------------
// Concrete evaluation

namespace {

Value arith(ExprKind kind, const Value &a, const Value &b) {
  if (a.is_null() || b.is_null())
    return Null{};
  if (!a.is_numeric() || !b.is_numeric())
    throw Error("TYPE_MISMATCH", "arithmetic on non-numeric value");
  if (a.is_int() && b.is_int()) {
    switch (kind) {
    case ExprKind::Add:
      return Value::of_int(checked_add(a.as_int(), b.as_int()));
    case ExprKind::Sub:
      return Value::of_int(checked_sub(a.as_int(), b.as_int()));
    default:
      return Value::of_int(checked_mul(a.as_int(), b.as_int()));
    }
  }
  Rational x = a.as_rational(), y = b.as_rational();
  switch (kind) {
  case ExprKind::Add:
    return Value::of_rat(x + y);
  case ExprKind::Sub:
    return Value::of_rat(x - y);
  default:
    return Value::of_rat(x * y);
  }
}

bool compare(CmpOp op, const Value &a, const Value &b) {
  if (a.is_null() || b.is_null())
    return false;
  if (a.is_numeric() && b.is_numeric()) {
    auto c = a.as_rational() <=> b.as_rational();
    switch (op) {
    case CmpOp::Lt:
      return c < 0;
    case CmpOp::Le:
      return c <= 0;
    case CmpOp::Eq:
      return c == 0;
    case CmpOp::Ne:
      return c != 0;
    case CmpOp::Ge:
      return c >= 0;
    case CmpOp::Gt:
      return c > 0;
    }
  }
  if (a.type() != b.type())
    throw Error("TYPE_MISMATCH", "comparison of incompatible values " +
                                     a.to_string() + " and " + b.to_string());
  if (op == CmpOp::Eq)
    return a == b;
  if (op == CmpOp::Ne)
    return !(a == b);
  throw Error("TYPE_MISMATCH", "ordering comparison on non-numeric values");
}

} // namespace

Value eval_concrete(const Expr &e, const Env &env) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const:
    return n.constant;
  case ExprKind::Var: {
    auto it = env.find(n.name);
    if (it == env.end())
      throw Error("UNBOUND_NAME", "no value for '" + n.name + "'");
    return it->second;
  }
  case ExprKind::Neg: {
    Value v = eval_concrete(n.kids[0], env);
    if (v.is_null())
      return v;
    if (v.is_int())
      return Value::of_int(checked_sub(0, v.as_int()));
    if (v.is_rat())
      return Value::of_rat(-v.as_rat_exact());
    throw Error("TYPE_MISMATCH", "negation of non-numeric value");
  }
  case ExprKind::Add:
  case ExprKind::Sub:
  case ExprKind::Mul:
    return arith(n.kind, eval_concrete(n.kids[0], env),
                 eval_concrete(n.kids[1], env));
  case ExprKind::Not: {
    Value v = eval_concrete(n.kids[0], env);
    if (v.is_null())
      return v;
    return Value::of_bool(!v.as_bool());
  }
  case ExprKind::And:
  case ExprKind::Or: {
    bool is_and = n.kind == ExprKind::And;
    bool acc = is_and;
    bool saw_null = false;
    for (const auto &k : n.kids) {
      Value v = eval_concrete(k, env);
      if (v.is_null()) {
        saw_null = true;
        continue;
      }
      acc = is_and ? (acc && v.as_bool()) : (acc || v.as_bool());
    }
    if (saw_null)
      return Null{};
    return Value::of_bool(acc);
  }
  case ExprKind::Cmp:
    return Value::of_bool(compare(n.op, eval_concrete(n.kids[0], env),
                                  eval_concrete(n.kids[1], env)));
  }
  return Null{};
}

// ---------------------------------------------------------------------------
// Substitution

Expr substitute(const Expr &e, const Binding &bind) {
  const auto &n = e.node();
  if (n.kind == ExprKind::Const)
    return e;
  if (n.kind == ExprKind::Var) {
    if (n.var_type)
      return e;
    auto it = bind.find(n.name);
    if (it == bind.end())
      throw Error("UNBOUND_NAME", "no binding for '" + n.name + "'");
    return it->second;
  }
  auto node = std::make_shared<ExprNode>(n);
  bool changed = false;
  for (auto &k : node->kids) {
    Expr s = substitute(k, bind);
    changed = changed || !s.same_node(k);
    k = std::move(s);
  }
  return changed ? Expr(std::move(node)) : e;
}

// ---------------------------------------------------------------------------
// Canonical simplification

namespace {

struct Linear {
  std::map<std::string, Rational> coef; // zero coefficients never stored
  std::map<std::string, TypeTag> types;
  Rational constant;
  bool is_int = true;
  bool null = false;

  bool vars_all_int() const {
    for (const auto &[name, t] : types)
      if (t.kind != TypeKind::Int)
        return false;
    return true;
  }
};

void add_scaled(Linear &into, const Linear &from, const Rational &scale) {
  for (const auto &[v, c] : from.coef) {
    Rational sum = into.coef.count(v) ? into.coef[v] + c * scale : c * scale;
    if (sum == Rational(0))
      into.coef.erase(v);
    else
      into.coef[v] = sum;
    into.types[v] = from.types.at(v);
  }
  into.constant = into.constant + from.constant * scale;
  into.is_int = into.is_int && from.is_int;
  into.null = into.null || from.null;
}

void prune_types(Linear &l) {
  for (auto it = l.types.begin(); it != l.types.end();)
    it = l.coef.count(it->first) ? std::next(it) : l.types.erase(it);
}

std::optional<Linear> linearize(const Expr &e) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const: {
    Linear l;
    if (n.constant.is_null()) {
      l.null = true;
      return l;
    }
    if (!n.constant.is_numeric())
      return std::nullopt;
    l.constant = n.constant.as_rational();
    l.is_int = n.constant.is_int();
    return l;
  }
  case ExprKind::Var: {
    TypeTag t = n.var_type.value_or(TypeTag::rat());
    if (!t.is_numeric())
      return std::nullopt;
    Linear l;
    l.coef[n.name] = Rational(1);
    l.types[n.name] = t;
    l.is_int = t.kind == TypeKind::Int;
    return l;
  }
  case ExprKind::Neg: {
    auto a = linearize(n.kids[0]);
    if (!a)
      return a;
    Linear l;
    l.is_int = a->is_int;
    add_scaled(l, *a, Rational(-1));
    return l;
  }
  case ExprKind::Add:
  case ExprKind::Sub: {
    auto a = linearize(n.kids[0]);
    auto b = linearize(n.kids[1]);
    if (!a || !b)
      return std::nullopt;
    Linear l = *a;
    add_scaled(l, *b, Rational(n.kind == ExprKind::Add ? 1 : -1));
    prune_types(l);
    return l;
  }
  case ExprKind::Mul: {
    auto a = linearize(n.kids[0]);
    auto b = linearize(n.kids[1]);
    if (!a || !b)
      return std::nullopt;
    if (a->null || b->null) {
      Linear l;
      l.null = true;
      return l;
    }
    if (!a->coef.empty() && !b->coef.empty())
      return std::nullopt; // nonlinear
    const Linear &scale = a->coef.empty() ? *a : *b;
    const Linear &term = a->coef.empty() ? *b : *a;
    Linear l;
    l.is_int = scale.is_int;
    add_scaled(l, term, scale.constant);
    prune_types(l);
    return l;
  }
  default:
    return std::nullopt;
  }
}

Expr numeric_const(const Rational &r, bool as_int) {
  if (as_int && r.is_integer())
    return make_const(Value::of_int(r.num()));
  return make_const(Value::of_rat(r));
}

Expr term_expr(const std::string &name, const TypeTag &type, const Rational &c,
               bool int_coef) {
  Expr v = make_sym(name, type);
  if (c == Rational(1))
    return v;
  if (c == Rational(-1))
    return make_neg(v);
  return make_mul(numeric_const(c, int_coef), v);
}

/// Sum of terms (no constant) in canonical order; nullopt when empty.
std::optional<Expr> terms_expr(const Linear &l, bool int_coef) {
  std::optional<Expr> acc;
  for (const auto &[name, c] : l.coef) {
    const TypeTag &t = l.types.at(name);
    bool ic = int_coef && t.kind == TypeKind::Int;
    if (!acc) {
      acc = term_expr(name, t, c, ic);
    } else if (c < Rational(0)) {
      acc = make_sub(*acc, term_expr(name, t, -c, ic));
    } else {
      acc = make_add(*acc, term_expr(name, t, c, ic));
    }
  }
  return acc;
}

Expr from_linear(const Linear &l) {
  if (l.null)
    return make_const(Null{});
  auto acc = terms_expr(l, l.is_int);
  if (!acc)
    return numeric_const(l.constant, l.is_int);
  if (l.constant == Rational(0))
    return *acc;
  if (l.constant < Rational(0))
    return make_sub(*acc, numeric_const(-l.constant, l.is_int));
  return make_add(*acc, numeric_const(l.constant, l.is_int));
}

bool fold_cmp(CmpOp op, const Rational &lhs, const Rational &rhs) {
  auto c = lhs <=> rhs;
  switch (op) {
  case CmpOp::Lt:
    return c < 0;
  case CmpOp::Le:
    return c <= 0;
  case CmpOp::Eq:
    return c == 0;
  case CmpOp::Ne:
    return c != 0;
  case CmpOp::Ge:
    return c >= 0;
  case CmpOp::Gt:
    return c > 0;
  }
  return false;
}

std::int64_t floor_div(const Rational &r) {
  std::int64_t q = r.num() / r.den();
  if (r.num() % r.den() != 0 && r.num() < 0)
    --q;
  return q;
}

std::int64_t ceil_div(const Rational &r) {
  std::int64_t q = r.num() / r.den();
  if (r.num() % r.den() != 0 && r.num() > 0)
    ++q;
  return q;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  return checked_mul(a / gcd64(a, b), b);
}

/// Canonical numeric comparison `l op 0`.
Expr canonical_linear_cmp(CmpOp op, Linear l) {
  if (l.null)
    return make_false();
  Rational k = -l.constant; // sum op k
  l.constant = Rational(0);
  if (l.coef.empty())
    return make_const(Value::of_bool(fold_cmp(op, Rational(0), k)));

  auto scale_all = [&](const Rational &s) {
    for (auto &[v, c] : l.coef)
      c = c * s;
    k = k * s;
    if (s < Rational(0))
      op = cmp_flip(op);
  };

  if (l.vars_all_int()) {
    std::int64_t den = 1;
    for (const auto &[v, c] : l.coef)
      den = lcm64(den, c.den());
    scale_all(Rational(den));
    if (l.coef.begin()->second < Rational(0))
      scale_all(Rational(-1));
    std::int64_t g = 0;
    for (const auto &[v, c] : l.coef)
      g = gcd64(g, c.num());
    if (g > 1)
      scale_all(Rational(1, g));
    switch (op) {
    case CmpOp::Lt:
      op = CmpOp::Le;
      k = Rational(checked_sub(ceil_div(k), 1));
      break;
    case CmpOp::Le:
      k = Rational(floor_div(k));
      break;
    case CmpOp::Gt:
      op = CmpOp::Ge;
      k = Rational(checked_add(floor_div(k), 1));
      break;
    case CmpOp::Ge:
      k = Rational(ceil_div(k));
      break;
    case CmpOp::Eq:
      if (!k.is_integer())
        return make_false();
      break;
    case CmpOp::Ne:
      if (!k.is_integer())
        return make_true();
      break;
    }
    return make_cmp(op, *terms_expr(l, true), numeric_const(k, true));
  }

  Rational lead = l.coef.begin()->second;
  scale_all(Rational(lead.den(), lead.num())); // leading coefficient -> 1
  return make_cmp(op, *terms_expr(l, false), numeric_const(k, false));
}

bool is_bool_expr(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Not:
  case ExprKind::And:
  case ExprKind::Or:
  case ExprKind::Cmp:
    return true;
  case ExprKind::Const:
    return e->constant.is_bool();
  case ExprKind::Var:
    return e->var_type && e->var_type->kind == TypeKind::Bool;
  default:
    return false;
  }
}

Expr simp_bool(const Expr &e, bool neg);

/// Orders operands of a symmetric (dis)equality: non-constants first, then
/// by text.
std::pair<Expr, Expr> sorted_pair(Expr a, Expr b) {
  auto key = [](const Expr &x) {
    return std::make_pair(x.is_const(), to_string(x));
  };
  if (key(b) < key(a))
    std::swap(a, b);
  return {a, b};
}

Expr canonical_cmp(CmpOp op, const Expr &a, const Expr &b) {
  auto la = linearize(a);
  auto lb = linearize(b);
  if (la && lb) {
    Linear d = *la;
    add_scaled(d, *lb, Rational(-1));
    prune_types(d);
    return canonical_linear_cmp(op, std::move(d));
  }
  Expr sa = is_bool_expr(a) ? simp_bool(a, false) : simplify(a);
  Expr sb = is_bool_expr(b) ? simp_bool(b, false) : simplify(b);
  if (sa.is_null() || sb.is_null())
    return make_false();
  if (sa.is_const() && sb.is_const())
    return make_const(Value::of_bool(
        eval_concrete(make_cmp(op, sa, sb), {}).as_bool()));
  if (op != CmpOp::Eq && op != CmpOp::Ne)
    return make_cmp(op, sa, sb);
  // Boolean comparison with a literal reduces to the other operand.
  for (int side = 0; side < 2; ++side) {
    const Expr &lit = side == 0 ? sa : sb;
    const Expr &other = side == 0 ? sb : sa;
    if (lit.is_const() && lit->constant.is_bool()) {
      bool positive = lit->constant.as_bool() == (op == CmpOp::Eq);
      return simp_bool(other, !positive);
    }
  }
  auto [x, y] = sorted_pair(sa, sb);
  if (structurally_equal(x, y))
    return make_const(Value::of_bool(op == CmpOp::Eq));
  return make_cmp(op, x, y);
}

Expr negate_atom(const Expr &atom) {
  switch (atom.kind()) {
  case ExprKind::Const:
    if (atom->constant.is_bool())
      return make_const(Value::of_bool(!atom->constant.as_bool()));
    return atom; // Null stays Null
  case ExprKind::Cmp:
    return canonical_cmp(cmp_negate(atom->op), atom.kids()[0],
                         atom.kids()[1]);
  case ExprKind::Not:
    return atom.kids()[0];
  default:
    return make_not(atom);
  }
}

Expr simp_bool(const Expr &e, bool neg) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const:
    if (n.constant.is_bool() && neg)
      return make_const(Value::of_bool(!n.constant.as_bool()));
    return e;
  case ExprKind::Var:
    return neg ? make_not(e) : e;
  case ExprKind::Not:
    return simp_bool(n.kids[0], !neg);
  case ExprKind::Cmp: {
    Expr atom = canonical_cmp(n.op, n.kids[0], n.kids[1]);
    if (!neg)
      return atom;
    if (atom.kind() == ExprKind::And || atom.kind() == ExprKind::Or)
      return simp_bool(atom, true);
    return negate_atom(atom);
  }
  case ExprKind::And:
  case ExprKind::Or: {
    bool conj = (n.kind == ExprKind::And) != neg;
    ExprKind kind = conj ? ExprKind::And : ExprKind::Or;
    std::vector<Expr> flat;
    bool saw_null = false, absorbed = false;
    for (const auto &k : n.kids) {
      Expr s = simp_bool(k, neg);
      if (s.is_null()) {
        saw_null = true;
        continue;
      }
      if (s.is_const() && s->constant.is_bool()) {
        if (s->constant.as_bool() != conj)
          absorbed = true; // false in a conjunction, true in a disjunction
        continue;
      }
      if (s.kind() == kind)
        flat.insert(flat.end(), s.kids().begin(), s.kids().end());
      else
        flat.push_back(s);
    }
    if (saw_null)
      return make_const(Null{});
    if (absorbed)
      return make_const(Value::of_bool(!conj));
    std::vector<std::pair<std::string, Expr>> keyed;
    keyed.reserve(flat.size());
    for (auto &k : flat)
      keyed.emplace_back(to_string(k), k);
    std::sort(keyed.begin(), keyed.end(),
              [](const auto &x, const auto &y) { return x.first < y.first; });
    std::vector<Expr> kids;
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (i > 0 && keyed[i].first == keyed[i - 1].first &&
          structurally_equal(keyed[i].second, keyed[i - 1].second))
        continue;
      kids.push_back(keyed[i].second);
    }
    if (kids.empty())
      return make_const(Value::of_bool(conj));
    if (kids.size() == 1)
      return kids.front();
    return conj ? make_and(std::move(kids)) : make_or(std::move(kids));
  }
  default: {
    // Arithmetic in boolean position is ill-typed; keep it canonical anyway.
    Expr s = simplify(e);
    return neg ? make_not(s) : s;
  }
  }
}

} // namespace

Expr simplify(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Const:
  case ExprKind::Var:
    return e;
  case ExprKind::Neg:
  case ExprKind::Add:
  case ExprKind::Sub:
  case ExprKind::Mul: {
    if (auto l = linearize(e))
      return from_linear(*l);
    // Nonlinear remainder: simplify operands only.
    auto node = std::make_shared<ExprNode>(e.node());
    for (auto &k : node->kids)
      k = simplify(k);
    return Expr(std::move(node));
  }
  default:
    return simp_bool(e, false);
  }
}

Expr negate(const Expr &e) { return simp_bool(e, true); }

std::string canonical_text(const Expr &e) { return to_string(simplify(e)); }

// ---------------------------------------------------------------------------
// Path conditions

std::string BranchRecord::branch_id() const {
  return (instance.empty() ? std::string("root") : instance) + "/" +
         transition + "@" + std::to_string(tick);
}

Expr BranchRecord::signed_cond() const {
  return taken ? simplify(cond) : negate(cond);
}

Expr PathCondition::conjunction() const {
  std::vector<Expr> parts;
  parts.reserve(records.size());
  for (const auto &r : records)
    parts.push_back(r.signed_cond());
  return simplify(make_and(std::move(parts)));
}

std::vector<Expr> decompose(const PathCondition &pc) {
  std::vector<Expr> out;
  out.reserve(pc.records.size());
  for (const auto &r : pc.records)
    out.push_back(r.signed_cond());
  return out;
}

} // namespace ccl
