// Boolean search over the NNF skeleton with theory checks for booleans,
// string/enum (dis)equalities and linear arithmetic.

#include "solver_internal.hpp"

#include <algorithm>
#include <functional>

#include "ccl/error.hpp"

namespace ccl {

using detail::LinCon;
using detail::Q;
using detail::Rel;
using detail::TimeoutSignal;

namespace {

struct Term {
  bool is_var = false;
  std::string var;
  Value constant;
  std::string key() const {
    return is_var ? "v:" + var : "c:" + constant.to_string();
  }
};

struct EqLit {
  Term a, b;
  bool equal = true;
  TypeTag type;
};

struct Conj {
  std::map<std::string, bool> bools;
  std::vector<EqLit> eqs;
  std::vector<LinCon> lins;
  bool conflict = false;
};

// Linear form of a numeric expression; nullopt if non-linear or non-numeric.
bool linear_into(const Expr &e, const Q &scale, LinCon &out,
                 std::map<std::string, TypeTag> &types) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const:
    if (n.constant.is_int() || n.constant.is_rat()) {
      Rational r = n.constant.as_rational();
      out.k -= scale * Q(r.num()) / Q(r.den());
      return true;
    }
    return false;
  case ExprKind::Var:
    if (!n.var_type || !n.var_type->is_numeric())
      return false;
    out.a[n.name] += scale;
    types[n.name] = *n.var_type;
    return true;
  case ExprKind::Neg:
    return linear_into(n.kids[0], -scale, out, types);
  case ExprKind::Add:
    return linear_into(n.kids[0], scale, out, types) &&
           linear_into(n.kids[1], scale, out, types);
  case ExprKind::Sub:
    return linear_into(n.kids[0], scale, out, types) &&
           linear_into(n.kids[1], -scale, out, types);
  case ExprKind::Mul: {
    for (int side = 0; side < 2; ++side) {
      const Expr &c = n.kids[side];
      if (c.is_const() && (c->constant.is_int() || c->constant.is_rat())) {
        Rational r = c->constant.as_rational();
        return linear_into(n.kids[1 - side], scale * Q(r.num()) / Q(r.den()),
                           out, types);
      }
    }
    return false;
  }
  default:
    return false;
  }
}

std::optional<Term> term_of(const Expr &e, TypeTag &type) {
  if (e.kind() == ExprKind::Var && e->var_type &&
      (e->var_type->kind == TypeKind::Str ||
       e->var_type->kind == TypeKind::Enum)) {
    type = *e->var_type;
    return Term{true, e->name, {}};
  }
  if (e.is_const() && (e->constant.is_str() || e->constant.is_enum())) {
    type = e->constant.is_str() ? TypeTag::str()
                                : TypeTag::enumeration(e->constant.as_enum().enum_name);
    return Term{false, {}, e->constant};
  }
  return std::nullopt;
}

bool is_bool_typed(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Var:
    return e->var_type && e->var_type->kind == TypeKind::Bool;
  case ExprKind::Const:
    return e->constant.is_bool();
  case ExprKind::Not:
  case ExprKind::And:
  case ExprKind::Or:
  case ExprKind::Cmp:
    return true;
  default:
    return false;
  }
}

[[noreturn]] void unsupported(const Expr &e) {
  throw Error("UNSUPPORTED_ATOM", "unsupported atom '" + to_string(e) + "'");
}

class Search {
public:
  Search(const SolverConfig &cfg, const Deadline &dl) : cfg_(cfg), dl_(dl) {}

  std::map<std::string, TypeTag> types;
  Env model;
  bool saw_unknown = false;
  UnknownReason unknown_reason = UnknownReason::None;

  bool run(std::vector<Expr> todo, Conj conj, std::vector<Expr> ors) {
    if (dl_.expired())
      throw TimeoutSignal{};
    while (!todo.empty()) {
      Expr e = todo.back();
      todo.pop_back();
      if (!absorb(e, todo, conj, ors))
        return false;
    }
    if (conj.conflict)
      return false;
    bool final = ors.empty();
    if (!theory(conj, final))
      return false;
    if (final)
      return true;
    // Branch on the disjunction with the fewest alternatives.
    std::size_t best = 0;
    for (std::size_t i = 1; i < ors.size(); ++i)
      if (ors[i].kids().size() < ors[best].kids().size())
        best = i;
    Expr split = ors[best];
    ors.erase(ors.begin() + long(best));
    for (const auto &kid : split.kids())
      if (run({kid}, conj, ors))
        return true;
    return false;
  }

private:
  // Moves one formula into the conjunction; false on immediate conflict.
  bool absorb(const Expr &e, std::vector<Expr> &todo, Conj &conj,
              std::vector<Expr> &ors) {
    const auto &n = e.node();
    switch (n.kind) {
    case ExprKind::Const:
      if (n.constant.is_bool())
        return n.constant.as_bool();
      if (n.constant.is_null())
        return false;
      unsupported(e);
    case ExprKind::And:
      for (const auto &k : n.kids)
        todo.push_back(k);
      return true;
    case ExprKind::Or:
      ors.push_back(e);
      return true;
    case ExprKind::Var:
    case ExprKind::Not: {
      bool positive = n.kind == ExprKind::Var;
      const Expr &v = positive ? e : n.kids[0];
      if (v.kind() == ExprKind::Var && v->var_type &&
          v->var_type->kind == TypeKind::Bool) {
        types[v->name] = TypeTag::boolean();
        auto [it, fresh] = conj.bools.emplace(v->name, positive);
        return fresh || it->second == positive;
      }
      if (!positive) {
        todo.push_back(negate(v));
        return true;
      }
      unsupported(e);
    }
    case ExprKind::Cmp:
      return absorb_cmp(e, todo, conj, ors);
    default:
      unsupported(e);
    }
  }

  bool absorb_cmp(const Expr &e, std::vector<Expr> &todo, Conj &conj,
                  std::vector<Expr> &ors) {
    const auto &n = e.node();
    const Expr &l = n.kids[0], &r = n.kids[1];
    if (is_bool_typed(l) && is_bool_typed(r)) {
      if (n.op != CmpOp::Eq && n.op != CmpOp::Ne)
        unsupported(e);
      Expr nl = negate(l);
      Expr same = make_or({make_and({l, r}), make_and({nl, negate(r)})});
      Expr diff = make_or({make_and({l, negate(r)}), make_and({nl, r})});
      todo.push_back(n.op == CmpOp::Eq ? same : diff);
      return true;
    }
    TypeTag tl, tr;
    auto a = term_of(l, tl);
    auto b = term_of(r, tr);
    if (a && b) {
      if (n.op != CmpOp::Eq && n.op != CmpOp::Ne)
        unsupported(e);
      if (a->is_var)
        types[a->var] = tl;
      if (b->is_var)
        types[b->var] = tr;
      conj.eqs.push_back({*a, *b, n.op == CmpOp::Eq, a->is_var ? tl : tr});
      return true;
    }
    LinCon c;
    std::map<std::string, TypeTag> ty;
    // (l - r) op 0, i.e. sum a x op -constant
    if (!linear_into(l, Q(1), c, ty) || !linear_into(r, Q(-1), c, ty))
      unsupported(e);
    for (auto &[x, t] : ty)
      types[x] = t;
    switch (n.op) {
    case CmpOp::Le:
      c.rel = Rel::Le;
      break;
    case CmpOp::Lt:
      c.rel = Rel::Lt;
      break;
    case CmpOp::Eq:
      c.rel = Rel::Eq;
      break;
    case CmpOp::Ge:
    case CmpOp::Gt:
      for (auto &[_, v] : c.a)
        v = -v;
      c.k = -c.k;
      c.rel = n.op == CmpOp::Ge ? Rel::Le : Rel::Lt;
      break;
    case CmpOp::Ne:
      ors.push_back(make_or({make_cmp(CmpOp::Lt, l, r),
                             make_cmp(CmpOp::Gt, l, r)}));
      return true;
    }
    conj.lins.push_back(std::move(c));
    return true;
  }

  bool theory(const Conj &conj, bool final) {
    std::map<std::string, Value> strs;
    if (!equalities(conj, final ? &strs : nullptr))
      return false;
    std::set<std::string> ints;
    for (const auto &c : conj.lins)
      for (const auto &[x, _] : c.a)
        if (types.at(x).kind == TypeKind::Int)
          ints.insert(x);
    auto r = detail::solve_arith(conj.lins, ints, !final, cfg_, dl_);
    if (r.status == SolveStatus::Unsat)
      return false;
    if (r.status == SolveStatus::Unknown) {
      saw_unknown = true;
      unknown_reason = r.reason;
      return false;
    }
    if (!final)
      return true;
    model.clear();
    for (const auto &[x, v] : r.model) {
      if (types.at(x).kind == TypeKind::Int) {
        if (v > Q(INT64_MAX) || v < Q(INT64_MIN)) {
          saw_unknown = true;
          unknown_reason = UnknownReason::Unsupported;
          return false;
        }
        model[x] = Value::of_int(static_cast<std::int64_t>(numerator(v)));
      } else {
        auto num = numerator(v), den = denominator(v);
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX) {
          saw_unknown = true;
          unknown_reason = UnknownReason::Unsupported;
          return false;
        }
        model[x] = Value::of_rat(Rational(static_cast<std::int64_t>(num),
                                          static_cast<std::int64_t>(den)));
      }
    }
    for (const auto &[x, b] : conj.bools)
      model[x] = Value::of_bool(b);
    for (auto &[x, v] : strs)
      model[x] = v;
    return true;
  }

  // Union-find over string/enum terms. When `out` is given, also builds a
  // model for the variables.
  bool equalities(const Conj &conj, std::map<std::string, Value> *out) {
    std::map<std::string, std::string> parent;
    std::map<std::string, Term> terms;
    std::function<std::string(const std::string &)> find =
        [&](const std::string &k) -> std::string {
      auto it = parent.find(k);
      if (it == parent.end() || it->second == k)
        return k;
      return it->second = find(it->second);
    };
    auto add = [&](const Term &t) {
      std::string k = t.key();
      terms.emplace(k, t);
      parent.emplace(k, k);
      return k;
    };
    for (const auto &q : conj.eqs) {
      std::string ka = add(q.a), kb = add(q.b);
      if (q.equal)
        parent[find(ka)] = find(kb);
    }
    // Constant per class.
    std::map<std::string, Value> fixed;
    for (const auto &[k, t] : terms) {
      if (t.is_var)
        continue;
      std::string root = find(k);
      auto [it, fresh] = fixed.emplace(root, t.constant);
      if (!fresh && !(it->second == t.constant))
        return false;
    }
    std::map<std::string, std::set<std::string>> apart;
    for (const auto &q : conj.eqs) {
      if (q.equal)
        continue;
      std::string ra = find(q.a.key()), rb = find(q.b.key());
      if (ra == rb)
        return false;
      apart[ra].insert(rb);
      apart[rb].insert(ra);
    }
    // Classes of each type; enum classes need a colouring by variants.
    std::map<std::string, TypeTag> class_type;
    for (const auto &q : conj.eqs) {
      class_type[find(q.a.key())] = q.type;
      class_type[find(q.b.key())] = q.type;
    }
    std::map<std::string, Value> colour = fixed;
    std::vector<std::string> open_enum, open_str;
    for (const auto &[root, t] : class_type) {
      if (colour.count(root))
        continue;
      (t.kind == TypeKind::Enum ? open_enum : open_str).push_back(root);
    }
    std::function<bool(std::size_t)> paint = [&](std::size_t i) -> bool {
      if (i == open_enum.size())
        return true;
      const std::string &root = open_enum[i];
      const std::string &name = class_type.at(root).enum_name;
      auto en = cfg_.enums.find(name);
      if (en == cfg_.enums.end())
        throw Error("UNSUPPORTED_ATOM", "unknown enum '" + name + "'");
      for (const auto &v : en->second) {
        Value cand = Value::of_enum(name, v);
        bool clash = false;
        for (const auto &other : apart[root]) {
          auto it = colour.find(other);
          clash = clash || (it != colour.end() && it->second == cand);
        }
        if (clash)
          continue;
        colour[root] = cand;
        if (paint(i + 1))
          return true;
        colour.erase(root);
      }
      return false;
    };
    if (!paint(0))
      return false;
    if (!out)
      return true;
    std::set<std::string> used;
    for (const auto &[_, v] : colour)
      if (v.is_str())
        used.insert(v.as_str());
    int fresh = 0;
    for (const auto &root : open_str) {
      std::string s;
      do
        s = "s" + std::to_string(fresh++);
      while (used.count(s));
      colour[root] = Value::of_str(s);
    }
    for (const auto &[k, t] : terms)
      if (t.is_var)
        (*out)[t.var] = colour.at(find(k));
    return true;
  }

  const SolverConfig &cfg_;
  const Deadline &dl_;
};

void collect_types(const Expr &e, std::map<std::string, TypeTag> &out) {
  for_each_node(e, [&](const Expr &node_expr) {
    const ExprNode &n = node_expr.node();
    if (n.kind == ExprKind::Var && n.var_type)
      out.emplace(n.name, *n.var_type);
  });
}

} // namespace

Value default_value(const TypeTag &t, const EnumTable &enums) {
  if (t.kind == TypeKind::Enum) {
    auto it = enums.find(t.enum_name);
    if (it == enums.end() || it->second.empty())
      throw Error("UNSUPPORTED_ATOM", "unknown enum '" + t.enum_name + "'");
    return Value::of_enum(t.enum_name, it->second.front());
  }
  return Value::default_of(t, "");
}

SolveResult solve_builtin(const std::vector<Expr> &assertions,
                          const SolverConfig &cfg, const Deadline &deadline) {
  SolveResult res;
  std::vector<Expr> todo;
  std::map<std::string, TypeTag> all_types;
  for (const auto &a : assertions) {
    Expr s = simplify(a);
    collect_types(s, all_types);
    todo.push_back(s);
  }
  Search search(cfg, deadline);
  bool found = false;
  try {
    found = search.run(todo, {}, {});
  } catch (const TimeoutSignal &) {
    res.status = SolveStatus::Unknown;
    res.reason = UnknownReason::Timeout;
    return res;
  }
  if (!found) {
    if (search.saw_unknown) {
      res.status = SolveStatus::Unknown;
      res.reason = search.unknown_reason;
    } else {
      res.status = SolveStatus::Unsat;
    }
    return res;
  }
  res.status = SolveStatus::Sat;
  res.model = std::move(search.model);
  for (const auto &[x, t] : all_types)
    if (!res.model.count(x))
      res.model[x] = default_value(t, cfg.enums);
  for (const auto &a : assertions) {
    Value v = eval_concrete(a, res.model);
    if (!v.is_bool() || !v.as_bool())
      throw Error("INTERNAL", "solver model violates '" + to_string(a) + "'");
  }
  return res;
}

} // namespace ccl
