#include "ccl/model.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "ccl/error.hpp"
#include "ccl/symbolic.hpp"

namespace ccl {

std::vector<std::string> Automaton::states() const {
  std::vector<std::string> out;
  auto add = [&](const std::string &s) {
    if (std::find(out.begin(), out.end(), s) == out.end())
      out.push_back(s);
  };
  add(initial);
  for (const auto &t : transitions) {
    add(t.source);
    add(t.target);
  }
  return out;
}

const Port *Component::find_port(const std::string &port) const {
  for (const auto &p : ports)
    if (p.name == port)
      return &p;
  return nullptr;
}

const Component *Model::find_component(const std::string &name) const {
  for (const auto &c : components)
    if (c.name == name)
      return &c;
  return nullptr;
}

const EnumDecl *Model::find_enum(const std::string &name) const {
  for (const auto &e : enums)
    if (e.name == name)
      return &e;
  return nullptr;
}

std::string Model::first_variant(const std::string &enum_name) const {
  const auto *e = find_enum(enum_name);
  return e && !e->variants.empty() ? e->variants.front() : std::string{};
}

// ---------------------------------------------------------------------------
// Typing

namespace {

std::optional<TypeTag> fail(std::string *error, const std::string &msg) {
  if (error && error->empty())
    *error = msg;
  return std::nullopt;
}

TypeTag numeric_join(const TypeTag &a, const TypeTag &b) {
  return a.kind == TypeKind::Int && b.kind == TypeKind::Int ? TypeTag::int_()
                                                            : TypeTag::rat();
}

bool comparable(const TypeTag &a, const TypeTag &b) {
  if (a.is_numeric() && b.is_numeric())
    return true;
  return a == b;
}

} // namespace

std::optional<TypeTag> infer_type(const Expr &e,
                                  const std::map<std::string, TypeTag> &scope,
                                  std::string *error) {
  const auto &n = e.node();
  switch (n.kind) {
  case ExprKind::Const: {
    auto t = n.constant.type();
    if (!t)
      return fail(error, "null literal has no type");
    return t;
  }
  case ExprKind::Var: {
    if (n.var_type)
      return n.var_type;
    auto it = scope.find(n.name);
    if (it == scope.end())
      return fail(error, "unknown name '" + n.name + "'");
    return it->second;
  }
  case ExprKind::Neg: {
    auto t = infer_type(n.kids[0], scope, error);
    if (!t)
      return t;
    if (!t->is_numeric())
      return fail(error, "unary minus on non-numeric operand");
    return t;
  }
  case ExprKind::Add:
  case ExprKind::Sub:
  case ExprKind::Mul: {
    auto a = infer_type(n.kids[0], scope, error);
    auto b = infer_type(n.kids[1], scope, error);
    if (!a || !b)
      return std::nullopt;
    if (!a->is_numeric() || !b->is_numeric())
      return fail(error, "arithmetic on non-numeric operand");
    return numeric_join(*a, *b);
  }
  case ExprKind::Not: {
    auto t = infer_type(n.kids[0], scope, error);
    if (!t)
      return t;
    if (t->kind != TypeKind::Bool)
      return fail(error, "'!' on non-boolean operand");
    return t;
  }
  case ExprKind::And:
  case ExprKind::Or: {
    for (const auto &k : n.kids) {
      auto t = infer_type(k, scope, error);
      if (!t)
        return t;
      if (t->kind != TypeKind::Bool)
        return fail(error, "connective on non-boolean operand");
    }
    return TypeTag::boolean();
  }
  case ExprKind::Cmp: {
    auto a = infer_type(n.kids[0], scope, error);
    auto b = infer_type(n.kids[1], scope, error);
    if (!a || !b)
      return std::nullopt;
    if (!comparable(*a, *b))
      return fail(error, "cannot compare " + a->to_string() + " with " +
                             b->to_string());
    if (!a->is_numeric() && n.op != CmpOp::Eq && n.op != CmpOp::Ne)
      return fail(error, "ordering comparison on " + a->to_string());
    return TypeTag::boolean();
  }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Structural expansion shared by validation and flattening

namespace {

struct ExpInstance {
  std::string path;
  const Component *component = nullptr;
  int parent = -1;
  const SubInstance *decl = nullptr; // null for the root
};

struct PortKey {
  int inst;
  std::string port;
  friend auto operator<=>(const PortKey &, const PortKey &) = default;
};

struct Expansion {
  std::vector<ExpInstance> instances;
  std::map<PortKey, PortKey> source; // target -> source
  std::vector<int> atomic_ids;       // instance indices of atomics
  // Resolved (only when the wiring is complete).
  std::map<int, std::map<std::string, PortRef>> atomic_inputs; // by atomic#
  std::map<std::string, PortRef> root_outputs;
  std::vector<int> order; // atomic#
  bool ok = true;
};

std::string child_path(const std::string &parent, const std::string &name) {
  return parent.empty() ? name : parent + "." + name;
}

void diag(ValidationReport &r, std::string code, std::string msg,
          const SourceSpan &span = {}) {
  r.push_back({std::move(code), std::move(msg), span});
}

Expansion expand(const Model &m, ValidationReport &report) {
  Expansion ex;
  const Component *root = m.find_component(m.root);
  if (!root) {
    ex.ok = false;
    return ex;
  }

  std::vector<std::string> stack;
  std::function<void(const Component *, const std::string &, int,
                     const SubInstance *)>
      visit = [&](const Component *c, const std::string &path, int parent,
                  const SubInstance *decl) {
        int id = int(ex.instances.size());
        ex.instances.push_back({path, c, parent, decl});
        if (c->is_atomic()) {
          ex.atomic_ids.push_back(id);
          return;
        }
        if (std::find(stack.begin(), stack.end(), c->name) != stack.end()) {
          diag(report, "RECURSIVE_INSTANTIATION",
               "component '" + c->name + "' instantiates itself", c->span);
          ex.ok = false;
          return;
        }
        stack.push_back(c->name);
        for (const auto &sub : c->composite().subcomponents) {
          const Component *sc = m.find_component(sub.component);
          if (!sc) {
            ex.ok = false;
            continue;
          }
          visit(sc, child_path(path, sub.name), id, &sub);
        }
        stack.pop_back();
      };
  visit(root, "", -1, nullptr);
  if (!ex.ok)
    return ex;

  // Children lookup.
  std::map<std::pair<int, std::string>, int> child_of;
  for (int i = 0; i < int(ex.instances.size()); ++i) {
    const auto &in = ex.instances[i];
    if (in.decl)
      child_of[{in.parent, in.decl->name}] = i;
  }

  // Connectors.
  for (int i = 0; i < int(ex.instances.size()); ++i) {
    const auto &inst = ex.instances[i];
    if (inst.component->is_atomic())
      continue;
    const auto &comp = *inst.component;
    auto lookup = [&](const Endpoint &ep, bool as_target,
                      const SourceSpan &span) -> std::optional<PortKey> {
      int owner = i;
      const Component *oc = &comp;
      if (!ep.instance.empty()) {
        auto it = child_of.find({i, ep.instance});
        if (it == child_of.end()) {
          diag(report, "UNKNOWN_INSTANCE",
               "unknown subcomponent '" + ep.instance + "' in '" + comp.name +
                   "'",
               span);
          return std::nullopt;
        }
        owner = it->second;
        oc = ex.instances[owner].component;
      }
      const Port *p = oc->find_port(ep.port);
      if (!p) {
        diag(report, "UNKNOWN_PORT",
             "unknown port '" + ep.to_string() + "' in '" + comp.name + "'",
             span);
        return std::nullopt;
      }
      // Own in-ports and child out-ports are sources; own out-ports and
      // child in-ports are targets.
      bool own = ep.instance.empty();
      bool is_source_dir = own ? p->direction == Direction::In
                               : p->direction == Direction::Out;
      if (is_source_dir == as_target) {
        diag(report, "BAD_CONNECTOR_DIRECTION",
             "endpoint '" + ep.to_string() + "' cannot be a connector " +
                 (as_target ? "target" : "source"),
             span);
        return std::nullopt;
      }
      return PortKey{owner, ep.port};
    };
    for (const auto &c : comp.composite().connectors) {
      auto from = lookup(c.from, false, c.span);
      auto to = lookup(c.to, true, c.span);
      if (!from || !to) {
        ex.ok = false;
        continue;
      }
      const Port *fp =
          ex.instances[from->inst].component->find_port(from->port);
      const Port *tp = ex.instances[to->inst].component->find_port(to->port);
      if (!comparable(fp->type, tp->type) ||
          (fp->type.kind == TypeKind::Rational &&
           tp->type.kind == TypeKind::Int)) {
        diag(report, "TYPE_MISMATCH",
             "connector " + c.from.to_string() + " -> " + c.to.to_string() +
                 " joins " + fp->type.to_string() + " with " +
                 tp->type.to_string(),
             c.span);
        ex.ok = false;
      }
      if (ex.source.count(*to)) {
        diag(report, "FAN_IN",
             "port '" + c.to.to_string() + "' has more than one incoming "
                 "connector",
             c.span);
        ex.ok = false;
        continue;
      }
      ex.source[*to] = *from;
    }
  }

  // Every target port needs a source.
  for (int i = 0; i < int(ex.instances.size()); ++i) {
    const auto &inst = ex.instances[i];
    for (const auto &p : inst.component->ports) {
      bool is_target =
          (inst.parent >= 0 && p.direction == Direction::In) ||
          (!inst.component->is_atomic() && p.direction == Direction::Out);
      if (is_target && !ex.source.count({i, p.name})) {
        diag(report, "UNCONNECTED_PORT",
             "port '" + child_path(inst.path, p.name) +
                 "' has no incoming connector",
             p.span);
        ex.ok = false;
      }
    }
  }
  if (!ex.ok)
    return ex;

  std::map<int, int> atomic_index;
  for (int a = 0; a < int(ex.atomic_ids.size()); ++a)
    atomic_index[ex.atomic_ids[a]] = a;

  auto resolve = [&](PortKey key) -> std::optional<PortRef> {
    std::set<PortKey> seen;
    while (true) {
      const auto &inst = ex.instances[key.inst];
      if (key.inst == 0 && inst.component->find_port(key.port)->direction ==
                               Direction::In)
        return PortRef{-1, key.port};
      if (inst.component->is_atomic() &&
          inst.component->find_port(key.port)->direction == Direction::Out)
        return PortRef{atomic_index.at(key.inst), key.port};
      if (!seen.insert(key).second)
        return std::nullopt;
      auto it = ex.source.find(key);
      if (it == ex.source.end())
        return std::nullopt;
      key = it->second;
    }
  };

  for (int a = 0; a < int(ex.atomic_ids.size()); ++a) {
    int id = ex.atomic_ids[a];
    for (const auto &p : ex.instances[id].component->ports) {
      if (p.direction != Direction::In)
        continue;
      if (id == 0) {
        ex.atomic_inputs[a][p.name] = PortRef{-1, p.name};
        continue;
      }
      auto ref = resolve({id, p.name});
      if (!ref) {
        diag(report, "CYCLE_NO_DELAY",
             "pass-through loop reaching '" +
                 child_path(ex.instances[id].path, p.name) + "'");
        ex.ok = false;
        return ex;
      }
      ex.atomic_inputs[a][p.name] = *ref;
    }
  }
  for (const auto &p : root->ports) {
    if (p.direction != Direction::Out)
      continue;
    if (root->is_atomic()) {
      ex.root_outputs[p.name] = PortRef{0, p.name};
      continue;
    }
    auto ref = resolve({0, p.name});
    if (!ref) {
      diag(report, "CYCLE_NO_DELAY", "pass-through loop reaching '" + p.name +
                                         "'");
      ex.ok = false;
      return ex;
    }
    ex.root_outputs[p.name] = *ref;
  }

  // Topological order over non-delayed atomic connections.
  int n = int(ex.atomic_ids.size());
  std::vector<std::set<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (int a = 0; a < n; ++a) {
    for (const auto &[port, ref] : ex.atomic_inputs[a]) {
      if (ref.atomic < 0)
        continue;
      const Port *src = ex.instances[ex.atomic_ids[ref.atomic]]
                            .component->find_port(ref.port);
      if (src->delayed)
        continue;
      if (succ[ref.atomic].insert(a).second)
        ++indeg[a];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int a = 0; a < n; ++a)
    if (indeg[a] == 0)
      ready.push(a);
  while (!ready.empty()) {
    int a = ready.top();
    ready.pop();
    ex.order.push_back(a);
    for (int b : succ[a])
      if (--indeg[b] == 0)
        ready.push(b);
  }
  if (int(ex.order.size()) != n) {
    std::string members;
    for (int a = 0; a < n; ++a)
      if (indeg[a] > 0)
        members += (members.empty() ? "" : ", ") +
                   ex.instances[ex.atomic_ids[a]].path;
    diag(report, "CYCLE_NO_DELAY",
         "feedback loop without a delayed port through: " + members);
    ex.ok = false;
  }
  return ex;
}

bool is_param_const(const Expr &e, const std::set<std::string> &params) {
  bool ok = true;
  for_each_node(e, [&](const Expr &n) {
    if (n.kind() == ExprKind::Var && (n->var_type || !params.count(n->name)))
      ok = false;
  });
  return ok;
}

void check_linear(const Expr &e, const std::set<std::string> &params,
                  ValidationReport &r) {
  for_each_node(e, [&](const Expr &n) {
    if (n.kind() == ExprKind::Mul && !is_param_const(n.kids()[0], params) &&
        !is_param_const(n.kids()[1], params))
      diag(r, "NONLINEAR",
           "multiplication needs a constant operand: " + to_string(n),
           n->span);
  });
}

void check_expr(const Expr &e, const std::map<std::string, TypeTag> &scope,
                const std::set<std::string> &params, const TypeTag *expected,
                const std::string &what, ValidationReport &r) {
  std::string err;
  auto t = infer_type(e, scope, &err);
  if (!t) {
    bool unknown = err.rfind("unknown name", 0) == 0;
    diag(r, unknown ? "UNKNOWN_NAME" : "TYPE_MISMATCH", what + ": " + err,
         e->span);
    return;
  }
  check_linear(e, params, r);
  if (expected && !(*t == *expected) &&
      !(t->kind == TypeKind::Int && expected->kind == TypeKind::Rational))
    diag(r, "TYPE_MISMATCH",
         what + ": expected " + expected->to_string() + ", got " +
             t->to_string(),
         e->span);
}

void check_type_tag(const Model &m, const TypeTag &t, const std::string &what,
                    const SourceSpan &span, ValidationReport &r) {
  if (t.kind == TypeKind::Enum && !m.find_enum(t.enum_name))
    diag(r, "UNKNOWN_ENUM", what + ": unknown enum '" + t.enum_name + "'",
         span);
}

bool value_valid(const Model &m, const Value &v, const TypeTag &t) {
  if (v.is_null() || !v.fits(t))
    return false;
  if (v.is_enum()) {
    const auto *e = m.find_enum(v.as_enum().enum_name);
    return e && std::find(e->variants.begin(), e->variants.end(),
                          v.as_enum().variant) != e->variants.end();
  }
  return true;
}

void validate_component(const Model &m, const Component &c,
                        ValidationReport &r) {
  std::set<std::string> names;
  std::map<std::string, TypeTag> scope;
  std::set<std::string> params;
  auto declare = [&](const std::string &n, const TypeTag &t,
                     const SourceSpan &span) {
    if (!names.insert(n).second)
      diag(r, "DUPLICATE_NAME",
           "name '" + n + "' declared twice in '" + c.name + "'", span);
    scope[n] = t;
  };
  for (const auto &p : c.params) {
    check_type_tag(m, p.type, "parameter " + p.name, c.span, r);
    declare(p.name, p.type, c.span);
    params.insert(p.name);
  }
  for (const auto &p : c.ports) {
    check_type_tag(m, p.type, "port " + p.name, p.span, r);
    declare(p.name, p.type, p.span);
    if (p.delayed) {
      if (p.direction != Direction::Out)
        diag(r, "DELAYED_INPUT", "in-port '" + p.name + "' cannot be delayed",
             p.span);
      if (!c.is_atomic())
        diag(r, "DELAYED_IN_COMPOSITE",
             "delayed port '" + p.name + "' on composite '" + c.name + "'",
             p.span);
      if (!p.initial)
        diag(r, "DELAYED_WITHOUT_INIT",
             "delayed port '" + p.name + "' lacks an initial value", p.span);
      else if (!value_valid(m, *p.initial, p.type))
        diag(r, "TYPE_MISMATCH",
             "initial value of '" + p.name + "' does not fit " +
                 p.type.to_string(),
             p.span);
    } else if (p.initial) {
      diag(r, "INIT_WITHOUT_DELAY",
           "port '" + p.name + "' has an initial value but is not delayed",
           p.span);
    }
  }

  if (c.is_atomic()) {
    const auto &a = c.automaton();
    std::map<std::string, TypeTag> var_types;
    for (const auto &v : a.vars) {
      check_type_tag(m, v.type, "variable " + v.name, v.span, r);
      declare(v.name, v.type, v.span);
      var_types[v.name] = v.type;
      if (!value_valid(m, v.initial, v.type))
        diag(r, "TYPE_MISMATCH",
             "initial value of variable '" + v.name + "' does not fit " +
                 v.type.to_string(),
             v.span);
    }
    std::set<std::string> ids;
    for (const auto &t : a.transitions) {
      if (!ids.insert(t.id).second)
        diag(r, "DUPLICATE_NAME",
             "transition id '" + t.id + "' used twice in '" + c.name + "'",
             t.span);
      auto guard_type = TypeTag::boolean();
      check_expr(t.guard, scope, params, &guard_type,
                 "guard of " + t.id, r);
      std::set<std::string> assigned, emitted;
      for (const auto &act : t.actions) {
        auto it = var_types.find(act.target);
        if (it == var_types.end()) {
          diag(r, "ASSIGN_TO_UNKNOWN",
               "transition " + t.id + " assigns unknown variable '" +
                   act.target + "'",
               t.span);
          continue;
        }
        if (!assigned.insert(act.target).second)
          diag(r, "DUPLICATE_ASSIGNMENT",
               "transition " + t.id + " assigns '" + act.target + "' twice",
               t.span);
        check_expr(act.value, scope, params, &it->second,
                   "assignment to " + act.target, r);
      }
      for (const auto &em : t.emissions) {
        const Port *p = c.find_port(em.port);
        if (!p || p->direction != Direction::Out) {
          diag(r, "EMIT_TO_NON_OUTPUT",
               "transition " + t.id + " emits on '" + em.port +
                   "', which is not an out-port",
               t.span);
          continue;
        }
        if (!emitted.insert(em.port).second)
          diag(r, "DUPLICATE_EMISSION",
               "transition " + t.id + " emits on '" + em.port + "' twice",
               t.span);
        check_expr(em.value, scope, params, &p->type, "emission on " + em.port,
                   r);
      }
    }
  } else {
    std::set<std::string> inst_names;
    for (const auto &sub : c.composite().subcomponents) {
      if (!inst_names.insert(sub.name).second)
        diag(r, "DUPLICATE_NAME",
             "subcomponent '" + sub.name + "' declared twice in '" + c.name +
                 "'",
             sub.span);
      const Component *sc = m.find_component(sub.component);
      if (!sc) {
        diag(r, "UNKNOWN_COMPONENT",
             "unknown component '" + sub.component + "'", sub.span);
        continue;
      }
      if (sc->params.size() != sub.args.size()) {
        diag(r, "ARITY_MISMATCH",
             "'" + sub.name + "' passes " + std::to_string(sub.args.size()) +
                 " arguments to '" + sc->name + "', which takes " +
                 std::to_string(sc->params.size()),
             sub.span);
        continue;
      }
      std::map<std::string, TypeTag> param_scope;
      for (const auto &p : c.params)
        param_scope[p.name] = p.type;
      for (std::size_t i = 0; i < sub.args.size(); ++i) {
        check_expr(sub.args[i], param_scope, params, &sc->params[i].type,
                   "argument " + std::to_string(i + 1) + " of " + sub.name,
                   r);
      }
    }
  }
}

} // namespace

ValidationReport validate_model(const Model &m) {
  ValidationReport r;
  std::set<std::string> seen;
  for (const auto &e : m.enums) {
    if (!seen.insert(e.name).second)
      diag(r, "DUPLICATE_NAME", "enum '" + e.name + "' declared twice",
           e.span);
    if (e.variants.empty())
      diag(r, "EMPTY_ENUM", "enum '" + e.name + "' has no variants", e.span);
    std::set<std::string> vs;
    for (const auto &v : e.variants)
      if (!vs.insert(v).second)
        diag(r, "DUPLICATE_NAME",
             "variant '" + v + "' repeated in enum '" + e.name + "'", e.span);
  }
  int roots = 0;
  for (const auto &c : m.components) {
    if (!seen.insert(c.name).second)
      diag(r, "DUPLICATE_NAME", "component '" + c.name + "' declared twice",
           c.span);
    if (c.is_root)
      ++roots;
    validate_component(m, c, r);
  }
  if (roots > 1)
    diag(r, "MULTIPLE_ROOTS", "more than one component is marked root");
  if (m.root.empty() || !m.find_component(m.root)) {
    diag(r, "NO_ROOT", "model has no root component");
    return r;
  }
  if (!r.empty())
    return r; // wiring checks assume well-formed components
  expand(m, r);
  return r;
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool exprs_equal(const std::vector<Expr> &a, const std::vector<Expr> &b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(a[i], b[i]))
      return false;
  return true;
}

bool components_equal(const Component &a, const Component &b) {
  if (a.name != b.name || a.is_root != b.is_root ||
      a.params.size() != b.params.size() || a.ports.size() != b.ports.size() ||
      a.is_atomic() != b.is_atomic())
    return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name ||
        !(a.params[i].type == b.params[i].type))
      return false;
  for (std::size_t i = 0; i < a.ports.size(); ++i) {
    const auto &p = a.ports[i];
    const auto &q = b.ports[i];
    if (p.name != q.name || p.direction != q.direction ||
        !(p.type == q.type) || p.delayed != q.delayed ||
        p.initial != q.initial)
      return false;
  }
  if (a.is_atomic()) {
    const auto &x = a.automaton();
    const auto &y = b.automaton();
    if (x.initial != y.initial || x.vars.size() != y.vars.size() ||
        x.transitions.size() != y.transitions.size())
      return false;
    for (std::size_t i = 0; i < x.vars.size(); ++i)
      if (x.vars[i].name != y.vars[i].name ||
          !(x.vars[i].type == y.vars[i].type) ||
          x.vars[i].initial != y.vars[i].initial)
        return false;
    for (std::size_t i = 0; i < x.transitions.size(); ++i) {
      const auto &s = x.transitions[i];
      const auto &t = y.transitions[i];
      if (s.id != t.id || s.source != t.source || s.target != t.target ||
          !structurally_equal(s.guard, t.guard) ||
          s.actions.size() != t.actions.size() ||
          s.emissions.size() != t.emissions.size())
        return false;
      for (std::size_t j = 0; j < s.actions.size(); ++j)
        if (s.actions[j].target != t.actions[j].target ||
            !structurally_equal(s.actions[j].value, t.actions[j].value))
          return false;
      for (std::size_t j = 0; j < s.emissions.size(); ++j)
        if (s.emissions[j].port != t.emissions[j].port ||
            !structurally_equal(s.emissions[j].value, t.emissions[j].value))
          return false;
    }
    return true;
  }
  const auto &x = a.composite();
  const auto &y = b.composite();
  if (x.subcomponents.size() != y.subcomponents.size() ||
      x.connectors.size() != y.connectors.size())
    return false;
  for (std::size_t i = 0; i < x.subcomponents.size(); ++i) {
    const auto &s = x.subcomponents[i];
    const auto &t = y.subcomponents[i];
    if (s.name != t.name || s.component != t.component ||
        !exprs_equal(s.args, t.args))
      return false;
  }
  for (std::size_t i = 0; i < x.connectors.size(); ++i)
    if (!(x.connectors[i].from == y.connectors[i].from) ||
        !(x.connectors[i].to == y.connectors[i].to))
      return false;
  return true;
}

} // namespace

bool models_equal(const Model &a, const Model &b) {
  if (a.root != b.root || a.enums.size() != b.enums.size() ||
      a.components.size() != b.components.size())
    return false;
  for (std::size_t i = 0; i < a.enums.size(); ++i)
    if (a.enums[i].name != b.enums[i].name ||
        a.enums[i].variants != b.enums[i].variants)
      return false;
  for (std::size_t i = 0; i < a.components.size(); ++i)
    if (!components_equal(a.components[i], b.components[i]))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Flattening

const Component &FlatInstance::root() const {
  return *model->find_component(model->root);
}

std::vector<const Port *> FlatInstance::root_inputs() const {
  std::vector<const Port *> out;
  for (const auto &p : root().ports)
    if (p.direction == Direction::In)
      out.push_back(&p);
  return out;
}

std::vector<const Port *> FlatInstance::root_outputs() const {
  std::vector<const Port *> out;
  for (const auto &p : root().ports)
    if (p.direction == Direction::Out)
      out.push_back(&p);
  return out;
}

std::size_t FlatInstance::transition_count() const {
  std::size_t n = 0;
  for (const auto &a : atomics)
    n += a.component->automaton().transitions.size();
  return n;
}

std::size_t FlatInstance::state_count() const {
  std::size_t n = 0;
  for (const auto &a : atomics)
    n += a.component->automaton().states().size();
  return n;
}

namespace {

Value coerce(const Value &v, const TypeTag &t) {
  if (v.is_int() && t.kind == TypeKind::Rational)
    return Value::of_rat(Rational(v.as_int()));
  return v;
}

} // namespace

FlatInstance flatten(const Model &input, const std::vector<Value> &root_args) {
  auto model = std::make_shared<const Model>(input);
  const Model &m = *model;
  ValidationReport report = validate_model(m);
  if (!report.empty())
    throw Error("INVALID_MODEL", report.front().code + ": " +
                                     report.front().message);
  const Component *root = m.find_component(m.root);
  if (root->params.size() != root_args.size())
    throw Error("ARITY_MISMATCH",
                "root '" + root->name + "' takes " +
                    std::to_string(root->params.size()) + " arguments, got " +
                    std::to_string(root_args.size()));
  std::map<std::string, Value> root_params;
  for (std::size_t i = 0; i < root_args.size(); ++i) {
    const auto &p = root->params[i];
    if (root_args[i].is_null() || !value_valid(m, root_args[i], p.type))
      throw Error("TYPE_MISMATCH", "argument for '" + p.name +
                                       "' does not fit " + p.type.to_string());
    root_params[p.name] = coerce(root_args[i], p.type);
  }

  Expansion ex = expand(m, report);
  if (!ex.ok)
    throw Error("INVALID_MODEL", "model does not expand");

  // Bind parameters top-down.
  std::vector<std::map<std::string, Value>> bound(ex.instances.size());
  bound[0] = root_params;
  for (std::size_t i = 1; i < ex.instances.size(); ++i) {
    const auto &inst = ex.instances[i];
    const auto &parent_env = bound[inst.parent];
    for (std::size_t k = 0; k < inst.decl->args.size(); ++k) {
      const auto &p = inst.component->params[k];
      Value v = eval_concrete(inst.decl->args[k], parent_env);
      bound[i][p.name] = coerce(v, p.type);
    }
  }

  FlatInstance flat;
  flat.model = model;
  std::function<InstanceNode(int)> build = [&](int id) {
    InstanceNode node;
    node.path = ex.instances[id].path;
    node.component = ex.instances[id].component->name;
    node.params = bound[id];
    for (std::size_t j = 0; j < ex.instances.size(); ++j)
      if (ex.instances[j].parent == id)
        node.children.push_back(build(int(j)));
    return node;
  };
  flat.tree = build(0);
  for (std::size_t a = 0; a < ex.atomic_ids.size(); ++a) {
    int id = ex.atomic_ids[a];
    AtomicInstance ai;
    ai.path = ex.instances[id].path;
    ai.component = ex.instances[id].component;
    ai.params = bound[id];
    ai.inputs = ex.atomic_inputs[int(a)];
    flat.atomics.push_back(std::move(ai));
  }
  flat.order = ex.order;
  flat.outputs = ex.root_outputs;
  return flat;
}

bool instance_trees_equal(const InstanceNode &a, const InstanceNode &b) {
  if (a.path != b.path || a.component != b.component ||
      a.params != b.params || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!instance_trees_equal(a.children[i], b.children[i]))
      return false;
  return true;
}

} // namespace ccl
