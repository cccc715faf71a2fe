#include "ccl/executor.hpp"

#include "ccl/error.hpp"

namespace ccl {

int Oracle::next(int count) {
  int c = 0;
  if (cursor < choices.size()) {
    c = choices[cursor++];
  } else if (!extend_with_zero) {
    throw Error("ORACLE_EXHAUSTED",
                "no oracle choice left for a decision among " +
                    std::to_string(count) + " transitions");
  }
  if (c < 0 || c >= count)
    throw Error("ORACLE_OUT_OF_RANGE", "oracle choice " + std::to_string(c) +
                                           " but only " +
                                           std::to_string(count) + " enabled");
  used.push_back(c);
  return c;
}

namespace {

AnnotatedValue coerce(AnnotatedValue v, const TypeTag &t) {
  if (t.kind == TypeKind::Rational && v.conc.is_int()) {
    v.conc = Value::of_rat(v.conc.as_rational());
    if (v.sym.is_const())
      v.sym = make_const(v.conc);
  }
  return v;
}

AnnotatedValue null_value() { return AnnotatedValue::constant(Value()); }

} // namespace

std::string input_var_name(const std::string &port, int tick) {
  return "in_root_" + port + "_t" + std::to_string(tick);
}

ExecutionState initial_state(const FlatInstance &flat) {
  ExecutionState s;
  for (std::size_t i = 0; i < flat.atomics.size(); ++i) {
    const auto &inst = flat.atomics[i];
    const Automaton &a = inst.component->automaton();
    ExecutionState::Atomic st;
    st.state = a.initial;
    for (const auto &v : a.vars)
      st.vars[v.name] = coerce(AnnotatedValue::constant(v.initial), v.type);
    s.atomics.push_back(std::move(st));
    for (const auto &p : inst.component->ports)
      if (p.delayed)
        s.delayed[PortRef{int(i), p.name}] =
            coerce(AnnotatedValue::constant(*p.initial), p.type);
  }
  return s;
}

TraceTick step(const FlatInstance &flat, ExecutionState &state,
               const std::map<std::string, AnnotatedValue> &inputs,
               Oracle &oracle, const BranchSink &sink) {
  TraceTick tick;
  tick.index = state.tick;
  PortValues current;
  for (const Port *p : flat.root_inputs()) {
    auto it = inputs.find(p->name);
    AnnotatedValue v = it == inputs.end() ? null_value() : it->second;
    v = coerce(v, p->type);
    current[PortRef{-1, p->name}] = v;
    tick.inputs[p->name] = v;
  }
  // (1) delayed ports emit their stored value.
  for (const auto &[ref, v] : state.delayed)
    current[ref] = v;
  PortValues next_store;

  for (int idx : flat.order) {
    const AtomicInstance &inst = flat.atomics[std::size_t(idx)];
    const Component &comp = *inst.component;
    const Automaton &aut = comp.automaton();
    auto &st = state.atomics[std::size_t(idx)];

    Env env;
    Binding bind;
    for (const auto &[name, v] : inst.params) {
      env[name] = v;
      bind[name] = make_const(v);
    }
    for (const auto &[name, v] : st.vars) {
      env[name] = v.conc;
      bind[name] = v.sym;
    }
    for (const auto &[port, src] : inst.inputs) {
      auto it = current.find(src);
      AnnotatedValue v = it == current.end() ? null_value() : it->second;
      const Port *p = comp.find_port(port);
      v = coerce(v, p->type);
      env[port] = v.conc;
      bind[port] = v.sym;
    }

    // (2) evaluate every guard of the current state, in declaration order.
    std::vector<const Transition *> enabled;
    for (const auto &t : aut.transitions) {
      if (t.source != st.state)
        continue;
      Value c = eval_concrete(t.guard, env);
      bool truth = c.is_bool() && c.as_bool();
      BranchRecord rec;
      rec.instance = inst.path;
      rec.transition = t.id;
      rec.tick = state.tick;
      rec.cond = simplify(substitute(t.guard, bind));
      rec.taken = truth;
      tick.branches.push_back(rec);
      if (sink)
        sink(rec);
      if (truth)
        enabled.push_back(&t);
    }

    std::map<std::string, AnnotatedValue> emitted;
    if (enabled.empty()) {
      // (3) ignore: state and vars unchanged; every out-port carries Null.
    } else {
      std::size_t pick = 0;
      if (enabled.size() > 1) {
        Decision d;
        d.instance = inst.path;
        d.tick = state.tick;
        d.count = int(enabled.size());
        d.choice = oracle.next(d.count);
        d.position = tick.branches.size(); // relative; made absolute in run()
        tick.decisions.push_back(d);
        pick = std::size_t(d.choice);
      }
      const Transition &t = *enabled[pick];
      for (const auto &act : t.actions) {
        AnnotatedValue v{simplify(substitute(act.value, bind)),
                         eval_concrete(act.value, env)};
        const VarDecl *decl = nullptr;
        for (const auto &vd : aut.vars)
          if (vd.name == act.target)
            decl = &vd;
        v = coerce(v, decl->type);
        st.vars[act.target] = v;
        env[act.target] = v.conc;
        bind[act.target] = v.sym;
      }
      for (const auto &em : t.emissions) {
        AnnotatedValue v{simplify(substitute(em.value, bind)),
                         eval_concrete(em.value, env)};
        emitted[em.port] = coerce(v, comp.find_port(em.port)->type);
      }
      st.state = t.target;
      tick.taken.push_back({inst.path, t.id, t.source, t.target});
    }
    for (const auto &p : comp.ports) {
      if (p.direction != Direction::Out)
        continue;
      auto it = emitted.find(p.name);
      AnnotatedValue v = it == emitted.end() ? null_value() : it->second;
      PortRef ref{idx, p.name};
      if (p.delayed)
        next_store[ref] = v;
      else
        current[ref] = v;
    }
  }

  for (const auto &[name, ref] : flat.outputs) {
    auto it = current.find(ref);
    tick.outputs[name] = it == current.end() ? null_value() : it->second;
  }
  // (4) delayed stores take this tick's values.
  for (auto &[ref, v] : next_store)
    state.delayed[ref] = v;
  for (std::size_t i = 0; i < flat.atomics.size(); ++i)
    tick.state[flat.atomics[i].path] = {state.atomics[i].state,
                                        state.atomics[i].vars};
  ++state.tick;
  return tick;
}

Trace run(const FlatInstance &flat, const InputSeq &inputs, Oracle oracle) {
  Trace trace;
  ExecutionState state = initial_state(flat);
  auto root_inputs = flat.root_inputs();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::map<std::string, AnnotatedValue> in;
    for (const Port *p : root_inputs) {
      auto it = inputs[k].find(p->name);
      Value c = it == inputs[k].end() ? Value() : it->second;
      if (c.is_null())
        in[p->name] = null_value();
      else
        in[p->name] = {make_sym(input_var_name(p->name, int(k)), p->type), c};
    }
    TraceTick t = step(flat, state, in, oracle);
    std::size_t base = trace.path_condition.records.size();
    for (auto d : t.decisions) {
      d.position += base;
      trace.decisions.push_back(d);
    }
    for (const auto &b : t.branches)
      trace.path_condition.records.push_back(b);
    trace.ticks.push_back(std::move(t));
  }
  trace.oracle_used = Oracle::strict(oracle.used);
  return trace;
}

Env input_env(const InputSeq &inputs) {
  Env env;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    for (const auto &[port, v] : inputs[k])
      if (!v.is_null())
        env[input_var_name(port, int(k))] = v;
  return env;
}

InterestingInput make_interesting(const InputSeq &inputs, Trace trace) {
  InterestingInput w;
  w.inputs = inputs;
  for (const auto &t : trace.ticks) {
    std::map<std::string, Value> conc;
    std::map<std::string, Expr> sym;
    for (const auto &[port, v] : t.outputs) {
      conc[port] = v.conc;
      sym[port] = simplify(v.sym);
    }
    w.outputs_concrete.push_back(std::move(conc));
    w.outputs_symbolic.push_back(std::move(sym));
  }
  w.path_condition = trace.path_condition;
  w.decisions = trace.decisions;
  w.oracle = trace.oracle_used;
  w.trace = std::move(trace);
  return w;
}

bool replay_check(const FlatInstance &flat, const InterestingInput &witness) {
  try {
    Trace t = run(flat, witness.inputs, Oracle::strict(witness.oracle.choices));
    if (t.oracle_used.choices.size() != witness.oracle.choices.size())
      return false;
    const auto &a = t.path_condition.records;
    const auto &b = witness.path_condition.records;
    if (a.size() != b.size())
      return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].taken != b[i].taken || a[i].branch_id() != b[i].branch_id())
        return false;
    if (t.ticks.size() != witness.outputs_concrete.size())
      return false;
    for (std::size_t k = 0; k < t.ticks.size(); ++k) {
      const auto &want = witness.outputs_concrete[k];
      if (t.ticks[k].outputs.size() != want.size())
        return false;
      for (const auto &[port, v] : t.ticks[k].outputs) {
        auto it = want.find(port);
        if (it == want.end() || !(it->second == v.conc))
          return false;
      }
    }
    return true;
  } catch (const Error &) {
    return false;
  }
}

} // namespace ccl
