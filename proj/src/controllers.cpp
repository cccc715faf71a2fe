#include "ccl/controllers.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

#include "ccl/error.hpp"

namespace ccl {

std::string PathEvent::key() const {
  if (decision)
    return "D" + id + "=" + std::to_string(choice) + "/" +
           std::to_string(count) + ";";
  return id + (taken ? "+;" : "-;");
}

std::vector<PathEvent> path_events(const Trace &t) {
  std::vector<PathEvent> out;
  const auto &recs = t.path_condition.records;
  std::size_t d = 0;
  for (std::size_t i = 0; i <= recs.size(); ++i) {
    while (d < t.decisions.size() && t.decisions[d].position == i) {
      const Decision &dec = t.decisions[d++];
      PathEvent e;
      e.decision = true;
      e.id = (dec.instance.empty() ? std::string("root") : dec.instance) +
             "@" + std::to_string(dec.tick);
      e.choice = dec.choice;
      e.count = dec.count;
      out.push_back(std::move(e));
    }
    if (i < recs.size()) {
      PathEvent e;
      e.id = recs[i].branch_id();
      e.taken = recs[i].taken;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::string prefix_key(const std::vector<PathEvent> &events, std::size_t n) {
  std::string k;
  for (std::size_t i = 0; i < n && i < events.size(); ++i)
    k += events[i].key();
  return k;
}

std::vector<std::string> sibling_keys(const std::vector<PathEvent> &events,
                                      std::size_t i) {
  std::string base = prefix_key(events, i);
  std::vector<std::string> out;
  PathEvent e = events[i];
  if (e.decision) {
    for (int c = 0; c < e.count; ++c) {
      if (c == events[i].choice)
        continue;
      e.choice = c;
      out.push_back(base + e.key());
    }
  } else {
    e.taken = !e.taken;
    out.push_back(base + e.key());
  }
  return out;
}

std::optional<std::size_t>
next_negation_target(const std::vector<PathEvent> &events,
                     const std::set<std::string> &done) {
  for (std::size_t i = events.size(); i-- > 0;)
    for (const auto &k : sibling_keys(events, i))
      if (!done.count(k))
        return i;
  return std::nullopt;
}

EnumTable enum_table(const Model &m) {
  EnumTable t;
  for (const auto &e : m.enums)
    t[e.name] = e.variants;
  return t;
}

InputSeq seed_inputs(const FlatInstance &flat, const ControllerConfig &cfg) {
  if (cfg.seed_inputs)
    return *cfg.seed_inputs;
  EnumTable enums = enum_table(*flat.model);
  TickInputs tick;
  for (const Port *p : flat.root_inputs()) {
    auto d = cfg.domain.find(p->name);
    tick[p->name] = d != cfg.domain.end() && !d->second.empty()
                        ? d->second.front()
                        : default_value(p->type, enums);
  }
  return InputSeq(std::size_t(cfg.input_length), tick);
}

std::vector<Expr> domain_constraints(const FlatInstance &flat,
                                     const FiniteDomain &domain, int length) {
  std::vector<Expr> out;
  if (domain.empty())
    return out;
  for (int k = 0; k < length; ++k) {
    for (const Port *p : flat.root_inputs()) {
      auto it = domain.find(p->name);
      if (it == domain.end() || it->second.empty())
        throw Error("BAD_DOMAIN", "no domain values for input port '" +
                                      p->name + "'");
      std::vector<Expr> alts;
      Expr v = make_sym(input_var_name(p->name, k), p->type);
      for (const auto &val : it->second)
        alts.push_back(make_cmp(CmpOp::Eq, v, make_const(val)));
      out.push_back(make_or(std::move(alts)));
    }
  }
  return out;
}

namespace {

std::string inst_name(const std::string &path) {
  return path.empty() ? "root" : path;
}

/// Visit counters for the termination controllers. Counts are global over
/// the search and committed only for accepted runs.
class VisitBudget {
public:
  explicit VisitBudget(const ControllerConfig &cfg) : cfg_(cfg) {}

  /// True when the run stays within budget; commits its visits then.
  bool accept(const Trace &t) {
    std::map<std::string, int> add;
    for (const auto &tick : t.ticks) {
      switch (cfg_.criterion) {
      case TermCriterion::TransitionVisits:
        for (const auto &tt : tick.taken)
          ++add[inst_name(tt.instance) + "/" + tt.transition];
        break;
      case TermCriterion::StateVisits:
        for (const auto &[inst, snap] : tick.state) {
          std::string k = inst_name(inst) + ":" + snap.state;
          if (cfg_.with_vars)
            for (const auto &[n, v] : snap.vars)
              k += "," + n + "=" + canonical_text(v.sym);
          ++add[k];
        }
        break;
      case TermCriterion::BoringInteresting:
        for (const auto &tt : tick.taken)
          ++add[inst_name(tt.instance) + "/" + tt.transition];
        for (const auto &[inst, snap] : tick.state)
          ++add[inst_name(inst) + ":" + snap.state];
        break;
      }
    }
    for (const auto &[k, n] : add)
      if (counts_[k] + n > limit(k))
        return false;
    for (const auto &[k, n] : add)
      counts_[k] += n;
    return true;
  }

private:
  int limit(const std::string &k) const {
    if (cfg_.criterion != TermCriterion::BoringInteresting)
      return cfg_.max_visits;
    return cfg_.interesting.count(k) ? cfg_.max_interesting : cfg_.max_boring;
  }

  const ControllerConfig &cfg_;
  std::map<std::string, int> counts_;
};

class Explorer {
public:
  Explorer(const FlatInstance &flat, const ControllerConfig &cfg)
      : flat_(flat), cfg_(cfg), budget_(cfg), rng_(cfg.seed) {
    solver_cfg_ = cfg.solver;
    for (const auto &[name, vars] : enum_table(*flat.model))
      solver_cfg_.enums.emplace(name, vars);
    for (int k = 0; k < cfg.input_length; ++k)
      for (const Port *p : flat.root_inputs())
        var_slot_[input_var_name(p->name, k)] = {std::size_t(k), p->name};
    domain_ = domain_constraints(flat, cfg.domain, cfg.input_length);
    if (!cfg.gc)
      session_.emplace(solver_cfg_);
  }

  ExplorationResult run() {
    auto start = std::chrono::steady_clock::now();
    if (cfg_.input_length < 1)
      throw Error("BAD_CONFIG", "input length must be at least 1");
    switch (cfg_.kind) {
    case ControllerKind::RunOnce:
      execute(seed_inputs(flat_, cfg_), {});
      break;
    case ControllerKind::RandomInput:
      for (int i = 0; i < cfg_.iterations; ++i)
        execute(random_inputs(), {});
      break;
    case ControllerKind::PathCoverage:
    case ControllerKind::Termination:
      search();
      break;
    }
    res_.stats.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return std::move(res_);
  }

private:
  struct Frame {
    InputSeq inputs;
    Trace trace;
    std::vector<PathEvent> events;
  };

  /// Runs and records one input; returns the frame when accepted.
  std::optional<Frame> execute(const InputSeq &in, std::vector<int> choices) {
    if (cfg_.max_runs && res_.stats.runs >= cfg_.max_runs)
      throw Error("BUDGET_EXCEEDED", "run budget of " +
                                         std::to_string(cfg_.max_runs) +
                                         " exhausted");
    ++res_.stats.runs;
    Trace t = ccl::run(flat_, in, Oracle::prefix(std::move(choices)));
    Frame f{in, t, path_events(t)};
    for (std::size_t n = 1; n <= f.events.size(); ++n)
      done_.insert(prefix_key(f.events, n));
    if (cfg_.kind == ControllerKind::Termination && !budget_.accept(t)) {
      ++res_.stats.paths_aborted;
      return std::nullopt;
    }
    ++res_.stats.paths_explored;
    res_.interesting.push_back(make_interesting(in, t));
    if (!cfg_.domain.empty() && cfg_.expand_domain)
      expand(f);
    return f;
  }

  void search() {
    std::vector<Frame> stack;
    if (auto f = execute(seed_inputs(flat_, cfg_), {}))
      stack.push_back(std::move(*f));
    while (!stack.empty()) {
      Frame &top = stack.back();
      auto target = pick_target(top.events);
      if (!target) {
        stack.pop_back();
        continue;
      }
      std::size_t i = *target;
      const PathEvent &ev = top.events[i];
      std::vector<int> choices;
      std::size_t rec = 0;
      for (std::size_t j = 0; j < i; ++j) {
        if (top.events[j].decision)
          choices.push_back(top.events[j].choice);
        else
          ++rec;
      }
      std::optional<Frame> next;
      if (ev.decision) {
        int alt = pick_sibling_choice(top.events, i);
        choices.push_back(alt);
        done_.insert(prefix_key(top.events, i) + sibling_event(ev, alt).key());
        InputSeq in = top.inputs;
        next = execute(in, choices);
      } else {
        done_.insert(sibling_keys(top.events, i).front());
        auto in = solve_flip(top, rec);
        if (!in)
          continue;
        next = execute(*in, choices);
        if (next && !follows(next->events, top.events, i))
          ++res_.stats.paths_diverged;
      }
      if (next)
        stack.push_back(std::move(*next));
    }
  }

  static PathEvent sibling_event(PathEvent e, int choice) {
    e.choice = choice;
    return e;
  }

  static bool follows(const std::vector<PathEvent> &got,
                      const std::vector<PathEvent> &base, std::size_t i) {
    if (got.size() <= i)
      return false;
    for (std::size_t j = 0; j < i; ++j)
      if (got[j].key() != base[j].key())
        return false;
    return got[i].id == base[i].id && got[i].taken != base[i].taken;
  }

  std::optional<std::size_t> pick_target(const std::vector<PathEvent> &ev) {
    if (!cfg_.random_negation)
      return next_negation_target(ev, done_);
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < ev.size(); ++i)
      for (const auto &k : sibling_keys(ev, i))
        if (!done_.count(k)) {
          open.push_back(i);
          break;
        }
    if (open.empty())
      return std::nullopt;
    return open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng_)];
  }

  int pick_sibling_choice(const std::vector<PathEvent> &ev, std::size_t i) {
    std::string base = prefix_key(ev, i);
    for (int c = 0; c < ev[i].count; ++c)
      if (c != ev[i].choice && !done_.count(base + sibling_event(ev[i], c).key()))
        return c;
    return ev[i].choice; // unreachable: target had an open sibling
  }

  SolveResult check(const std::vector<Expr> &assertions) {
    ++res_.stats.solver_calls;
    if (cfg_.gc || !session_) {
      SolverSession s(solver_cfg_);
      for (const auto &a : assertions)
        s.assert_expr(a);
      return s.check_sat();
    }
    session_->push();
    for (const auto &a : assertions)
      session_->assert_expr(a);
    SolveResult r = session_->check_sat();
    session_->pop();
    return r;
  }

  /// Solves prefix records [0, rec) plus the negation of record `rec`.
  std::optional<InputSeq> solve_flip(const Frame &f, std::size_t rec) {
    const auto &recs = f.trace.path_condition.records;
    Expr flipped = negate(recs[rec].signed_cond());
    if (flipped.is_const()) {
      ++res_.stats.paths_unsat;
      return std::nullopt;
    }
    std::vector<Expr> q;
    for (std::size_t j = 0; j < rec; ++j)
      q.push_back(recs[j].signed_cond());
    q.push_back(flipped);
    q.insert(q.end(), domain_.begin(), domain_.end());
    SolveResult r = check(q);
    if (r.unsat()) {
      ++res_.stats.paths_unsat;
      return std::nullopt;
    }
    if (r.unknown()) {
      if (r.reason == UnknownReason::Timeout)
        ++res_.stats.paths_skipped_timeout;
      else
        ++res_.stats.paths_skipped_unknown;
      return std::nullopt;
    }
    InputSeq in = f.inputs;
    for (const auto &[name, v] : r.model) {
      auto it = var_slot_.find(name);
      if (it != var_slot_.end())
        in[it->second.first][it->second.second] = v;
    }
    return in;
  }

  /// Runs every other domain input that follows the frame's path. The
  /// candidates are finite, so each tick's records are checked concretely.
  void expand(const Frame &f) {
    std::vector<std::vector<Expr>> by_tick(std::size_t(cfg_.input_length));
    for (const auto &r : f.trace.path_condition.records)
      by_tick.at(std::size_t(r.tick)).push_back(r.signed_cond());
    if (tick_domain_.empty()) {
      tick_domain_.push_back({});
      for (const Port *p : flat_.root_inputs()) {
        std::vector<TickInputs> next;
        for (const auto &partial : tick_domain_)
          for (const auto &v : cfg_.domain.at(p->name)) {
            TickInputs t = partial;
            t[p->name] = v;
            next.push_back(std::move(t));
          }
        tick_domain_ = std::move(next);
      }
    }
    std::vector<int> choices = f.trace.oracle_used.choices;
    InputSeq cur;
    Env env;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (k == by_tick.size()) {
        if (cur == f.inputs)
          return;
        ++res_.stats.runs;
        Trace t = ccl::run(flat_, cur, Oracle::strict(choices));
        res_.interesting.push_back(make_interesting(cur, t));
        return;
      }
      for (const auto &tick : tick_domain_) {
        for (const auto &[port, v] : tick)
          env[input_var_name(port, int(k))] = v;
        bool ok = std::all_of(by_tick[k].begin(), by_tick[k].end(),
                              [&](const Expr &c) {
                                Value v = eval_concrete(c, env);
                                return v.is_bool() && v.as_bool();
                              });
        if (!ok)
          continue;
        cur.push_back(tick);
        go(k + 1);
        cur.pop_back();
      }
    };
    go(0);
  }

  InputSeq random_inputs() {
    if (strings_.empty()) {
      strings_ = {"", "a"};
      for (const auto &inst : flat_.atomics)
        for (const auto &t : inst.component->automaton().transitions)
          for_each_node(t.guard, [&](const Expr &e) {
            if (e.is_const() && e->constant.is_str())
              strings_.push_back(e->constant.as_str());
            if (e.is_const() && e->constant.is_int())
              ints_.push_back(e->constant.as_int());
          });
    }
    EnumTable enums = enum_table(*flat_.model);
    InputSeq in;
    for (int k = 0; k < cfg_.input_length; ++k) {
      TickInputs tick;
      for (const Port *p : flat_.root_inputs()) {
        auto d = cfg_.domain.find(p->name);
        if (d != cfg_.domain.end() && !d->second.empty()) {
          tick[p->name] = d->second[rng_() % d->second.size()];
          continue;
        }
        tick[p->name] = random_value(p->type, enums);
      }
      in.push_back(std::move(tick));
    }
    return in;
  }

  Value random_value(const TypeTag &t, const EnumTable &enums) {
    const std::int64_t box = 1 << 20;
    auto uni = [&](std::int64_t lo, std::int64_t hi) {
      return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    };
    switch (t.kind) {
    case TypeKind::Int:
      if (!ints_.empty() && rng_() % 2)
        return Value::of_int(ints_[rng_() % ints_.size()] + uni(-1, 1));
      return Value::of_int(uni(-box, box));
    case TypeKind::Rational:
      return Value::of_rat(Rational(uni(-box, box), uni(1, 4)));
    case TypeKind::Bool:
      return Value::of_bool(rng_() % 2);
    case TypeKind::Str:
      return Value::of_str(strings_[rng_() % strings_.size()]);
    case TypeKind::Enum: {
      const auto &vs = enums.at(t.enum_name);
      return Value::of_enum(t.enum_name, vs[rng_() % vs.size()]);
    }
    }
    return Value();
  }

  const FlatInstance &flat_;
  const ControllerConfig &cfg_;
  SolverConfig solver_cfg_;
  std::optional<SolverSession> session_;
  VisitBudget budget_;
  std::mt19937_64 rng_;
  std::map<std::string, std::pair<std::size_t, std::string>> var_slot_;
  std::vector<Expr> domain_;
  std::set<std::string> done_;
  ExplorationResult res_;
  std::vector<std::string> strings_;
  std::vector<TickInputs> tick_domain_;
  std::vector<std::int64_t> ints_;
};

} // namespace

ExplorationResult explore(const FlatInstance &flat, const ControllerConfig &cfg) {
  return Explorer(flat, cfg).run();
}

} // namespace ccl
