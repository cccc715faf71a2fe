// Fourier-Motzkin elimination over exact rationals, with integer tightening,
// model construction by back-substitution and branch-and-bound on integers.

#include "solver_internal.hpp"

#include <algorithm>
#include <optional>

namespace ccl::detail {

namespace {

using boost::multiprecision::cpp_int;

const Q kBox = Q(1 << 20);

Q q_floor(const Q &v) {
  cpp_int n = numerator(v), d = denominator(v);
  cpp_int q = n / d;
  if (n < 0 && q * d != n)
    q -= 1;
  return Q(q);
}

Q q_ceil(const Q &v) { return -q_floor(-v); }

bool is_integral(const Q &v) { return denominator(v) == 1; }

cpp_int lcm_int(const cpp_int &a, const cpp_int &b) {
  return a / boost::multiprecision::gcd(a, b) * b;
}

bool all_int(const LinCon &c, const std::set<std::string> &ints) {
  for (const auto &[x, _] : c.a)
    if (!ints.count(x))
      return false;
  return true;
}

/// Scales an all-integer constraint to integer coefficients and rounds the
/// bound. Returns false when an equality has no integer solution.
bool tighten(LinCon &c) {
  cpp_int l = denominator(c.k);
  for (const auto &[_, v] : c.a)
    l = lcm_int(l, denominator(v));
  cpp_int g = 0;
  for (auto &[_, v] : c.a) {
    v *= l;
    g = boost::multiprecision::gcd(g, numerator(v));
  }
  c.k *= l;
  if (g == 0)
    return true;
  for (auto &[_, v] : c.a)
    v /= g;
  Q k = c.k / g;
  switch (c.rel) {
  case Rel::Le:
    c.k = q_floor(k);
    break;
  case Rel::Lt:
    c.k = q_ceil(k) - 1;
    c.rel = Rel::Le;
    break;
  case Rel::Eq:
    if (!is_integral(k))
      return false;
    c.k = k;
    break;
  }
  return true;
}

/// Holds inequalities keyed by their direction so that parallel constraints
/// keep only the tightest bound.
class ConstraintSet {
public:
  using Key = std::vector<std::pair<std::string, Q>>;

  // Returns false on a trivially false constant constraint.
  bool add(LinCon c) {
    for (auto it = c.a.begin(); it != c.a.end();)
      it = it->second == 0 ? c.a.erase(it) : std::next(it);
    if (c.a.empty()) {
      return c.rel == Rel::Le ? Q(0) <= c.k : Q(0) < c.k;
    }
    Q scale = abs(c.a.begin()->second);
    Key key;
    for (const auto &[x, v] : c.a)
      key.emplace_back(x, v / scale);
    Q k = c.k / scale;
    bool strict = c.rel == Rel::Lt;
    auto [it, fresh] = map_.try_emplace(std::move(key), k, strict);
    if (!fresh) {
      auto &[k0, s0] = it->second;
      if (k < k0 || (k == k0 && strict && !s0)) {
        k0 = k;
        s0 = strict;
      }
    }
    return true;
  }

  std::size_t size() const { return map_.size(); }

  std::vector<LinCon> items() const {
    std::vector<LinCon> out;
    out.reserve(map_.size());
    for (const auto &[key, bound] : map_) {
      LinCon c;
      for (const auto &[x, v] : key)
        c.a.emplace(x, v);
      c.k = bound.first;
      c.rel = bound.second ? Rel::Lt : Rel::Le;
      out.push_back(std::move(c));
    }
    return out;
  }

private:
  std::map<Key, std::pair<Q, bool>> map_;
};

struct EqSub {
  std::string var;
  std::map<std::string, Q> a; // var = sum(a[y] * y) + k
  Q k;
};

struct Stage {
  std::string var;
  std::vector<LinCon> cons; // constraints mentioning var when eliminated
};

struct Interval {
  std::optional<Q> lo, hi;
  bool lo_strict = false, hi_strict = false;

  bool contains(const Q &v) const {
    if (lo && (lo_strict ? v <= *lo : v < *lo))
      return false;
    if (hi && (hi_strict ? v >= *hi : v > *hi))
      return false;
    return true;
  }
};

/// Picks a value in the interval, preferring 0, then the integer nearest 0,
/// then (for rationals) the midpoint.
Q pick(const Interval &iv) {
  if (iv.contains(Q(0)))
    return Q(0);
  if (iv.lo && *iv.lo >= 0) {
    Q c = q_ceil(*iv.lo);
    if (c == *iv.lo && iv.lo_strict)
      c += 1;
    if (iv.contains(c))
      return c;
  } else if (iv.hi) {
    Q c = q_floor(*iv.hi);
    if (c == *iv.hi && iv.hi_strict)
      c -= 1;
    if (iv.contains(c))
      return c;
  }
  if (iv.lo && iv.hi)
    return (*iv.lo + *iv.hi) / 2;
  if (iv.lo)
    return *iv.lo + 1;
  return *iv.hi - 1;
}

// Variables that lost all their constraints when a one-sided variable was
// eliminated are unassigned here; any value works for them, so use 0.
Q eval_rest(const LinCon &c, const std::string &skip,
            std::map<std::string, Q> &m) {
  Q s = 0;
  for (const auto &[x, v] : c.a)
    if (x != skip)
      s += v * m.try_emplace(x, 0).first->second;
  return s;
}

class Fm {
public:
  Fm(const std::set<std::string> &ints, bool relax, const SolverConfig &cfg,
     const Deadline &dl)
      : ints_(ints), relax_(relax), cfg_(cfg), dl_(dl) {}

  ArithResult run(std::vector<LinCon> cons) {
    ArithResult r;
    std::set<std::string> vars;
    for (const auto &c : cons)
      for (const auto &[x, v] : c.a)
        if (v != 0)
          vars.insert(x);

    if (!eliminate_equalities(cons)) {
      r.status = SolveStatus::Unsat;
      return r;
    }
    ConstraintSet set;
    for (auto &c : cons) {
      if (!relax_ && all_int(c, ints_) && !tighten(c)) {
        r.status = SolveStatus::Unsat;
        return r;
      }
      if (!set.add(std::move(c))) {
        r.status = SolveStatus::Unsat;
        return r;
      }
    }
    std::vector<LinCon> cur = set.items();
    while (true) {
      check_deadline();
      std::set<std::string> live;
      for (const auto &c : cur)
        for (const auto &[x, _] : c.a)
          live.insert(x);
      if (live.empty())
        break;
      std::string best;
      long best_cost = 0;
      for (const auto &x : live) {
        long pos = 0, neg = 0;
        for (const auto &c : cur) {
          auto it = c.a.find(x);
          if (it == c.a.end())
            continue;
          (it->second > 0 ? pos : neg) += 1;
        }
        long cost = pos * neg - pos - neg;
        if (best.empty() || cost < best_cost) {
          best = x;
          best_cost = cost;
        }
      }
      Stage st{best, {}};
      std::vector<LinCon> lower, upper;
      ConstraintSet next;
      for (auto &c : cur) {
        auto it = c.a.find(best);
        if (it == c.a.end()) {
          next.add(c);
          continue;
        }
        (it->second > 0 ? upper : lower).push_back(c);
        st.cons.push_back(c);
      }
      std::size_t combos = 0;
      for (const auto &lo : lower) {
        for (const auto &up : upper) {
          if (++combos % 256 == 0)
            check_deadline();
          Q cl = -lo.a.at(best), cu = up.a.at(best);
          LinCon c;
          for (const auto &[x, v] : lo.a)
            if (x != best)
              c.a[x] += v * cu;
          for (const auto &[x, v] : up.a)
            if (x != best)
              c.a[x] += v * cl;
          c.k = lo.k * cu + up.k * cl;
          c.rel = (lo.rel == Rel::Lt || up.rel == Rel::Lt) ? Rel::Lt : Rel::Le;
          for (auto it = c.a.begin(); it != c.a.end();)
            it = it->second == 0 ? c.a.erase(it) : std::next(it);
          if (!relax_ && !c.a.empty() && all_int(c, ints_))
            tighten(c);
          if (!next.add(std::move(c))) {
            r.status = SolveStatus::Unsat;
            return r;
          }
          if (next.size() > cfg_.max_constraints) {
            r.reason = UnknownReason::Unsupported;
            return r;
          }
        }
      }
      stages_.push_back(std::move(st));
      cur = next.items();
    }

    // Back-substitution.
    std::map<std::string, Q> m;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
      Interval iv;
      for (const auto &c : it->cons) {
        Q coef = c.a.at(it->var);
        Q bound = (c.k - eval_rest(c, it->var, m)) / coef;
        bool strict = c.rel == Rel::Lt;
        if (coef > 0) {
          if (!iv.hi || bound < *iv.hi || (bound == *iv.hi && strict)) {
            iv.hi = bound;
            iv.hi_strict = strict;
          }
        } else if (!iv.lo || bound > *iv.lo || (bound == *iv.lo && strict)) {
          iv.lo = bound;
          iv.lo_strict = strict;
        }
      }
      m[it->var] = pick(iv);
    }
    for (auto it = subs_.rbegin(); it != subs_.rend(); ++it) {
      Q v = it->k;
      for (const auto &[y, c] : it->a) {
        if (!m.count(y))
          m[y] = 0;
        v += c * m.at(y);
      }
      m[it->var] = v;
    }
    for (const auto &x : vars)
      if (!m.count(x))
        m[x] = 0;
    r.status = SolveStatus::Sat;
    r.model = std::move(m);
    return r;
  }

private:
  void check_deadline() const {
    if (dl_.expired())
      throw TimeoutSignal{};
  }

  bool is_int(const std::string &x) const { return !relax_ && ints_.count(x); }

  /// Substitutes equalities away where that keeps integrality; the rest are
  /// split into two inequalities. Returns false on a contradiction.
  bool eliminate_equalities(std::vector<LinCon> &cons) {
    while (true) {
      check_deadline();
      std::size_t idx = cons.size();
      std::string var;
      for (std::size_t i = 0; i < cons.size() && idx == cons.size(); ++i) {
        LinCon &c = cons[i];
        if (c.rel != Rel::Eq)
          continue;
        for (auto it = c.a.begin(); it != c.a.end();)
          it = it->second == 0 ? c.a.erase(it) : std::next(it);
        if (c.a.empty()) {
          if (c.k != 0)
            return false;
          c.rel = Rel::Le; // 0 <= 0, dropped later
          continue;
        }
        bool every_int = true;
        for (const auto &[x, _] : c.a)
          every_int = every_int && is_int(x);
        if (every_int) {
          if (!tighten(c))
            return false;
          for (const auto &[x, v] : c.a)
            if (abs(v) == 1) {
              idx = i;
              var = x;
              break;
            }
        } else {
          for (const auto &[x, _] : c.a)
            if (!is_int(x)) {
              idx = i;
              var = x;
              break;
            }
        }
      }
      if (idx == cons.size())
        break;
      LinCon eq = cons[idx];
      cons.erase(cons.begin() + long(idx));
      Q av = eq.a.at(var);
      EqSub sub{var, {}, eq.k / av};
      for (const auto &[y, v] : eq.a)
        if (y != var)
          sub.a[y] = -v / av;
      for (auto &c : cons) {
        auto it = c.a.find(var);
        if (it == c.a.end())
          continue;
        Q cv = it->second;
        c.a.erase(it);
        for (const auto &[y, v] : sub.a)
          c.a[y] += cv * v;
        c.k -= cv * sub.k;
      }
      subs_.push_back(std::move(sub));
    }
    std::vector<LinCon> out;
    for (auto &c : cons) {
      if (c.rel != Rel::Eq) {
        out.push_back(std::move(c));
        continue;
      }
      LinCon ge = c;
      for (auto &[_, v] : ge.a)
        v = -v;
      ge.k = -ge.k;
      ge.rel = Rel::Le;
      c.rel = Rel::Le;
      out.push_back(std::move(c));
      out.push_back(std::move(ge));
    }
    cons = std::move(out);
    return true;
  }

  const std::set<std::string> &ints_;
  bool relax_;
  const SolverConfig &cfg_;
  const Deadline &dl_;
  std::vector<EqSub> subs_;
  std::vector<Stage> stages_;
};

struct Bb {
  const std::set<std::string> &ints;
  const SolverConfig &cfg;
  const Deadline &dl;
  std::size_t nodes = 0;

  ArithResult solve(const std::vector<LinCon> &cons) {
    if (++nodes > cfg.max_bb_nodes)
      return {SolveStatus::Unknown, UnknownReason::Unsupported, {}};
    ArithResult r = Fm(ints, false, cfg, dl).run(cons);
    if (!r.sat())
      return r;
    for (const auto &[x, v] : r.model) {
      if (!ints.count(x) || is_integral(v))
        continue;
      if (abs(v) > kBox)
        return {SolveStatus::Unknown, UnknownReason::Unsupported, {}};
      std::vector<LinCon> left = cons, right = cons;
      left.push_back({{{x, Q(1)}}, q_floor(v), Rel::Le});
      right.push_back({{{x, Q(-1)}}, -q_ceil(v), Rel::Le});
      ArithResult a = solve(left);
      if (a.sat())
        return a;
      ArithResult b = solve(right);
      if (b.sat())
        return b;
      if (a.unknown())
        return a;
      return b;
    }
    return r;
  }
};

} // namespace

ArithResult solve_arith(const std::vector<LinCon> &cons,
                        const std::set<std::string> &ints, bool relax_ints,
                        const SolverConfig &cfg, const Deadline &deadline) {
  if (relax_ints)
    return Fm(ints, true, cfg, deadline).run(cons);
  Bb bb{ints, cfg, deadline};
  return bb.solve(cons);
}

} // namespace ccl::detail
