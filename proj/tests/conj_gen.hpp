#pragma once
// Random bounded conjunctions plus a brute-force reference decision.

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ccl/solver.hpp"

namespace ccl::testgen {

struct ConjCase {
  std::vector<Expr> atoms;
  std::map<std::string, std::vector<Value>> domain;
  std::map<std::string, TypeTag> types;

  /// Atoms plus domain membership (disjunctions of equalities).
  std::vector<Expr> assertions() const {
    std::vector<Expr> out = atoms;
    for (const auto &[x, vals] : domain) {
      std::vector<Expr> alts;
      for (const auto &v : vals)
        alts.push_back(make_cmp(CmpOp::Eq, make_sym(x, types.at(x)),
                                make_const(v)));
      out.push_back(make_or(std::move(alts)));
    }
    return out;
  }
};

inline EnumTable conj_enums() { return {{"Color", {"Red", "Green", "Blue"}}}; }

class ConjGen {
public:
  explicit ConjGen(std::uint64_t seed) : rng_(seed) {}

  ConjCase next() {
    ConjCase c;
    int n = 1 + pick(5);
    for (int i = 0; i < n; ++i)
      c.atoms.push_back(atom(c));
    return c;
  }

private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }

  Expr var(ConjCase &c, const std::string &name, TypeTag t) {
    if (!c.domain.count(name)) {
      std::vector<Value> d;
      switch (t.kind) {
      case TypeKind::Int:
        for (int v = -2; v <= 2; ++v)
          d.push_back(Value::of_int(v));
        break;
      case TypeKind::Rational:
        for (int v = -2; v <= 2; ++v)
          d.push_back(Value::of_rat(Rational(v, 2)));
        break;
      case TypeKind::Str:
        for (const char *s : {"a", "b", "c"})
          d.push_back(Value::of_str(s));
        break;
      default:
        for (const char *s : {"Red", "Green", "Blue"})
          d.push_back(Value::of_enum("Color", s));
      }
      c.domain[name] = d;
      c.types[name] = t;
    }
    return make_sym(name, t);
  }

  Expr int_side(ConjCase &c) {
    Expr acc = make_const(Value::of_int(range(-3, 3)));
    for (const char *x : {"x", "y", "z"})
      if (pick(2))
        acc = make_add(acc, make_mul(make_const(Value::of_int(range(-3, 3))),
                                     var(c, x, TypeTag::int_())));
    return acc;
  }

  Expr atom(ConjCase &c) {
    CmpOp op = CmpOp(pick(6));
    bool eq_only = pick(2);
    CmpOp eop = eq_only ? CmpOp::Eq : CmpOp::Ne;
    switch (pick(5)) {
    case 0:
    case 1:
      return make_cmp(op, int_side(c), int_side(c));
    case 2: {
      Expr l = make_add(make_const(Value::of_rat(Rational(range(-4, 4), 2))),
                        make_mul(make_const(Value::of_rat(Rational(range(-4, 4), 3))),
                                 var(c, "r", TypeTag::rat())));
      Expr r = pick(2) ? int_side(c) : make_const(Value::of_rat(Rational(range(-3, 3), 2)));
      return make_cmp(op, l, r);
    }
    case 3: {
      Expr a = var(c, pick(2) ? "s" : "t", TypeTag::str());
      Expr b = pick(2) ? var(c, pick(2) ? "s" : "t", TypeTag::str())
                       : make_const(Value::of_str(std::string(1, char('a' + pick(4)))));
      return make_cmp(eop, a, b);
    }
    default: {
      Expr a = var(c, pick(2) ? "e" : "f", TypeTag::enumeration("Color"));
      const char *vs[] = {"Red", "Green", "Blue"};
      Expr b = pick(2) ? var(c, pick(2) ? "e" : "f", TypeTag::enumeration("Color"))
                       : make_const(Value::of_enum("Color", vs[pick(3)]));
      return make_cmp(eop, a, b);
    }
    }
  }

  std::mt19937_64 rng_;
};

/// Exhaustive search over the case's domain.
inline bool brute_sat(const ConjCase &c) {
  std::vector<std::string> names;
  for (const auto &[x, _] : c.domain)
    names.push_back(x);
  Env env;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == names.size()) {
      for (const auto &a : c.atoms) {
        Value v = eval_concrete(a, env);
        if (!v.is_bool() || !v.as_bool())
          return false;
      }
      return true;
    }
    for (const auto &v : c.domain.at(names[i])) {
      env[names[i]] = v;
      if (go(i + 1))
        return true;
    }
    return false;
  };
  return go(0);
}

} // namespace ccl::testgen
