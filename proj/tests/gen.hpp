#pragma once
// Random expression and environment generators shared by property tests.

#include <random>
#include <string>
#include <vector>

#include "ccl/expr.hpp"
#include "ccl/symbolic.hpp"

namespace ccl::testgen {

struct Gen {
  std::mt19937_64 rng;
  std::vector<std::string> int_vars{"x", "y", "z"};
  std::vector<std::string> rat_vars{"r"};
  std::vector<std::string> bool_vars{"b"};
  int coef_range = 6;
  bool with_null = true;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  }

  Expr int_term(int depth) {
    if (depth <= 0 || pick(3) == 0) {
      if (pick(2) == 0)
        return make_const(Value::of_int(range(-coef_range, coef_range)));
      return make_sym(int_vars[pick(int(int_vars.size()))], TypeTag::int_());
    }
    switch (pick(4)) {
    case 0:
      return make_add(int_term(depth - 1), int_term(depth - 1));
    case 1:
      return make_sub(int_term(depth - 1), int_term(depth - 1));
    case 2:
      return make_neg(int_term(depth - 1));
    default:
      return make_mul(make_const(Value::of_int(range(-3, 3))),
                      int_term(depth - 1));
    }
  }

  Expr rat_term(int depth) {
    if (depth <= 0 || pick(3) == 0) {
      switch (pick(3)) {
      case 0:
        return make_const(Value::of_rat(Rational(range(-12, 12), range(1, 4))));
      case 1:
        return make_sym(rat_vars[pick(int(rat_vars.size()))], TypeTag::rat());
      default:
        return int_term(1);
      }
    }
    switch (pick(3)) {
    case 0:
      return make_add(rat_term(depth - 1), rat_term(depth - 1));
    case 1:
      return make_sub(rat_term(depth - 1), rat_term(depth - 1));
    default:
      return make_mul(make_const(Value::of_rat(Rational(range(-4, 4), 2))),
                      rat_term(depth - 1));
    }
  }

  CmpOp op() { return CmpOp(pick(6)); }

  Expr atom() {
    switch (pick(with_null ? 5 : 4)) {
    case 0:
      return make_cmp(op(), int_term(2), int_term(2));
    case 1:
      return make_cmp(op(), rat_term(2), rat_term(2));
    case 2:
      return make_sym(bool_vars[pick(int(bool_vars.size()))],
                      TypeTag::boolean());
    case 3:
      return make_const(Value::of_bool(pick(2) == 0));
    default:
      return make_cmp(op(), make_add(int_term(1), make_const(Value())),
                      int_term(1));
    }
  }

  Expr formula(int depth) {
    if (depth <= 0 || pick(3) == 0)
      return atom();
    switch (pick(3)) {
    case 0:
      return make_not(formula(depth - 1));
    case 1: {
      std::vector<Expr> kids;
      for (int i = 0, n = 2 + pick(2); i < n; ++i)
        kids.push_back(formula(depth - 1));
      return make_and(std::move(kids));
    }
    default: {
      std::vector<Expr> kids;
      for (int i = 0, n = 2 + pick(2); i < n; ++i)
        kids.push_back(formula(depth - 1));
      return make_or(std::move(kids));
    }
    }
  }

  Env env(std::int64_t lo = -10, std::int64_t hi = 10) {
    Env e;
    for (const auto &v : int_vars)
      e[v] = Value::of_int(range(lo, hi));
    for (const auto &v : rat_vars)
      e[v] = Value::of_rat(Rational(range(lo * 2, hi * 2), range(1, 3)));
    for (const auto &v : bool_vars)
      e[v] = Value::of_bool(pick(2) == 0);
    return e;
  }
};

} // namespace ccl::testgen
