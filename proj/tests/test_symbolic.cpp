#include <doctest.h>

#include "ccl/error.hpp"
#include "ccl/parser.hpp"
#include "ccl/symbolic.hpp"
#include "gen.hpp"

using namespace ccl;

namespace {

Expr ix(const char *n) { return make_sym(n, TypeTag::int_()); }
Expr ic(std::int64_t v) { return make_const(Value::of_int(v)); }

std::string canon(const Expr &e) { return canonical_text(e); }

bool same_value(const Value &a, const Value &b) {
  if (a.is_null() || b.is_null())
    return a.is_null() && b.is_null();
  if (a.is_bool() || b.is_bool())
    return a.is_bool() && b.is_bool() && a.as_bool() == b.as_bool();
  return a.as_rational() == b.as_rational();
}

} // namespace

TEST_CASE("linear terms collapse to one canonical form") {
  Expr a = make_sub(make_add(ix("x"), ic(1)), ic(4));
  Expr b = make_add(make_sub(ix("x"), ic(5)), ic(2));
  CHECK(canon(a) == canon(b));
  CHECK(canon(a) == "x - 3");
}

TEST_CASE("equivalent integer comparisons agree") {
  Expr a = make_cmp(CmpOp::Lt, make_add(ix("x"), ic(1)), ic(5));
  Expr b = make_cmp(CmpOp::Lt, make_add(ix("x"), ic(2)), ic(6));
  Expr c = make_cmp(CmpOp::Lt, ix("x"), ic(4));
  CHECK(canon(a) == canon(b));
  CHECK(canon(b) == canon(c));
  CHECK(canon(c) == "x <= 3");
}

TEST_CASE("negation of a scaled comparison") {
  Expr e = make_cmp(CmpOp::Lt, make_mul(ic(2), ix("x")), ic(10));
  CHECK(canon(negate(e)) == canon(make_cmp(CmpOp::Ge, ix("x"), ic(5))));
  CHECK(canon(negate(e)) == "x >= 5");
}

TEST_CASE("integer equality with non-integral constant folds") {
  Expr e = make_cmp(CmpOp::Eq, make_mul(ic(2), ix("x")), ic(3));
  CHECK(simplify(e).is_false());
  CHECK(simplify(negate(e)).is_true());
}

TEST_CASE("null handling") {
  Expr n = make_const(Value());
  CHECK(simplify(make_add(ix("x"), n)).is_null());
  CHECK(simplify(make_cmp(CmpOp::Eq, n, n)).is_false());
  Env env{{"x", Value::of_int(1)}};
  CHECK(eval_concrete(make_cmp(CmpOp::Lt, n, ix("x")), env).as_bool() ==
        false);
}

TEST_CASE("unbound names are reported") {
  Env env;
  CHECK_THROWS_AS(eval_concrete(ix("x"), env), Error);
  CHECK_THROWS_AS(substitute(make_var("p"), {}), Error);
}

TEST_CASE("substitute replaces component names only") {
  Binding b{{"p", ic(7)}};
  Expr e = make_add(make_var("p"), ix("x"));
  CHECK(canon(substitute(e, b)) == "x + 7");
}

TEST_CASE("string and enum comparisons are ordered") {
  Expr s = make_sym("s", TypeTag::str());
  Expr lit = make_const(Value::of_str("mbse"));
  CHECK(canon(make_cmp(CmpOp::Eq, lit, s)) ==
        canon(make_cmp(CmpOp::Eq, s, lit)));
  CHECK(canon(negate(make_cmp(CmpOp::Eq, s, lit))) ==
        canon(make_cmp(CmpOp::Ne, s, lit)));
}

TEST_CASE("property: simplify preserves semantics") {
  testgen::Gen g(20261016);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Expr e = g.formula(3);
    Expr s = simplify(e);
    for (int k = 0; k < 5; ++k) {
      Env env = g.env();
      Value a = eval_concrete(e, env);
      Value b = eval_concrete(s, env);
      // Null formulas and false agree under guard semantics.
      bool ta = a.is_bool() && a.as_bool();
      bool tb = b.is_bool() && b.as_bool();
      INFO(to_string(e), " => ", to_string(s));
      CHECK(ta == tb);
      ++checked;
    }
  }
  CHECK(checked == 5000);
}

TEST_CASE("property: simplify preserves term values") {
  testgen::Gen g(7);
  for (int i = 0; i < 1000; ++i) {
    Expr e = g.rat_term(3);
    Expr s = simplify(e);
    Env env = g.env();
    INFO(to_string(e), " => ", to_string(s));
    CHECK(same_value(eval_concrete(e, env), eval_concrete(s, env)));
  }
}

TEST_CASE("property: simplify is idempotent") {
  testgen::Gen g(99);
  for (int i = 0; i < 1000; ++i) {
    Expr s = simplify(g.formula(3));
    INFO(to_string(s));
    CHECK(structurally_equal(simplify(s), s));
  }
}

TEST_CASE("property: negate is the logical complement") {
  testgen::Gen g(3);
  g.with_null = false;
  for (int i = 0; i < 1000; ++i) {
    Expr e = g.formula(3);
    Expr n = negate(e);
    Env env = g.env();
    INFO(to_string(e), " / ", to_string(n));
    CHECK(eval_concrete(e, env).as_bool() != eval_concrete(n, env).as_bool());
  }
}

TEST_CASE("property: canonical text round-trips through the parser") {
  testgen::Gen g(5);
  g.with_null = false;
  for (int i = 0; i < 300; ++i) {
    Expr s = simplify(g.formula(2));
    auto back = parse_expr(to_string(s));
    INFO(to_string(s));
    REQUIRE(back.has_value());
    Env env = g.env();
    CHECK(eval_concrete(*back, env).as_bool() ==
          eval_concrete(s, env).as_bool());
  }
}
