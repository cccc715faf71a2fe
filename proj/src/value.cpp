#include "ccl/value.hpp"

#include <numeric>

#include "ccl/error.hpp"

namespace ccl {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error("OVERFLOW", "integer addition overflows 64 bits");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Error("OVERFLOW", "integer subtraction overflows 64 bits");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error("OVERFLOW", "integer multiplication overflows 64 bits");
  return r;
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw Error("OVERFLOW", "rational component overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0)
    a = -a;
  if (b < 0)
    b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(__int128 num, __int128 den) {
  if (den == 0)
    throw Error("DIVISION_BY_ZERO", "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0)
    throw Error("DIVISION_BY_ZERO", "rational with zero denominator");
  __int128 n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n);
  den_ = narrow(d);
}

Rational Rational::operator-() const { return make(-__int128(num_), den_); }

Rational operator+(const Rational &a, const Rational &b) {
  if (a.den_ == 1 && b.den_ == 1)
    return Rational(checked_add(a.num_, b.num_));
  return make(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_,
              __int128(a.den_) * b.den_);
}

Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }

Rational operator*(const Rational &a, const Rational &b) {
  return make(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
  __int128 l = __int128(a.num_) * b.den_;
  __int128 r = __int128(b.num_) * a.den_;
  if (l < r)
    return std::strong_ordering::less;
  if (l > r)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
  // Terminating decimals have denominators of the form 2^a * 5^b.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1)
    return std::to_string(num_) + "/" + std::to_string(den_);
  int digits = std::max(std::max(twos, fives), 1);
  __int128 scale = 1;
  for (int i = 0; i < digits; ++i)
    scale *= 10;
  __int128 scaled = __int128(num_) * (scale / den_);
  bool neg = scaled < 0;
  if (neg)
    scaled = -scaled;
  __int128 whole = scaled / scale;
  __int128 frac = scaled % scale;
  auto to_str = [](__int128 v) {
    if (v == 0)
      return std::string("0");
    std::string s;
    while (v > 0) {
      s.insert(s.begin(), char('0' + int(v % 10)));
      v /= 10;
    }
    return s;
  };
  std::string f = to_str(frac);
  f.insert(f.begin(), std::size_t(digits) - f.size(), '0');
  while (f.size() > 1 && f.back() == '0')
    f.pop_back();
  return (neg ? "-" : "") + to_str(whole) + "." + f;
}

std::optional<Rational> Rational::parse_decimal(const std::string &text) {
  if (text.empty())
    return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  __int128 num = 0, den = 1;
  bool any = false, dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (dot)
        return std::nullopt;
      dot = true;
      continue;
    }
    if (c < '0' || c > '9')
      return std::nullopt;
    any = true;
    num = num * 10 + (c - '0');
    if (dot)
      den *= 10;
    if (num > (__int128(1) << 100) || den > (__int128(1) << 100))
      return std::nullopt;
  }
  if (!any)
    return std::nullopt;
  try {
    return make(neg ? -num : num, den);
  } catch (const Error &) {
    return std::nullopt;
  }
}

std::string TypeTag::to_string() const {
  switch (kind) {
  case TypeKind::Int:
    return "int";
  case TypeKind::Rational:
    return "rat";
  case TypeKind::Bool:
    return "bool";
  case TypeKind::Str:
    return "string";
  case TypeKind::Enum:
    return enum_name;
  }
  return "?";
}

Rational Value::as_rational() const {
  if (is_int())
    return Rational(as_int());
  return as_rat_exact();
}

std::optional<TypeTag> Value::type() const {
  return std::visit(
      [](const auto &x) -> std::optional<TypeTag> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>)
          return std::nullopt;
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return TypeTag::int_();
        else if constexpr (std::is_same_v<T, Rational>)
          return TypeTag::rat();
        else if constexpr (std::is_same_v<T, bool>)
          return TypeTag::boolean();
        else if constexpr (std::is_same_v<T, std::string>)
          return TypeTag::str();
        else
          return TypeTag::enumeration(x.enum_name);
      },
      v_);
}

bool Value::fits(const TypeTag &t) const {
  auto own = type();
  if (!own)
    return true;
  if (*own == t)
    return true;
  return own->kind == TypeKind::Int && t.kind == TypeKind::Rational;
}

std::string quote_string(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
    case '"':
      out += "\\\"";
      break;
    case '\\':
      out += "\\\\";
      break;
    case '\n':
      out += "\\n";
      break;
    case '\t':
      out += "\\t";
      break;
    default:
      out += c;
    }
  }
  return out + "\"";
}

std::string Value::to_string() const {
  return std::visit(
      [](const auto &x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>)
          return "null";
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(x);
        else if constexpr (std::is_same_v<T, Rational>)
          return x.to_string();
        else if constexpr (std::is_same_v<T, bool>)
          return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>)
          return quote_string(x);
        else
          return x.enum_name + "::" + x.variant;
      },
      v_);
}

Value Value::default_of(const TypeTag &t, const std::string &first_variant) {
  switch (t.kind) {
  case TypeKind::Int:
    return of_int(0);
  case TypeKind::Rational:
    return of_rat(Rational(0));
  case TypeKind::Bool:
    return of_bool(false);
  case TypeKind::Str:
    return of_str("");
  case TypeKind::Enum:
    return of_enum(t.enum_name, first_variant);
  }
  return {};
}

} // namespace ccl
