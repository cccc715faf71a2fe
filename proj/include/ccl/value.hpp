#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace ccl {

/// Exact rational with int64 numerator/denominator, kept canonical
/// (den > 0, gcd(|num|, den) == 1). Arithmetic is checked and throws
/// Error("OVERFLOW") instead of wrapping.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t num) : num_(num) {} // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }

  Rational operator-() const;
  friend Rational operator+(const Rational &a, const Rational &b);
  friend Rational operator-(const Rational &a, const Rational &b);
  friend Rational operator*(const Rational &a, const Rational &b);

  friend bool operator==(const Rational &a, const Rational &b) = default;
  friend std::strong_ordering operator<=>(const Rational &a,
                                          const Rational &b);

  /// Decimal rendering when the value terminates ("1.5", "0.0", "-2.25"),
  /// otherwise "n/d".
  std::string to_string() const;
  /// Parses "12", "-3", "1.5", "-0.25".
  static std::optional<Rational> parse_decimal(const std::string &text);

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

enum class TypeKind { Int, Rational, Bool, Str, Enum };

struct TypeTag {
  TypeKind kind = TypeKind::Int;
  std::string enum_name; // only for Enum

  static TypeTag int_() { return {TypeKind::Int, {}}; }
  static TypeTag rat() { return {TypeKind::Rational, {}}; }
  static TypeTag boolean() { return {TypeKind::Bool, {}}; }
  static TypeTag str() { return {TypeKind::Str, {}}; }
  static TypeTag enumeration(std::string name) {
    return {TypeKind::Enum, std::move(name)};
  }

  bool is_numeric() const {
    return kind == TypeKind::Int || kind == TypeKind::Rational;
  }
  friend bool operator==(const TypeTag &, const TypeTag &) = default;
  std::string to_string() const;
};

struct EnumVal {
  std::string enum_name;
  std::string variant;
  friend bool operator==(const EnumVal &, const EnumVal &) = default;
  friend auto operator<=>(const EnumVal &, const EnumVal &) = default;
};

struct Null {
  friend bool operator==(Null, Null) { return true; }
  friend auto operator<=>(Null, Null) = default;
};

/// Concrete message value. Null marks an absent message.
class Value {
public:
  using Storage =
      std::variant<Null, std::int64_t, Rational, bool, std::string, EnumVal>;

  Value() = default;
  Value(Null) {} // NOLINT(implicit)
  static Value of_int(std::int64_t v) { return Value(Storage(v)); }
  static Value of_rat(Rational v) { return Value(Storage(v)); }
  static Value of_bool(bool v) { return Value(Storage(v)); }
  static Value of_str(std::string v) { return Value(Storage(std::move(v))); }
  static Value of_enum(std::string e, std::string variant) {
    return Value(Storage(EnumVal{std::move(e), std::move(variant)}));
  }

  bool is_null() const { return std::holds_alternative<Null>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_rat() const { return std::holds_alternative<Rational>(v_); }
  bool is_numeric() const { return is_int() || is_rat(); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_str() const { return std::holds_alternative<std::string>(v_); }
  bool is_enum() const { return std::holds_alternative<EnumVal>(v_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const Rational &as_rat_exact() const { return std::get<Rational>(v_); }
  /// Numeric value promoted to Rational.
  Rational as_rational() const;
  bool as_bool() const { return std::get<bool>(v_); }
  const std::string &as_str() const { return std::get<std::string>(v_); }
  const EnumVal &as_enum() const { return std::get<EnumVal>(v_); }

  const Storage &storage() const { return v_; }

  /// Type of a non-null value.
  std::optional<TypeTag> type() const;
  /// Null is compatible with every type; Int is accepted where Rational is.
  bool fits(const TypeTag &t) const;

  /// Literal rendering in the surface syntax: 5, 1.5, true, "a\"b", E::V, null.
  std::string to_string() const;

  friend bool operator==(const Value &a, const Value &b) = default;
  friend bool operator<(const Value &a, const Value &b) { return a.v_ < b.v_; }

  /// Default value of a type: 0, 0.0, false, "", first enum variant.
  static Value default_of(const TypeTag &t, const std::string &first_variant);

private:
  explicit Value(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

std::string quote_string(const std::string &s);

} // namespace ccl
