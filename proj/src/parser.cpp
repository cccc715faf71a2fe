#include "ccl/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ccl/error.hpp"

namespace ccl {

namespace {

enum class Tok { Ident, Int, Decimal, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

struct SyntaxError {
  std::string message;
  SourceSpan span;
};

class Lexer {
public:
  Lexer(const std::string &text, const std::string &file)
      : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span = {file_, line_, col_, 0};
      if (pos_ >= text_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      std::size_t start = pos_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = text_.substr(start, pos_ - start);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          advance();
        t.kind = Tok::Int;
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          advance();
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
          t.kind = Tok::Decimal;
        }
        t.text = text_.substr(start, pos_ - start);
      } else if (c == '"') {
        advance();
        std::string s;
        while (true) {
          if (pos_ >= text_.size())
            throw SyntaxError{"unterminated string literal", t.span};
          char d = text_[pos_];
          if (d == '"') {
            advance();
            break;
          }
          if (d == '\n')
            throw SyntaxError{"newline in string literal", t.span};
          if (d == '\\') {
            advance();
            if (pos_ >= text_.size())
              throw SyntaxError{"unterminated string literal", t.span};
            char e = text_[pos_];
            switch (e) {
            case 'n':
              s += '\n';
              break;
            case 't':
              s += '\t';
              break;
            case '"':
            case '\\':
              s += e;
              break;
            default:
              throw SyntaxError{std::string("unknown escape \\") + e, t.span};
            }
            advance();
            continue;
          }
          s += d;
          advance();
        }
        t.kind = Tok::String;
        t.text = s;
      } else {
        static const char *two[] = {"->", "==", "!=", "<=", ">=",
                                    "&&", "||", "::"};
        t.kind = Tok::Punct;
        for (const char *op : two) {
          if (text_.compare(pos_, 2, op) == 0) {
            t.text = op;
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          static const std::string one = "{}()[];:,./=!<>+-*";
          if (one.find(c) == std::string::npos)
            throw SyntaxError{"unexpected character '" + printable(c) + "'",
                              t.span};
          t.text = std::string(1, c);
          advance();
        }
      }
      t.span.length = int(pos_ - start);
      out.push_back(std::move(t));
    }
  }

private:
  static std::string printable(char c) {
    if (std::isprint(static_cast<unsigned char>(c)))
      return std::string(1, c);
    std::ostringstream os;
    os << "\\x" << std::hex << (int(static_cast<unsigned char>(c)));
    return os.str();
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (text_.compare(pos_, 2, "//") == 0) {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (text_.compare(pos_, 2, "/*") == 0) {
        SourceSpan at{file_, line_, col_, 2};
        advance();
        advance();
        while (pos_ < text_.size() && text_.compare(pos_, 2, "*/") != 0)
          advance();
        if (pos_ >= text_.size())
          throw SyntaxError{"unterminated comment", at};
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  const std::string &text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr int kMaxDepth = 200;

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Model parse_model() {
    Model m;
    while (peek_ident("enum"))
      m.enums.push_back(parse_enum());
    while (!at_end())
      m.components.push_back(parse_component());
    for (const auto &c : m.components)
      if (c.is_root && m.root.empty())
        m.root = c.name;
    return m;
  }

  Expr parse_standalone_expr() {
    Expr e = parse_expr();
    if (!at_end())
      error("unexpected '" + cur().text + "' after expression");
    return e;
  }

private:
  const Token &cur() const { return toks_[pos_]; }
  bool at_end() const { return cur().kind == Tok::End; }

  [[noreturn]] void error(const std::string &msg) const {
    throw SyntaxError{msg, cur().span};
  }

  bool peek_punct(const char *p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  bool peek_ident(const char *w) const {
    return cur().kind == Tok::Ident && cur().text == w;
  }
  bool accept(const char *p) {
    if (peek_punct(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char *p) {
    if (!accept(p))
      error(std::string("expected '") + p + "', found " + describe());
  }
  void expect_word(const char *w) {
    if (!peek_ident(w))
      error(std::string("expected '") + w + "', found " + describe());
    ++pos_;
  }
  std::string describe() const {
    if (at_end())
      return "end of input";
    return "'" + cur().text + "'";
  }
  std::string ident(const char *what) {
    if (cur().kind != Tok::Ident)
      error(std::string("expected ") + what + ", found " + describe());
    return toks_[pos_++].text;
  }

  EnumDecl parse_enum() {
    EnumDecl e;
    e.span = cur().span;
    expect_word("enum");
    e.name = ident("enum name");
    expect("{");
    e.variants.push_back(ident("enum variant"));
    while (accept(","))
      e.variants.push_back(ident("enum variant"));
    expect("}");
    return e;
  }

  TypeTag parse_type() {
    std::string t = ident("type");
    if (t == "int")
      return TypeTag::int_();
    if (t == "rat")
      return TypeTag::rat();
    if (t == "bool")
      return TypeTag::boolean();
    if (t == "string")
      return TypeTag::str();
    return TypeTag::enumeration(t);
  }

  // An integer literal directly followed by `/ INT` is a rational n/d,
  // the form non-terminating rationals print in.
  Value number(const Token &t, bool negative) {
    if (t.kind == Tok::Int && peek_punct("/") &&
        toks_[pos_ + 1].kind == Tok::Int) {
      Value n = int_literal(t, negative);
      ++pos_;
      const Token &d = toks_[pos_++];
      Value dv = int_literal(d, false);
      if (dv.as_int() == 0)
        throw SyntaxError{"zero denominator", d.span};
      return Value::of_rat(Rational(n.as_int(), dv.as_int()));
    }
    if (t.kind == Tok::Int)
      return int_literal(t, negative);
    auto r = Rational::parse_decimal((negative ? "-" : "") + t.text);
    if (!r)
      throw SyntaxError{"decimal literal out of range", t.span};
    return Value::of_rat(*r);
  }

  Value int_literal(const Token &t, bool negative) {
    {
      std::uint64_t v = 0;
      for (char c : t.text) {
        if (v > (UINT64_MAX - 9) / 10)
          throw SyntaxError{"integer literal too large", t.span};
        v = v * 10 + std::uint64_t(c - '0');
      }
      std::uint64_t limit =
          negative ? std::uint64_t(INT64_MAX) + 1 : std::uint64_t(INT64_MAX);
      if (v > limit)
        throw SyntaxError{"integer literal too large", t.span};
      if (negative)
        return Value::of_int(v == limit ? INT64_MIN : -std::int64_t(v));
      return Value::of_int(std::int64_t(v));
    }
  }

  Value parse_literal() {
    bool negative = accept("-");
    const Token &t = cur();
    if (t.kind == Tok::Int || t.kind == Tok::Decimal) {
      ++pos_;
      return number(t, negative);
    }
    if (negative)
      error("expected number after '-'");
    if (t.kind == Tok::String) {
      ++pos_;
      return Value::of_str(t.text);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true" || t.text == "false") {
        ++pos_;
        return Value::of_bool(t.text == "true");
      }
      std::string e = ident("literal");
      expect("::");
      std::string v = ident("enum variant");
      return Value::of_enum(e, v);
    }
    error("expected literal, found " + describe());
  }

  Component parse_component() {
    Component c;
    c.span = cur().span;
    if (peek_ident("root")) {
      ++pos_;
      c.is_root = true;
    }
    expect_word("component");
    c.name = ident("component name");
    if (accept("(")) {
      do {
        Parameter p;
        p.name = ident("parameter name");
        expect(":");
        p.type = parse_type();
        c.params.push_back(std::move(p));
      } while (accept(","));
      expect(")");
    }
    expect("{");
    while (peek_ident("in") || peek_ident("out"))
      c.ports.push_back(parse_port());
    if (peek_ident("automaton"))
      c.body = parse_automaton();
    else if (peek_ident("subcomponents"))
      c.body = parse_composite();
    else
      error("expected 'automaton' or 'subcomponents', found " + describe());
    expect("}");
    return c;
  }

  Port parse_port() {
    Port p;
    p.span = cur().span;
    p.direction = ident("direction") == "in" ? Direction::In : Direction::Out;
    if (peek_ident("delayed")) {
      ++pos_;
      p.delayed = true;
      expect_word("init");
      p.initial = parse_literal();
    }
    p.type = parse_type();
    p.name = ident("port name");
    expect(";");
    return p;
  }

  Automaton parse_automaton() {
    Automaton a;
    expect_word("automaton");
    expect("{");
    while (peek_ident("var")) {
      VarDecl v;
      v.span = cur().span;
      ++pos_;
      v.type = parse_type();
      v.name = ident("variable name");
      expect("=");
      v.initial = parse_literal();
      expect(";");
      a.vars.push_back(std::move(v));
    }
    expect_word("initial");
    a.initial = ident("initial state");
    expect(";");
    while (!peek_punct("}") && !at_end())
      a.transitions.push_back(parse_transition());
    expect("}");
    return a;
  }

  Transition parse_transition() {
    Transition t;
    t.span = cur().span;
    t.id = ident("transition id");
    expect(":");
    t.source = ident("source state");
    expect("->");
    t.target = ident("target state");
    expect("[");
    t.guard = parse_expr();
    expect("]");
    if (accept("/")) {
      expect("{");
      while (!peek_punct("}")) {
        std::string name = ident("variable or port name");
        if (accept("=")) {
          t.actions.push_back({name, parse_expr()});
        } else if (accept("!")) {
          t.emissions.push_back({name, parse_expr()});
        } else {
          error("expected '=' or '!' after '" + name + "'");
        }
        expect(";");
      }
      expect("}");
    }
    expect(";");
    return t;
  }

  Endpoint parse_endpoint() {
    Endpoint e;
    std::string first = ident("endpoint");
    if (accept(".")) {
      e.instance = first;
      e.port = ident("port name");
    } else {
      e.port = first;
    }
    return e;
  }

  Composite parse_composite() {
    Composite c;
    expect_word("subcomponents");
    expect("{");
    while (!peek_punct("}")) {
      SubInstance s;
      s.span = cur().span;
      s.name = ident("instance name");
      expect(":");
      s.component = ident("component name");
      if (accept("(")) {
        if (!peek_punct(")")) {
          do
            s.args.push_back(parse_expr());
          while (accept(","));
        }
        expect(")");
      }
      expect(";");
      c.subcomponents.push_back(std::move(s));
    }
    expect("}");
    expect_word("connectors");
    expect("{");
    while (!peek_punct("}")) {
      Connector k;
      k.span = cur().span;
      k.from = parse_endpoint();
      expect("->");
      k.to = parse_endpoint();
      expect(";");
      c.connectors.push_back(std::move(k));
    }
    expect("}");
    return c;
  }

  // Expressions: Or < And < Not < Cmp < Add/Sub < Mul < Neg.
  struct DepthGuard {
    int &d;
    DepthGuard(int &depth, const Parser &p) : d(depth) {
      if (++d > kMaxDepth)
        p.error("expression nested too deeply");
    }
    ~DepthGuard() { --d; }
  };

  Expr parse_expr() {
    DepthGuard g(depth_, *this);
    SourceSpan span = cur().span;
    Expr e = parse_and();
    if (!peek_punct("||"))
      return e;
    std::vector<Expr> kids{e};
    while (accept("||"))
      kids.push_back(parse_and());
    return make_or(std::move(kids), span);
  }

  Expr parse_and() {
    SourceSpan span = cur().span;
    Expr e = parse_not();
    if (!peek_punct("&&"))
      return e;
    std::vector<Expr> kids{e};
    while (accept("&&"))
      kids.push_back(parse_not());
    return make_and(std::move(kids), span);
  }

  Expr parse_not() {
    DepthGuard g(depth_, *this);
    SourceSpan span = cur().span;
    if (accept("!"))
      return make_not(parse_not(), span);
    return parse_cmp();
  }

  Expr parse_cmp() {
    SourceSpan span = cur().span;
    Expr a = parse_add();
    static const std::pair<const char *, CmpOp> ops[] = {
        {"<=", CmpOp::Le}, {">=", CmpOp::Ge}, {"==", CmpOp::Eq},
        {"!=", CmpOp::Ne}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
    for (const auto &[text, op] : ops) {
      if (accept(text)) {
        Expr b = parse_add();
        for (const auto &[t2, op2] : ops)
          if (peek_punct(t2))
            error("comparisons do not chain; add parentheses");
        return make_cmp(op, a, b, span);
      }
    }
    return a;
  }

  Expr parse_add() {
    Expr e = parse_mul();
    while (true) {
      SourceSpan span = cur().span;
      if (accept("+"))
        e = make_add(e, parse_mul(), span);
      else if (accept("-"))
        e = make_sub(e, parse_mul(), span);
      else
        return e;
    }
  }

  Expr parse_mul() {
    Expr e = parse_unary();
    while (true) {
      SourceSpan span = cur().span;
      if (accept("*"))
        e = make_mul(e, parse_unary(), span);
      else
        return e;
    }
  }

  Expr parse_unary() {
    DepthGuard g(depth_, *this);
    SourceSpan span = cur().span;
    if (accept("-")) {
      const Token &t = cur();
      if (t.kind == Tok::Int || t.kind == Tok::Decimal) {
        ++pos_;
        return make_const(number(t, true), span);
      }
      return make_neg(parse_unary(), span);
    }
    return parse_atom();
  }

  Expr parse_atom() {
    const Token &t = cur();
    SourceSpan span = t.span;
    if (accept("(")) {
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Int || t.kind == Tok::Decimal) {
      ++pos_;
      return make_const(number(t, false), span);
    }
    if (t.kind == Tok::String) {
      ++pos_;
      return make_const(Value::of_str(t.text), span);
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      if (t.text == "true" || t.text == "false")
        return make_const(Value::of_bool(t.text == "true"), span);
      if (accept("::")) {
        std::string v = ident("enum variant");
        return make_const(Value::of_enum(t.text, v), span);
      }
      return make_var(t.text, span);
    }
    error("expected expression, found " + describe());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

void resolve_names(const Model &m, std::vector<Diagnostic> &errs) {
  std::set<std::string> names;
  for (const auto &e : m.enums)
    if (!names.insert(e.name).second)
      errs.push_back({"DUPLICATE_NAME",
                      "enum '" + e.name + "' declared twice", e.span});
  int roots = 0;
  for (const auto &c : m.components) {
    if (!names.insert(c.name).second)
      errs.push_back({"DUPLICATE_NAME",
                      "component '" + c.name + "' declared twice", c.span});
    roots += c.is_root ? 1 : 0;
  }
  if (roots == 0)
    errs.push_back({"NO_ROOT", "no component is marked 'root'", {}});
  if (roots > 1)
    errs.push_back({"MULTIPLE_ROOTS", "more than one root component", {}});
  auto check_type = [&](const TypeTag &t, const SourceSpan &span) {
    if (t.kind == TypeKind::Enum && !m.find_enum(t.enum_name))
      errs.push_back(
          {"UNKNOWN_ENUM", "unknown type '" + t.enum_name + "'", span});
  };
  for (const auto &c : m.components) {
    std::set<std::string> local;
    for (const auto &p : c.params) {
      check_type(p.type, c.span);
      if (!local.insert(p.name).second)
        errs.push_back({"DUPLICATE_NAME",
                        "'" + p.name + "' declared twice in " + c.name,
                        c.span});
    }
    for (const auto &p : c.ports) {
      check_type(p.type, p.span);
      if (!local.insert(p.name).second)
        errs.push_back({"DUPLICATE_NAME",
                        "'" + p.name + "' declared twice in " + c.name,
                        p.span});
    }
    if (c.is_atomic()) {
      for (const auto &v : c.automaton().vars) {
        check_type(v.type, v.span);
        if (!local.insert(v.name).second)
          errs.push_back({"DUPLICATE_NAME",
                          "'" + v.name + "' declared twice in " + c.name,
                          v.span});
      }
    } else {
      for (const auto &s : c.composite().subcomponents)
        if (!m.find_component(s.component))
          errs.push_back({"UNKNOWN_COMPONENT",
                          "unknown component '" + s.component + "'", s.span});
    }
  }
}

} // namespace

ParseResult parse_model(const std::string &text, const std::string &file) {
  ParseResult r;
  try {
    Lexer lex(text, file);
    Parser p(lex.run());
    Model m = p.parse_model();
    resolve_names(m, r.errors);
    if (r.errors.empty())
      r.model = std::move(m);
  } catch (const SyntaxError &e) {
    r.errors.push_back({"SYNTAX", e.message, e.span});
  }
  return r;
}

std::optional<Expr> parse_expr(const std::string &text, std::string *error) {
  try {
    Lexer lex(text, "<expr>");
    Parser p(lex.run());
    return p.parse_standalone_expr();
  } catch (const SyntaxError &e) {
    if (error)
      *error = e.message;
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_model(const Model &m) {
  std::ostringstream os;
  for (const auto &e : m.enums) {
    os << "enum " << e.name << " { ";
    for (std::size_t i = 0; i < e.variants.size(); ++i)
      os << (i ? ", " : "") << e.variants[i];
    os << " }\n\n";
  }
  for (std::size_t ci = 0; ci < m.components.size(); ++ci) {
    const auto &c = m.components[ci];
    if (ci)
      os << "\n";
    if (c.is_root)
      os << "root ";
    os << "component " << c.name;
    if (!c.params.empty()) {
      os << "(";
      for (std::size_t i = 0; i < c.params.size(); ++i)
        os << (i ? ", " : "") << c.params[i].name << ": "
           << c.params[i].type.to_string();
      os << ")";
    }
    os << " {\n";
    for (const auto &p : c.ports) {
      os << "  " << (p.direction == Direction::In ? "in" : "out");
      if (p.delayed)
        os << " delayed init " << (p.initial ? p.initial->to_string() : "0");
      os << " " << p.type.to_string() << " " << p.name << ";\n";
    }
    if (c.is_atomic()) {
      const auto &a = c.automaton();
      os << "  automaton {\n";
      for (const auto &v : a.vars)
        os << "    var " << v.type.to_string() << " " << v.name << " = "
           << v.initial.to_string() << ";\n";
      os << "    initial " << a.initial << ";\n";
      for (const auto &t : a.transitions) {
        os << "    " << t.id << ": " << t.source << " -> " << t.target << " ["
           << to_string(t.guard) << "]";
        if (!t.actions.empty() || !t.emissions.empty()) {
          os << " / {";
          for (const auto &act : t.actions)
            os << " " << act.target << " = " << to_string(act.value) << ";";
          for (const auto &em : t.emissions)
            os << " " << em.port << "! " << to_string(em.value) << ";";
          os << " }";
        }
        os << ";\n";
      }
      os << "  }\n";
    } else {
      const auto &k = c.composite();
      os << "  subcomponents {\n";
      for (const auto &s : k.subcomponents) {
        os << "    " << s.name << ": " << s.component;
        if (!s.args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < s.args.size(); ++i)
            os << (i ? ", " : "") << to_string(s.args[i]);
          os << ")";
        }
        os << ";\n";
      }
      os << "  }\n  connectors {\n";
      for (const auto &cn : k.connectors)
        os << "    " << cn.from.to_string() << " -> " << cn.to.to_string()
           << ";\n";
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

Model load_model_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("IO", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseResult r = parse_model(ss.str(), path);
  if (!r.ok()) {
    const auto &d = r.errors.front();
    throw Error("PARSE", d.span.file + ":" + std::to_string(d.span.line) +
                             ":" + std::to_string(d.span.column) + ": " +
                             d.code + ": " + d.message);
  }
  return std::move(*r.model);
}

} // namespace ccl
