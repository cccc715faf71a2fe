// SMT-LIB2 printing and a subprocess client for an external solver.

#include "ccl/error.hpp"
#include "ccl/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <set>
#include <sstream>

namespace ccl {

namespace {

std::string sym(const std::string &name) { return "|" + name + "|"; }

std::string ctor(const std::string &e, const std::string &v) {
  return "|" + e + "::" + v + "|";
}

std::string sort_of(const TypeTag &t) {
  switch (t.kind) {
  case TypeKind::Int:
    return "Int";
  case TypeKind::Rational:
    return "Real";
  case TypeKind::Bool:
    return "Bool";
  case TypeKind::Str:
    return "Str";
  case TypeKind::Enum:
    return sym(t.enum_name);
  }
  return "Int";
}

std::string magnitude(std::int64_t v) {
  std::uint64_t m = v < 0 ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
  return std::to_string(m);
}

std::string numeral(const Rational &r, bool real) {
  std::string body;
  if (r.den() == 1)
    body = magnitude(r.num()) + (real ? ".0" : "");
  else
    body = "(/ " + magnitude(r.num()) + ".0 " + magnitude(r.den()) + ".0)";
  return r.num() < 0 ? "(- " + body + ")" : body;
}

bool has_real(const Expr &e) {
  bool real = false;
  for_each_node(e, [&](const Expr &node_expr) {
    const ExprNode &n = node_expr.node();
    if (n.kind == ExprKind::Var && n.var_type &&
        n.var_type->kind == TypeKind::Rational)
      real = true;
    if (n.kind == ExprKind::Const && n.constant.is_rat())
      real = true;
  });
  return real;
}

class Printer {
public:
  std::vector<std::string> strings;

  std::string str_lit(const std::string &s) {
    for (std::size_t i = 0; i < strings.size(); ++i)
      if (strings[i] == s)
        return "str_lit_" + std::to_string(i);
    strings.push_back(s);
    return "str_lit_" + std::to_string(strings.size() - 1);
  }

  std::string print(const Expr &e, bool real) {
    const auto &n = e.node();
    switch (n.kind) {
    case ExprKind::Const: {
      const Value &v = n.constant;
      if (v.is_bool())
        return v.as_bool() ? "true" : "false";
      if (v.is_int() || v.is_rat())
        return numeral(v.as_rational(), real);
      if (v.is_str())
        return str_lit(v.as_str());
      if (v.is_enum())
        return ctor(v.as_enum().enum_name, v.as_enum().variant);
      throw Error("UNSUPPORTED_ATOM", "null constant in assertion");
    }
    case ExprKind::Var:
      if (real && n.var_type && n.var_type->kind == TypeKind::Int)
        return "(to_real " + sym(n.name) + ")";
      return sym(n.name);
    case ExprKind::Neg:
      return "(- " + print(n.kids[0], real) + ")";
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      const char *op = n.kind == ExprKind::Add   ? "+"
                       : n.kind == ExprKind::Sub ? "-"
                                                 : "*";
      return std::string("(") + op + " " + print(n.kids[0], real) + " " +
             print(n.kids[1], real) + ")";
    }
    case ExprKind::Not:
      return "(not " + print(n.kids[0], false) + ")";
    case ExprKind::And:
    case ExprKind::Or: {
      std::string s = n.kind == ExprKind::And ? "(and" : "(or";
      for (const auto &k : n.kids)
        s += " " + print(k, false);
      return s + ")";
    }
    case ExprKind::Cmp: {
      bool r = has_real(n.kids[0]) || has_real(n.kids[1]);
      std::string a = print(n.kids[0], r), b = print(n.kids[1], r);
      switch (n.op) {
      case CmpOp::Lt:
        return "(< " + a + " " + b + ")";
      case CmpOp::Le:
        return "(<= " + a + " " + b + ")";
      case CmpOp::Gt:
        return "(> " + a + " " + b + ")";
      case CmpOp::Ge:
        return "(>= " + a + " " + b + ")";
      case CmpOp::Eq:
        return "(= " + a + " " + b + ")";
      case CmpOp::Ne:
        return "(not (= " + a + " " + b + "))";
      }
    }
    }
    throw Error("UNSUPPORTED_ATOM", "cannot print '" + to_string(e) + "'");
  }
};

struct Script {
  std::string text;
  std::vector<std::pair<std::string, TypeTag>> vars;
  std::vector<std::string> strings;
};

Script build_script(const std::vector<Expr> &assertions,
                    const EnumTable &enums) {
  Printer p;
  std::vector<std::string> body;
  std::map<std::string, TypeTag> vars;
  std::set<std::string> used_enums;
  for (const auto &a : assertions) {
    for_each_node(a, [&](const Expr &node_expr) {
    const ExprNode &n = node_expr.node();
      if (n.kind == ExprKind::Var && n.var_type) {
        vars.emplace(n.name, *n.var_type);
        if (n.var_type->kind == TypeKind::Enum)
          used_enums.insert(n.var_type->enum_name);
      }
      if (n.kind == ExprKind::Const && n.constant.is_enum())
        used_enums.insert(n.constant.as_enum().enum_name);
    });
    body.push_back("(assert " + p.print(a, false) + ")");
  }
  std::ostringstream os;
  os << "(set-option :produce-models true)\n(set-logic ALL)\n";
  os << "(declare-sort Str 0)\n";
  for (const auto &e : used_enums) {
    auto it = enums.find(e);
    if (it == enums.end())
      throw Error("UNSUPPORTED_ATOM", "unknown enum '" + e + "'");
    os << "(declare-datatypes ((" << sym(e) << " 0)) ((";
    for (const auto &v : it->second)
      os << "(" << ctor(e, v) << ")";
    os << ")))\n";
  }
  for (std::size_t i = 0; i < p.strings.size(); ++i)
    os << "(declare-const str_lit_" << i << " Str)\n";
  if (p.strings.size() > 1) {
    os << "(assert (distinct";
    for (std::size_t i = 0; i < p.strings.size(); ++i)
      os << " str_lit_" << i;
    os << "))\n";
  }
  for (const auto &[name, t] : vars)
    os << "(declare-const " << sym(name) << " " << sort_of(t) << ")\n";
  for (const auto &b : body)
    os << b << "\n";
  os << "(check-sat)\n";
  Script s;
  s.vars.assign(vars.begin(), vars.end());
  s.strings = p.strings;
  if (!vars.empty() || !p.strings.empty()) {
    os << "(get-value (";
    for (const auto &[name, _] : vars)
      os << sym(name) << " ";
    for (std::size_t i = 0; i < p.strings.size(); ++i)
      os << "str_lit_" << i << " ";
    os << "))\n";
  }
  os << "(exit)\n";
  s.text = os.str();
  return s;
}

// Minimal s-expression reader for solver replies.
struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

class Reader {
public:
  explicit Reader(const std::string &t) : t_(t) {}

  bool at_end() {
    skip();
    return i_ >= t_.size();
  }

  Sexp read() {
    skip();
    if (i_ >= t_.size())
      fail("unexpected end of reply");
    Sexp s;
    if (t_[i_] == '(') {
      ++i_;
      s.is_list = true;
      while (true) {
        skip();
        if (i_ >= t_.size())
          fail("unbalanced parentheses");
        if (t_[i_] == ')') {
          ++i_;
          return s;
        }
        s.list.push_back(read());
      }
    }
    if (t_[i_] == ')')
      fail("unexpected ')'");
    std::size_t start = i_;
    if (t_[i_] == '|') {
      i_ = t_.find('|', i_ + 1);
      if (i_ == std::string::npos)
        fail("unterminated symbol");
      ++i_;
    } else if (t_[i_] == '"') {
      ++i_;
      while (i_ < t_.size() && t_[i_] != '"')
        ++i_;
      ++i_;
    } else {
      while (i_ < t_.size() && !std::isspace((unsigned char)t_[i_]) &&
             t_[i_] != '(' && t_[i_] != ')')
        ++i_;
    }
    s.atom = t_.substr(start, i_ - start);
    return s;
  }

  [[noreturn]] static void fail(const std::string &m) {
    throw Error("BACKEND_PROTOCOL", m);
  }

private:
  void skip() {
    while (i_ < t_.size() && std::isspace((unsigned char)t_[i_]))
      ++i_;
  }
  const std::string &t_;
  std::size_t i_ = 0;
};

Rational read_number(const Sexp &s) {
  if (s.is_list) {
    if (s.list.size() == 2 && s.list[0].atom == "-")
      return Rational(0) - read_number(s.list[1]);
    if (s.list.size() == 3 && s.list[0].atom == "/") {
      Rational a = read_number(s.list[1]), b = read_number(s.list[2]);
      if (b.num() == 0)
        Reader::fail("division by zero in model");
      return a * Rational(b.den(), b.num());
    }
    Reader::fail("unexpected numeric term");
  }
  auto r = Rational::parse_decimal(s.atom);
  if (!r)
    Reader::fail("bad numeral '" + s.atom + "'");
  return *r;
}

std::string unquote(const std::string &a) {
  if (a.size() >= 2 && a.front() == '|' && a.back() == '|')
    return a.substr(1, a.size() - 2);
  return a;
}

struct ChildOutput {
  std::string out;
  bool timed_out = false;
};

ChildOutput run_child(const std::string &cmd, const std::string &input,
                      int timeout_ms) {
  std::vector<std::string> argv_s;
  std::istringstream is(cmd);
  for (std::string w; is >> w;)
    argv_s.push_back(w);
  if (argv_s.empty())
    throw Error("BACKEND_SPAWN", "no external solver command configured");
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe2(err_pipe, O_CLOEXEC))
    throw Error("BACKEND_SPAWN", std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0)
    throw Error("BACKEND_SPAWN", std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0)
      dup2(devnull, 2);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(err_pipe[0]);
    std::vector<char *> argv;
    for (auto &a : argv_s)
      argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int e = errno;
    (void)!write(err_pipe[1], &e, sizeof e);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  int child_errno = 0;
  if (read(err_pipe[0], &child_errno, sizeof child_errno) > 0) {
    close(err_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    waitpid(pid, nullptr, 0);
    throw Error("BACKEND_SPAWN", "cannot execute '" + argv_s[0] +
                                     "': " + std::strerror(child_errno));
  }
  close(err_pipe[0]);
  signal(SIGPIPE, SIG_IGN);
  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n <= 0)
      break;
    written += std::size_t(n);
  }
  close(in_pipe[1]);
  ChildOutput res;
  auto start = std::chrono::steady_clock::now();
  char buf[4096];
  while (true) {
    int wait_ms = -1;
    if (timeout_ms > 0) {
      auto spent = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
      wait_ms = int(std::max<long>(0, timeout_ms - spent));
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr == 0) {
      res.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    if (pr < 0 && errno == EINTR)
      continue;
    ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n <= 0)
      break;
    res.out.append(buf, std::size_t(n));
  }
  close(out_pipe[0]);
  waitpid(pid, nullptr, 0);
  return res;
}

} // namespace

std::string to_smtlib(const std::vector<Expr> &assertions,
                      const EnumTable &enums) {
  return build_script(assertions, enums).text;
}

SolveResult solve_external(const std::vector<Expr> &assertions,
                           const SolverConfig &cfg) {
  for (const auto &a : assertions)
    check_supported(a, cfg.enums);
  Script script = build_script(assertions, cfg.enums);
  ChildOutput child = run_child(cfg.external_cmd, script.text, cfg.timeout_ms);
  SolveResult res;
  if (child.timed_out) {
    res.reason = UnknownReason::Timeout;
    return res;
  }
  Reader rd(child.out);
  if (rd.at_end())
    Reader::fail("empty reply from external solver");
  Sexp head = rd.read();
  if (head.atom == "unsat") {
    res.status = SolveStatus::Unsat;
    return res;
  }
  if (head.atom == "unknown") {
    res.reason = UnknownReason::Unsupported;
    res.detail = "external solver returned unknown";
    return res;
  }
  if (head.atom != "sat")
    Reader::fail("unexpected reply '" + child.out.substr(0, 80) + "'");
  res.status = SolveStatus::Sat;
  if (script.vars.empty() && script.strings.empty())
    return res;
  if (rd.at_end())
    Reader::fail("missing get-value reply");
  Sexp values = rd.read();
  if (!values.is_list)
    Reader::fail("malformed get-value reply");
  std::map<std::string, std::string> raw; // name -> printed value
  std::map<std::string, Sexp> parsed;
  for (const auto &pair : values.list) {
    if (!pair.is_list || pair.list.size() != 2 || pair.list[0].is_list)
      Reader::fail("malformed get-value entry");
    std::string name = unquote(pair.list[0].atom);
    parsed[name] = pair.list[1];
  }
  // Abstract string values map back to literals or to fresh strings.
  std::map<std::string, std::string> abstract_to_str;
  std::set<std::string> used(script.strings.begin(), script.strings.end());
  auto key_of = [](const Sexp &s) {
    return s.is_list ? std::string("(list)") : s.atom;
  };
  for (std::size_t i = 0; i < script.strings.size(); ++i) {
    auto it = parsed.find("str_lit_" + std::to_string(i));
    if (it != parsed.end())
      abstract_to_str[key_of(it->second)] = script.strings[i];
  }
  int fresh = 0;
  for (const auto &[name, t] : script.vars) {
    auto it = parsed.find(name);
    if (it == parsed.end())
      Reader::fail("no value for '" + name + "'");
    const Sexp &v = it->second;
    switch (t.kind) {
    case TypeKind::Int: {
      Rational r = read_number(v);
      if (r.den() != 1)
        Reader::fail("non-integral value for int '" + name + "'");
      res.model[name] = Value::of_int(r.num());
      break;
    }
    case TypeKind::Rational:
      res.model[name] = Value::of_rat(read_number(v));
      break;
    case TypeKind::Bool:
      if (v.atom != "true" && v.atom != "false")
        Reader::fail("bad boolean value");
      res.model[name] = Value::of_bool(v.atom == "true");
      break;
    case TypeKind::Enum: {
      std::string c = unquote(v.is_list && !v.list.empty() ? v.list[0].atom
                                                             : v.atom);
      auto sep = c.find("::");
      if (sep == std::string::npos)
        Reader::fail("bad enum value '" + c + "'");
      res.model[name] = Value::of_enum(c.substr(0, sep), c.substr(sep + 2));
      break;
    }
    case TypeKind::Str: {
      std::string k = key_of(v);
      auto f = abstract_to_str.find(k);
      if (f == abstract_to_str.end()) {
        std::string s;
        do
          s = "s" + std::to_string(fresh++);
        while (used.count(s));
        used.insert(s);
        f = abstract_to_str.emplace(k, s).first;
      }
      res.model[name] = Value::of_str(f->second);
      break;
    }
    }
  }
  for (const auto &a : assertions) {
    Value ok = eval_concrete(a, res.model);
    if (!ok.is_bool() || !ok.as_bool())
      throw Error("BACKEND_PROTOCOL",
                  "external model violates '" + to_string(a) + "'");
  }
  return res;
}

} // namespace ccl
