#include "ccl/json_io.hpp"

#include <sstream>

#include "ccl/error.hpp"

namespace ccl {

namespace {

[[noreturn]] void bad(const std::string &msg) { throw Error("BAD_INPUT", msg); }

std::optional<Rational> rational_from_text(const std::string &s) {
  auto slash = s.find('/');
  if (slash == std::string::npos)
    return Rational::parse_decimal(s);
  try {
    std::size_t used = 0;
    long long n = std::stoll(s.substr(0, slash), &used);
    if (used != slash)
      return std::nullopt;
    std::string rest = s.substr(slash + 1);
    long long d = std::stoll(rest, &used);
    if (used != rest.size() || d == 0)
      return std::nullopt;
    return Rational(n, d);
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

Value enum_from_text(const std::string &s, const TypeTag &t, const Model &m) {
  std::string variant = s;
  auto sep = s.find("::");
  if (sep != std::string::npos) {
    if (s.substr(0, sep) != t.enum_name)
      bad("value '" + s + "' is not of enum " + t.enum_name);
    variant = s.substr(sep + 2);
  }
  const EnumDecl *e = m.find_enum(t.enum_name);
  if (!e)
    bad("unknown enum " + t.enum_name);
  for (const auto &v : e->variants)
    if (v == variant)
      return Value::of_enum(t.enum_name, v);
  bad("'" + variant + "' is not a variant of " + t.enum_name);
}

} // namespace

json value_to_json(const Value &v) {
  if (v.is_null())
    return nullptr;
  if (v.is_int())
    return v.as_int();
  if (v.is_rat())
    return v.as_rat_exact().to_string();
  if (v.is_bool())
    return v.as_bool();
  if (v.is_str())
    return v.as_str();
  return v.as_enum().enum_name + "::" + v.as_enum().variant;
}

Value value_from_json(const json &j, const TypeTag &t, const Model &m) {
  if (j.is_null())
    return Value();
  switch (t.kind) {
  case TypeKind::Int:
    if (!j.is_number_integer())
      bad("expected an integer, got " + j.dump());
    return Value::of_int(j.get<std::int64_t>());
  case TypeKind::Rational:
    if (j.is_number_integer())
      return Value::of_rat(Rational(j.get<std::int64_t>()));
    if (j.is_number_float()) {
      // Re-read the literal text so that 1.5 stays exact.
      auto r = Rational::parse_decimal(j.dump());
      if (!r)
        bad("cannot represent " + j.dump() + " exactly");
      return Value::of_rat(*r);
    }
    if (j.is_string()) {
      auto r = rational_from_text(j.get<std::string>());
      if (!r)
        bad("bad rational '" + j.get<std::string>() + "'");
      return Value::of_rat(*r);
    }
    bad("expected a rational, got " + j.dump());
  case TypeKind::Bool:
    if (!j.is_boolean())
      bad("expected a boolean, got " + j.dump());
    return Value::of_bool(j.get<bool>());
  case TypeKind::Str:
    if (!j.is_string())
      bad("expected a string, got " + j.dump());
    return Value::of_str(j.get<std::string>());
  case TypeKind::Enum:
    if (!j.is_string())
      bad("expected an enum variant, got " + j.dump());
    return enum_from_text(j.get<std::string>(), t, m);
  }
  bad("unsupported type");
}

Value value_from_text(const std::string &text, const TypeTag &t,
                      const Model &m) {
  switch (t.kind) {
  case TypeKind::Int:
    try {
      std::size_t used = 0;
      long long v = std::stoll(text, &used);
      if (used != text.size())
        bad("expected an integer, got '" + text + "'");
      return Value::of_int(v);
    } catch (const std::logic_error &) {
      bad("expected an integer, got '" + text + "'");
    }
  case TypeKind::Rational: {
    auto r = rational_from_text(text);
    if (!r)
      bad("expected a rational, got '" + text + "'");
    return Value::of_rat(*r);
  }
  case TypeKind::Bool:
    if (text == "true" || text == "false")
      return Value::of_bool(text == "true");
    bad("expected true or false, got '" + text + "'");
  case TypeKind::Str:
    return Value::of_str(text);
  case TypeKind::Enum:
    return enum_from_text(text, t, m);
  }
  bad("unsupported type");
}

InputSeq inputs_from_json(const json &j, const FlatInstance &flat) {
  if (!j.is_array())
    bad("inputs must be a list of per-tick objects");
  InputSeq seq;
  auto ports = flat.root_inputs();
  for (const auto &tick : j) {
    if (!tick.is_object())
      bad("each tick must be an object mapping port to value");
    TickInputs in;
    for (const auto &[key, val] : tick.items()) {
      const Port *port = nullptr;
      for (const Port *p : ports)
        if (p->name == key)
          port = p;
      if (!port)
        bad("'" + key + "' is not an input port of the root component");
      in[key] = value_from_json(val, port->type, *flat.model);
    }
    for (const Port *p : ports)
      in.try_emplace(p->name, Value());
    seq.push_back(std::move(in));
  }
  return seq;
}

json inputs_to_json(const InputSeq &inputs) {
  json out = json::array();
  for (const auto &tick : inputs) {
    json o = json::object();
    for (const auto &[k, v] : tick)
      o[k] = value_to_json(v);
    out.push_back(o);
  }
  return out;
}

json annotated_to_json(const AnnotatedValue &v) {
  return {{"conc", value_to_json(v.conc)}, {"sym", canonical_text(v.sym)}};
}

namespace {

json branch_to_json(const BranchRecord &b) {
  return {{"instance", b.instance},
          {"transition", b.transition},
          {"tick", b.tick},
          {"cond", to_string(b.cond)},
          {"taken", b.taken}};
}

json decision_to_json(const Decision &d) {
  return {{"instance", d.instance},
          {"tick", d.tick},
          {"count", d.count},
          {"choice", d.choice}};
}

} // namespace

json trace_to_json(const Trace &t) {
  json ticks = json::array();
  for (const auto &k : t.ticks) {
    json tk;
    tk["tick"] = k.index;
    tk["inputs"] = json::object();
    for (const auto &[p, v] : k.inputs)
      tk["inputs"][p] = annotated_to_json(v);
    tk["outputs"] = json::object();
    for (const auto &[p, v] : k.outputs)
      tk["outputs"][p] = annotated_to_json(v);
    tk["branches"] = json::array();
    for (const auto &b : k.branches)
      tk["branches"].push_back(branch_to_json(b));
    tk["decisions"] = json::array();
    for (const auto &d : k.decisions)
      tk["decisions"].push_back(decision_to_json(d));
    tk["taken"] = json::array();
    for (const auto &tt : k.taken)
      tk["taken"].push_back(tt.instance + "/" + tt.transition);
    tk["state"] = json::object();
    for (const auto &[inst, snap] : k.state) {
      json vars = json::object();
      for (const auto &[n, v] : snap.vars)
        vars[n] = annotated_to_json(v);
      tk["state"][inst.empty() ? "root" : inst] = {{"state", snap.state},
                                                  {"vars", vars}};
    }
    ticks.push_back(tk);
  }
  json pc = json::array();
  for (const auto &b : t.path_condition.records)
    pc.push_back(to_string(b.signed_cond()));
  return {{"ticks", ticks},
          {"path_condition", pc},
          {"oracle", t.oracle_used.choices}};
}

json interesting_to_json(const InterestingInput &w) {
  json outs = json::array();
  for (std::size_t k = 0; k < w.outputs_concrete.size(); ++k) {
    json o = json::object();
    for (const auto &[p, v] : w.outputs_concrete[k])
      o[p] = {{"conc", value_to_json(v)},
              {"sym", to_string(w.outputs_symbolic[k].at(p))}};
    outs.push_back(o);
  }
  json pc = json::array();
  for (const auto &b : w.path_condition.records)
    pc.push_back(to_string(b.signed_cond()));
  return {{"inputs", inputs_to_json(w.inputs)},
          {"outputs", outs},
          {"path_condition", pc},
          {"oracle", w.oracle.choices}};
}

std::vector<Value> parse_root_args(const std::string &text, const Model &m) {
  const Component *root = m.find_component(m.root);
  std::vector<std::string> parts;
  if (!text.empty()) {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
      parts.push_back(item);
  }
  if (!root || parts.size() != root->params.size())
    throw Error("ARITY_MISMATCH",
                "root expects " +
                    std::to_string(root ? root->params.size() : 0) +
                    " argument(s), got " + std::to_string(parts.size()));
  std::vector<Value> out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    out.push_back(value_from_text(parts[i], root->params[i].type, m));
  return out;
}

} // namespace ccl
