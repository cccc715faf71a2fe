#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccl/expr.hpp"
#include "ccl/value.hpp"

namespace ccl {

enum class Direction { In, Out };

struct Port {
  std::string name;
  Direction direction = Direction::In;
  TypeTag type;
  bool delayed = false;
  std::optional<Value> initial; // present iff delayed
  SourceSpan span;
};

struct Assignment {
  std::string target;
  Expr value;
};

struct Emission {
  std::string port;
  Expr value;
};

struct Transition {
  std::string id;
  std::string source;
  std::string target;
  Expr guard;
  std::vector<Assignment> actions;
  std::vector<Emission> emissions;
  SourceSpan span;
};

struct VarDecl {
  std::string name;
  TypeTag type;
  Value initial;
  SourceSpan span;
};

struct Automaton {
  std::string initial;
  std::vector<VarDecl> vars;
  std::vector<Transition> transitions;

  /// States in order of first mention (initial first, then transition
  /// endpoints in declaration order).
  std::vector<std::string> states() const;
};

struct SubInstance {
  std::string name;
  std::string component;
  std::vector<Expr> args;
  SourceSpan span;
};

/// `instance.port`, or an own port of the enclosing component when
/// `instance` is empty.
struct Endpoint {
  std::string instance;
  std::string port;
  std::string to_string() const {
    return instance.empty() ? port : instance + "." + port;
  }
  friend bool operator==(const Endpoint &, const Endpoint &) = default;
};

struct Connector {
  Endpoint from;
  Endpoint to;
  SourceSpan span;
};

struct Composite {
  std::vector<SubInstance> subcomponents;
  std::vector<Connector> connectors;
};

struct Parameter {
  std::string name;
  TypeTag type;
};

struct Component {
  std::string name;
  bool is_root = false;
  std::vector<Parameter> params;
  std::vector<Port> ports;
  std::variant<Automaton, Composite> body;
  SourceSpan span;

  bool is_atomic() const { return std::holds_alternative<Automaton>(body); }
  const Automaton &automaton() const { return std::get<Automaton>(body); }
  const Composite &composite() const { return std::get<Composite>(body); }
  const Port *find_port(const std::string &port) const;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> variants;
  SourceSpan span;
};

struct Model {
  std::vector<EnumDecl> enums;
  std::vector<Component> components;
  std::string root;

  const Component *find_component(const std::string &name) const;
  const EnumDecl *find_enum(const std::string &name) const;
  /// First variant of an enum, or "" when unknown.
  std::string first_variant(const std::string &enum_name) const;
};

struct Diagnostic {
  std::string code;
  std::string message;
  SourceSpan span;
};

using ValidationReport = std::vector<Diagnostic>;

/// Reports every structural and typing violation. Empty means valid.
ValidationReport validate_model(const Model &m);

/// Structural equality ignoring source spans.
bool models_equal(const Model &a, const Model &b);

/// Static type of an expression in a component scope, or nullopt with a
/// message in `error`.
std::optional<TypeTag> infer_type(
    const Expr &e, const std::map<std::string, TypeTag> &scope,
    std::string *error = nullptr);

// ---------------------------------------------------------------------------
// Flattened instance tree

/// Reference to a port of the flattened model. `atomic == -1` names a root
/// port.
struct PortRef {
  int atomic = -1;
  std::string port;
  friend bool operator==(const PortRef &, const PortRef &) = default;
  friend auto operator<=>(const PortRef &, const PortRef &) = default;
};

struct InstanceNode {
  std::string path; // "" for the root, "a.b" below it
  std::string component;
  std::map<std::string, Value> params;
  std::vector<InstanceNode> children;
};

struct AtomicInstance {
  std::string path;
  const Component *component = nullptr;
  std::map<std::string, Value> params;
  /// Source of every in-port.
  std::map<std::string, PortRef> inputs;
};

/// Model with parameters bound and connectors resolved down to atomic
/// ports. Holds a copy of the model so component pointers stay valid.
struct FlatInstance {
  std::shared_ptr<const Model> model;
  InstanceNode tree;
  std::vector<AtomicInstance> atomics;
  /// Firing order (indices into atomics), topological over non-delayed
  /// connections.
  std::vector<int> order;
  /// Source of every root out-port.
  std::map<std::string, PortRef> outputs;

  const Component &root() const;
  std::vector<const Port *> root_inputs() const;
  std::vector<const Port *> root_outputs() const;
  std::size_t transition_count() const;
  std::size_t state_count() const;
};

/// Binds parameters and resolves connectors. Throws Error with codes
/// ARITY_MISMATCH, TYPE_MISMATCH, or INVALID_MODEL.
FlatInstance flatten(const Model &m, const std::vector<Value> &root_args);

/// Instance-tree isomorphism (paths, components, bound parameters).
bool instance_trees_equal(const InstanceNode &a, const InstanceNode &b);

} // namespace ccl
