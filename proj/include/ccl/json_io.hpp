#pragma once

#include <json.hpp>

#include "ccl/executor.hpp"

namespace ccl {

using json = nlohmann::json;

/// Ints as numbers; rationals as exact strings ("1.5", "1/3"); enums as
/// "E::V"; Null as null.
json value_to_json(const Value &v);

/// Reads a value of the given type. Rationals accept numbers or exact
/// strings; enums accept "V" or "E::V". Throws Error("BAD_INPUT").
Value value_from_json(const json &j, const TypeTag &t, const Model &m);

/// Parses a scalar given as text (command-line arguments).
Value value_from_text(const std::string &text, const TypeTag &t,
                      const Model &m);

/// List of per-tick maps port -> value.
InputSeq inputs_from_json(const json &j, const FlatInstance &flat);
json inputs_to_json(const InputSeq &inputs);

json annotated_to_json(const AnnotatedValue &v);
json trace_to_json(const Trace &t);
json interesting_to_json(const InterestingInput &w);

/// Comma-separated root arguments, typed by the root parameters.
std::vector<Value> parse_root_args(const std::string &text, const Model &m);

} // namespace ccl
