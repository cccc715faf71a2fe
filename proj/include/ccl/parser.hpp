#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccl/model.hpp"

namespace ccl {

struct ParseResult {
  std::optional<Model> model;
  std::vector<Diagnostic> errors; // positioned; empty on success

  bool ok() const { return model.has_value(); }
};

/// Parses CCL text. Syntax errors, duplicate names and unknown component or
/// enum references are reported as positioned diagnostics.
ParseResult parse_model(const std::string &text,
                        const std::string &file = "<input>");

/// Parses a standalone expression.
std::optional<Expr> parse_expr(const std::string &text,
                               std::string *error = nullptr);

/// Deterministic rendering; parse_model(render_model(m)) equals m.
std::string render_model(const Model &m);

/// Reads and parses a file; throws Error("IO") or Error("PARSE").
Model load_model_file(const std::string &path);

} // namespace ccl
