#pragma once

#include <string>

#include "ccl/model.hpp"
#include "ccl/parser.hpp"

namespace ccl::testutil {

inline std::string model_path(const std::string &name) {
  return std::string(CCL_SOURCE_DIR) + "/models/" + name;
}

inline FlatInstance load_flat(const std::string &name,
                              std::vector<Value> args = {}) {
  return flatten(load_model_file(model_path(name)), args);
}

inline FlatInstance student_vote(bool alt = false) {
  return load_flat(alt ? "student_vote_alt.arc" : "student_vote.arc",
                   {Value::of_int(400000)});
}

} // namespace ccl::testutil
