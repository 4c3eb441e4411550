#pragma once

#include "levyou/json_io.hpp"

#include <string>
#include <vector>

namespace levyou {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Built-in worked examples: example2, example3, example4-first,
/// example4-modified, curve-measure.
const std::vector<std::string>& example_ids();
/// Config document ({model, measure, run}) of a built-in example.
Json example_config(const std::string& id);
/// Runs the example's checks; ConfigError for an unknown id.
std::vector<CheckResult> reproduce(const std::string& id);

}  // namespace levyou
