#pragma once

#include <optional>
#include <string>

#include "walt/schema.hpp"
#include "walt/script.hpp"
#include "walt/synthesizer.hpp"

namespace walt {

/// A callable high-level action: script plus validated input contract.
struct Tool {
  std::string name;
  std::string description;
  std::string start_url;
  ActionScript script;
  InputSchema schema;
  // Pass-1 script kept as the equivalence oracle when `script` is URL-promoted.
  std::optional<ActionScript> ui_script;
  TestSuite suite;

  bool promoted() const { return ui_script.has_value(); }
  bool operator==(const Tool&) const = default;
};

/// Throws std::invalid_argument unless every script placeholder has exactly
/// one schema field and vice versa.
void check_bijection(const ActionScript& script, const InputSchema& schema);

}  // namespace walt
