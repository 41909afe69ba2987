#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walt/backend.hpp"
#include "walt/reasoner.hpp"
#include "walt/schema.hpp"
#include "walt/script.hpp"
#include "walt/stabilizer.hpp"

namespace walt {

struct QueryTemplateParam {
  std::string key;
  // Either a literal or exactly "{param}".
  std::string value_template;
  bool operator==(const QueryTemplateParam&) const = default;
};

struct UrlTemplate {
  std::string origin;
  std::string base_path;  // may contain {param} segments
  std::vector<QueryTemplateParam> query_params;
  // param -> trace step index whose URL showed the value
  std::map<std::string, int> evidence;

  std::string to_string() const;
  bool operator==(const UrlTemplate&) const = default;
};

/// Inclusive range of script step indices.
struct ScriptRange {
  int first = 0;
  int last = 0;
  bool operator==(const ScriptRange&) const = default;
};

struct InferredTemplate {
  ScriptRange range;
  UrlTemplate url;
};

/// Finds the longest run of Interaction steps that ends in a URL change and
/// explains the new URL with the demo bindings. None when the run had side
/// effects or the new URL carries unexplained or ambiguous values.
std::optional<InferredTemplate> infer_url_template(const ActionScript& script, const StabilizedTrace& stab);

/// `script` with the inferred range replaced by one Navigation step.
ActionScript apply_promotion(const ActionScript& script, const InferredTemplate& inferred);

/// Lines of an extraction, trimmed, blanks dropped.
std::vector<std::string> normalize_items(const std::string& text);

struct PromotionResult {
  ActionScript script;
  bool promoted = false;
  std::string reason;
};

/// Keeps the promotion only if both scripts, replayed on fresh backends from
/// `factory` with `demo_inputs`, produce equal normalized extractions.
/// Throws BackendUnavailable when no factory is available.
PromotionResult promote_script(const ActionScript& script, const InferredTemplate& inferred,
                               const BackendFactory& factory, const Inputs& demo_inputs,
                               Reasoner* reasoner = nullptr);

}  // namespace walt
