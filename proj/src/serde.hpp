#pragma once

// JSON converters shared between translation units. Not installed.

#include <string>

#include "json_io.hpp"
#include "walt/script.hpp"
#include "walt/stabilizer.hpp"
#include "walt/trace.hpp"

namespace walt::serde {

using jsonio::Json;

Json to_json(const ToolCandidate& c);
ToolCandidate candidate_from_json(const Json& j, const std::string& path);

Json to_json(const ActionRecord& a);
ActionRecord action_from_json(const Json& j, const std::string& path);

Json to_json(const InteractedElement& e);
InteractedElement element_from_json(const Json& j, const std::string& path);

Json to_json(const ExecutionTrace& t);
ExecutionTrace trace_from_json(const Json& doc, const std::string& root);

Json to_json(const StableLocator& l);
StableLocator locator_from_json(const Json& j, const std::string& element_hash,
                                const std::string& path);

Json to_json(const Step& s);
Step step_from_json(const Json& j, const std::string& path);

Json to_json(const ActionScript& script);
ActionScript script_from_json(const Json& j, const std::string& path);

}  // namespace walt::serde
