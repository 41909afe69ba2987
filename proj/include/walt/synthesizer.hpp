#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walt/schema.hpp"
#include "walt/script.hpp"
#include "walt/stabilizer.hpp"
#include "walt/trace.hpp"

namespace walt {

/// Picks the step kind for one trace action. `essential` only matters for UI
/// actions without a locator.
StepKind classify_action(const ActionRecord& record, const std::optional<StableLocator>& locator,
                         bool essential = false);

/// An unstable action is essential when something later depends on it: a
/// later extraction, or a submit of the same form.
bool is_essential(const ExecutionTrace& trace, ActionKey key);

/// Bindings used for templating: the trace's own, else values inferred from
/// input/select actions keyed by element name (or id).
std::map<std::string, std::string> effective_bindings(const StabilizedTrace& stab);

/// Pass 1. Throws EmptyScript or UnboundPlaceholder.
ActionScript synthesize_script(const StabilizedTrace& stab, const ToolCandidate& candidate);

enum class ExpectationKind { Completes, ExtractionNonempty, UrlMatches };

struct Expectation {
  ExpectationKind kind = ExpectationKind::Completes;
  std::string pattern;  // url_matches only; may hold {param} placeholders
  bool operator==(const Expectation&) const = default;
};

struct TestCase {
  Inputs inputs;
  std::vector<Expectation> expectations;
  bool operator==(const TestCase&) const = default;
};

struct TestSuite {
  std::vector<TestCase> cases;
  bool operator==(const TestSuite&) const = default;
};

std::string_view to_string(ExpectationKind kind);

/// Case 1 replays the demo bindings; one more case per enum option the demo
/// did not exercise.
TestSuite extract_test_inputs(const ExecutionTrace& trace, const InputSchema& schema);

}  // namespace walt
