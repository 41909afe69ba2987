#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace walt {

// -- candidates -------------------------------------------------------------

enum class ElementType { Input, Select, Button, Link, Textarea };

struct ElementHint {
  ElementType type = ElementType::Input;
  std::string purpose;
  std::optional<std::vector<std::string>> options;
  bool operator==(const ElementHint&) const = default;
};

/// A proposed tool: start URL, element hints and the goal it accomplishes.
struct ToolCandidate {
  std::string name;
  std::string start_url;
  std::string description;
  std::vector<ElementHint> elements;
  bool operator==(const ToolCandidate&) const = default;
};

std::vector<ToolCandidate> parse_candidates(std::string_view raw);
std::string serialize_candidates(const std::vector<ToolCandidate>& candidates);
void validate_candidate(const ToolCandidate& candidate);

std::string_view to_string(ElementType type);
std::optional<ElementType> element_type_from_string(std::string_view text);

// -- traces -----------------------------------------------------------------

struct AgentBrain {
  std::string evaluation_previous_goal;
  std::string memory;
  std::string next_goal;
  bool operator==(const AgentBrain&) const = default;
};

namespace action {
struct GoToUrl {
  std::string url;
  bool operator==(const GoToUrl&) const = default;
};
struct Click {
  bool operator==(const Click&) const = default;
};
struct InputText {
  std::string text;
  bool operator==(const InputText&) const = default;
};
struct SelectChange {
  std::string selected_text;
  bool operator==(const SelectChange&) const = default;
};
struct KeyPress {
  std::string key;
  bool operator==(const KeyPress&) const = default;
};
struct Scroll {
  int dx = 0;
  int dy = 0;
  bool operator==(const Scroll&) const = default;
};
struct ExtractContent {
  std::string goal;
  bool operator==(const ExtractContent&) const = default;
};
struct Wait {
  double seconds = 0;
  bool operator==(const Wait&) const = default;
};
}  // namespace action

enum class ActionKind {
  GoToUrl,
  ClickElement,
  InputText,
  SelectChange,
  KeyPress,
  Scroll,
  ExtractContent,
  Wait
};

using ActionPayload =
    std::variant<action::GoToUrl, action::Click, action::InputText, action::SelectChange,
                 action::KeyPress, action::Scroll, action::ExtractContent, action::Wait>;

struct ActionRecord {
  ActionPayload payload;
  bool success = true;
  std::optional<std::string> extracted;
  // HTTP method of the request this action caused, when it caused one.
  std::optional<std::string> http_method;

  ActionKind kind() const { return static_cast<ActionKind>(payload.index()); }
  bool operator==(const ActionRecord&) const = default;
};

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> action_kind_from_string(std::string_view text);

/// Actions that target a DOM element and therefore carry an interacted element.
bool is_ui_interaction(ActionKind kind);

struct BoundingBox {
  double x = 0, y = 0, width = 0, height = 0;
  bool operator==(const BoundingBox&) const = default;
};

struct InteractedElement {
  std::string element_hash;
  std::string tag;
  std::map<std::string, std::string> attributes;
  std::vector<int> dom_path;
  std::string css_selector;
  std::vector<std::string> alternates;
  std::optional<BoundingBox> bounding_box;
  std::string text;
  std::string parent_tag;
  // Identifier of the enclosing form (its id, else its action).
  std::optional<std::string> form;
  // Option texts in DOM order, for select elements.
  std::vector<std::string> options;
  // Option marked as pre-selected in the markup, when captured.
  std::optional<std::string> selected_default;
  // Whether the control carries a required marker; absent when not captured.
  std::optional<bool> required;
  bool operator==(const InteractedElement&) const = default;
};

struct TraceStep {
  std::string url;
  std::string title;
  AgentBrain brain;
  std::vector<ActionRecord> actions;
  std::vector<InteractedElement> interacted;
  bool operator==(const TraceStep&) const = default;
};

struct ExecutionTrace {
  std::string candidate_name;
  std::vector<TraceStep> steps;
  std::map<std::string, std::string> param_bindings;
  bool operator==(const ExecutionTrace&) const = default;
};

/// Position of one action inside a trace.
struct ActionKey {
  int step = 0;
  int action = 0;
  auto operator<=>(const ActionKey&) const = default;
};

/// Throws MalformedTrace or AlignmentError.
ExecutionTrace parse_trace(std::string_view raw);
std::string serialize_trace(const ExecutionTrace& trace);
/// Checks every invariant on an in-memory trace (same errors as parse_trace).
void validate_trace(const ExecutionTrace& trace);

/// Element attached to a UI action, or nullptr for non-UI actions.
const InteractedElement* element_for(const ExecutionTrace& trace, ActionKey key);

/// Visits every action in trace order.
template <typename Fn>
void for_each_action(const ExecutionTrace& trace, Fn&& fn) {
  for (int s = 0; s < static_cast<int>(trace.steps.size()); ++s) {
    const auto& step = trace.steps[s];
    for (int a = 0; a < static_cast<int>(step.actions.size()); ++a) {
      fn(ActionKey{s, a}, step.actions[a]);
    }
  }
}

}  // namespace walt
