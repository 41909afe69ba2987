#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "walt/stabilizer.hpp"
#include "walt/trace.hpp"

namespace walt {

namespace step {

struct Navigation {
  std::string url_template;
  bool operator==(const Navigation&) const = default;
};

enum class InteractionKind { Click, Input, SelectChange, KeyPress, Scroll, Wait };

/// Deterministic UI interaction against a stable locator. `wait` is the only
/// kind without a locator.
struct Interaction {
  InteractionKind kind = InteractionKind::Click;
  std::optional<StableLocator> locator;
  // value for input, selected text for select_change, key for key_press;
  // may contain {param} placeholders.
  std::optional<std::string> value;
  int scroll_x = 0;
  int scroll_y = 0;
  double seconds = 0;
  // Free-text hint handed to a reasoner if this step cannot be replayed.
  std::string recovery_hint;
  bool operator==(const Interaction&) const = default;
};

struct Extraction {
  std::string goal;
  std::string output;
  bool operator==(const Extraction&) const = default;
};

struct Agentic {
  std::string task;
  int max_steps = 3;
  bool operator==(const Agentic&) const = default;
};

}  // namespace step

enum class StepKind { Navigation, Interaction, Extraction, Agentic, Skip };

struct Step {
  std::variant<step::Navigation, step::Interaction, step::Extraction, step::Agentic> body;
  std::string description;
  // Trace action the step was generated from, if any.
  std::optional<ActionKey> source;

  StepKind kind() const { return static_cast<StepKind>(body.index()); }
  bool is_agentic() const { return kind() == StepKind::Agentic; }
  bool operator==(const Step&) const = default;
};

/// Ordered, branch-free program of steps plus its parameter names.
struct ActionScript {
  std::vector<Step> steps;
  std::vector<std::string> params;

  std::size_t agentic_count() const;
  bool operator==(const ActionScript&) const = default;
};

inline constexpr int kMinAgenticSteps = 1;
inline constexpr int kMaxAgenticSteps = 8;

std::string_view to_string(step::InteractionKind kind);
std::string_view to_string(StepKind kind);

/// Placeholder names referenced anywhere in one step.
std::vector<std::string> step_placeholders(const Step& step);
/// Placeholder names referenced by the script, in first-use order.
std::vector<std::string> script_placeholders(const ActionScript& script);

/// Checks ≥1 step, duplicate-free params, agentic budgets, locators, and that
/// every placeholder is a declared param. Throws UnboundPlaceholder or
/// std::invalid_argument.
void validate_script(const ActionScript& script);

std::string serialize_script(const ActionScript& script);
ActionScript parse_script(std::string_view raw);

}  // namespace walt
