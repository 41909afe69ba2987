#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walt/backend.hpp"
#include "walt/reasoner.hpp"
#include "walt/schema.hpp"
#include "walt/tool.hpp"

namespace walt {

enum class FailureKind {
  LocatorUnresolved,
  NavigationFailed,
  AgenticBudgetExhausted,
  Timeout,
  HttpError,
  InvalidOption,
  BadTemplate
};

std::string_view to_string(FailureKind kind);

/// Raw description of why a step failed.
struct StepFailure {
  int step = 0;
  FailureKind kind = FailureKind::LocatorUnresolved;
  std::string message;
  std::vector<std::string> selectors;
  std::map<std::string, std::string> field_errors;
  // Rendered value the step tried to enter or select.
  std::optional<std::string> value;
  int http_status = 0;
  bool operator==(const StepFailure&) const = default;
};

struct StepResult {
  std::optional<StepFailure> failure;
  std::optional<std::pair<std::string, std::string>> output;
  std::optional<std::vector<std::string>> observed_options;
  int backend_calls = 0;

  bool ok() const { return !failure.has_value(); }
};

enum class OutcomeStatus { Success, Failed };

struct ExecutionOutcome {
  OutcomeStatus status = OutcomeStatus::Success;
  int steps_executed = 0;
  int agentic_steps_executed = 0;
  std::map<std::string, std::string> outputs;
  std::optional<StepFailure> failure;
  bool fallback_used = false;
  int backend_calls = 0;
  // Live option texts seen by select steps, keyed by step index.
  std::map<int, std::vector<std::string>> observed_options;
  std::string final_url;

  bool succeeded() const { return status == OutcomeStatus::Success; }
  bool operator==(const ExecutionOutcome&) const = default;
};

struct ExecutorOptions {
  double retry_wait_seconds = 0.2;
};

StepResult execute_step(const Step& step, int index, const Inputs& bindings, ExecutionBackend& backend,
                        Reasoner* reasoner, const ExecutorOptions& options = {});

/// Runs steps in order from `first_step`, stopping at the first failure.
ExecutionOutcome execute_script(const ActionScript& script, const Inputs& inputs,
                                ExecutionBackend& backend, Reasoner* reasoner,
                                const ExecutorOptions& options = {}, int first_step = 0);

/// Throws InputInvalid before touching the backend when inputs violate the
/// schema; every other failure is reported in the outcome.
ExecutionOutcome execute_tool(const Tool& tool, const Inputs& inputs, ExecutionBackend& backend,
                              Reasoner* reasoner, const ExecutorOptions& options = {});

inline constexpr int kDefaultFallbackBudget = 20;

/// Hands the rest of the tool's goal to the reasoner from the failing step,
/// then runs the remaining extraction steps. Throws FallbackExhausted.
ExecutionOutcome agentic_fallback(const Tool& tool, const Inputs& inputs, const ExecutionOutcome& failed,
                                  ExecutionBackend& backend, Reasoner* reasoner,
                                  int budget = kDefaultFallbackBudget);

/// execute_tool, then agentic_fallback on failure when a reasoner is given.
ExecutionOutcome execute_with_fallback(const Tool& tool, const Inputs& inputs, ExecutionBackend& backend,
                                       Reasoner* reasoner, int budget = kDefaultFallbackBudget);

}  // namespace walt
