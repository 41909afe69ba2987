#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walt/backend.hpp"
#include "walt/reasoner.hpp"
#include "walt/tool.hpp"
#include "walt/validator.hpp"

namespace walt {

class Registry;

/// Produces the demonstration for an attempt (1-based).
using TraceSource = std::function<ExecutionTrace(const ToolCandidate&, int attempt)>;

struct BuildBudget {
  int max_attempts = 4;
};

struct BuildOptions {
  bool allow_promotion = true;
  StabilityPolicy policy;
};

/// What one demonstrate → generate → validate iteration did.
struct AttemptRecord {
  int attempt = 0;
  // "validated", "rejected", or the stage that threw
  std::string outcome;
  std::string error;
  std::optional<Objective> objective;
  bool promoted = false;
  std::string promotion_note;
  int pass1_step_count = 0;
  std::vector<FeedbackItem> feedback;
  std::vector<std::string> unclassified;
  bool operator==(const AttemptRecord&) const = default;
};

struct BuildResult {
  bool success = false;
  std::optional<Tool> tool;
  std::optional<ValidationReport> report;
  std::vector<AttemptRecord> history;
  // Best objective seen across attempts.
  std::optional<Objective> best;

  int attempts() const { return static_cast<int>(history.size()); }
};

/// Runs the refinement loop. Failure is reported in the result, never thrown.
/// When `staging` is given each generated tool is recorded there before
/// validation.
BuildResult build_tool(const ToolCandidate& candidate, const TraceSource& trace_source, BuildBudget budget,
                       const BackendFactory& factory, Reasoner* reasoner, Registry* staging = nullptr,
                       const BuildOptions& options = {});

/// Adds a wait of the mapped length before every step whose source is a key.
ActionScript insert_waits(const ActionScript& script, const std::map<ActionKey, double>& waits);

}  // namespace walt
