#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "walt/backend.hpp"
#include "walt/executor.hpp"
#include "walt/feedback.hpp"
#include "walt/reasoner.hpp"
#include "walt/synthesizer.hpp"
#include "walt/tool.hpp"

namespace walt {

/// Exact non-negative fraction; compared by cross-multiplication, so 0/5 and
/// 0/6 are equal.
struct Ratio {
  long long num = 0;
  long long den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }
  bool is_zero() const { return num == 0; }

  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    return a.num * b.den <=> b.num * a.den;
  }
};

/// Agentic steps over total steps of the script.
Ratio agentic_ratio(const ActionScript& script);

struct CaseResult {
  TestCase test_case;
  ExecutionOutcome outcome;
  bool passed = false;
  std::optional<FeedbackItem> feedback;
  std::optional<std::string> unclassified;
  bool operator==(const CaseResult&) const = default;
};

struct ValidationReport {
  Ratio fail_rate;
  int step_count = 0;
  Ratio agentic_ratio;
  std::vector<CaseResult> cases;
  std::vector<FeedbackItem> feedback;
  std::vector<std::string> unclassified;

  int failing_cases() const;
  bool operator==(const ValidationReport&) const = default;
};

/// Lexicographic (fail_rate, step_count, agentic_ratio); smaller is better.
struct Objective {
  Ratio fail_rate;
  int step_count = 0;
  Ratio agentic_ratio;

  bool accepted() const { return fail_rate.is_zero(); }
  friend bool operator==(const Objective&, const Objective&) = default;
  friend std::strong_ordering operator<=>(const Objective& a, const Objective& b) {
    if (auto c = a.fail_rate <=> b.fail_rate; c != 0) return c;
    if (auto c = a.step_count <=> b.step_count; c != 0) return c;
    return a.agentic_ratio <=> b.agentic_ratio;
  }
};

Objective compute_objective(const ValidationReport& report);

/// Maps a failed outcome to structured feedback. Throws UnclassifiedFailure.
FeedbackItem diagnose_failure(const ExecutionOutcome& outcome, const TestCase& test_case, const Tool& tool);

/// Runs every case on a fresh backend; promoted tools are also checked
/// against their UI script on the same inputs.
ValidationReport validate_tool(const Tool& tool, const TestSuite& suite, const BackendFactory& factory,
                               Reasoner* reasoner);

/// Assembles the report fields from per-case results.
ValidationReport summarize(const ActionScript& script, std::vector<CaseResult> cases);

}  // namespace walt
