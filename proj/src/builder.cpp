#include "walt/builder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "walt/errors.hpp"
#include "walt/registry.hpp"
#include "walt/synthesizer.hpp"
#include "walt/url_promoter.hpp"

namespace walt {

namespace {

constexpr double kWaitIncrement = 1.0;
constexpr double kMaxWait = 5.0;

struct Refinements {
  std::set<std::string> stale_selectors;
  std::map<std::string, std::vector<std::string>> rejected;
  std::vector<FeedbackItem> amendments;
  std::map<ActionKey, double> wait_before;
  bool promotion_demoted = false;
};

void absorb(Refinements& r, const Tool& tool, const FeedbackItem& item) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, feedback::SelectorDrift>) {
          r.stale_selectors.insert(f.selectors.begin(), f.selectors.end());
        } else if constexpr (std::is_same_v<T, feedback::UncoveredEnum>) {
          if (f.offered_by_site) {
            r.amendments.push_back(f);
          } else {
            auto& values = r.rejected[f.field];
            if (std::find(values.begin(), values.end(), f.value) == values.end()) values.push_back(f.value);
          }
        } else if constexpr (std::is_same_v<T, feedback::RequirednessMismatch>) {
          r.amendments.push_back(f);
        } else if constexpr (std::is_same_v<T, feedback::SemanticMismatch>) {
          if (tool.promoted()) r.promotion_demoted = true;
        } else if constexpr (std::is_same_v<T, feedback::Timeout>) {
          if (f.step >= 0 && f.step < static_cast<int>(tool.script.steps.size())) {
            if (const auto& src = tool.script.steps[f.step].source) {
              auto& seconds = r.wait_before[*src];
              seconds = std::min(seconds + kWaitIncrement, kMaxWait);
            }
          }
        }
      },
      item);
}

bool suite_valid(const InputSchema& schema, const TestCase& c) { return validate_input(schema, c.inputs).empty(); }

}  // namespace

ActionScript insert_waits(const ActionScript& script, const std::map<ActionKey, double>& waits) {
  if (waits.empty()) return script;
  ActionScript out;
  out.params = script.params;
  for (const auto& s : script.steps) {
    auto it = s.source ? waits.find(*s.source) : waits.end();
    if (it != waits.end()) {
      step::Interaction wait;
      wait.kind = step::InteractionKind::Wait;
      wait.seconds = it->second;
      out.steps.push_back(Step{wait, "Wait for the page to settle", std::nullopt});
    }
    out.steps.push_back(s);
  }
  return out;
}

BuildResult build_tool(const ToolCandidate& candidate, const TraceSource& trace_source, BuildBudget budget,
                       const BackendFactory& factory, Reasoner* reasoner, Registry* staging,
                       const BuildOptions& options) {
  BuildResult result;
  Refinements refine;
  for (int attempt = 1; attempt <= budget.max_attempts; ++attempt) {
    AttemptRecord record;
    record.attempt = attempt;
    std::string stage = "demonstrate";
    try {
      auto trace = trace_source(candidate, attempt);
      stage = "stabilize";
      auto stab = stabilize_trace(trace, options.policy);
      for (auto& [key, locator] : stab.locators) demote_stale_selectors(locator, refine.stale_selectors);
      stage = "synthesize";
      auto ui = insert_waits(synthesize_script(stab, candidate), refine.wait_before);
      record.pass1_step_count = static_cast<int>(ui.steps.size());
      stage = "schema";
      auto schema = induce_schema(trace, ui, candidate);
      for (const auto& item : refine.amendments) {
        try {
          schema = amend_schema(schema, item);
        } catch (const UnknownField&) {
        }
      }
      for (const auto& [field, values] : refine.rejected) schema = drop_options(schema, field, values);
      stage = "suite";
      auto suite = extract_test_inputs(trace, schema);
      std::erase_if(suite.cases, [&](const TestCase& c) { return !suite_valid(schema, c); });
      if (suite.cases.empty()) throw Error("no schema-valid test case");

      Tool tool{candidate.name, candidate.description, candidate.start_url, ui, schema, std::nullopt, suite};
      if (options.allow_promotion && !refine.promotion_demoted) {
        stage = "promote";
        if (auto inferred = infer_url_template(ui, stab)) {
          try {
            auto pr = promote_script(ui, *inferred, factory, suite.cases.front().inputs, reasoner);
            record.promotion_note = pr.reason;
            if (pr.promoted) {
              tool.script = pr.script;
              tool.ui_script = ui;
            }
          } catch (const BackendUnavailable& e) {
            record.promotion_note = e.what();
          }
        } else {
          record.promotion_note = "no URL template inferred";
        }
      } else if (refine.promotion_demoted) {
        record.promotion_note = "demoted after semantic mismatch";
      }
      record.promoted = tool.promoted();
      stage = "assemble";
      check_bijection(tool.script, tool.schema);
      if (staging) staging->stage(tool);
      stage = "validate";
      auto report = validate_tool(tool, suite, factory, reasoner);
      auto objective = compute_objective(report);
      record.objective = objective;
      record.feedback = report.feedback;
      record.unclassified = report.unclassified;
      if (!result.best || objective < *result.best) {
        result.best = objective;
      }
      if (objective.accepted()) {
        record.outcome = "validated";
        result.history.push_back(std::move(record));
        result.success = true;
        result.tool = std::move(tool);
        result.report = std::move(report);
        return result;
      }
      record.outcome = "rejected";
      for (const auto& item : report.feedback) absorb(refine, tool, item);
    } catch (const std::exception& e) {
      record.outcome = stage;
      record.error = e.what();
    }
    result.history.push_back(std::move(record));
  }
  return result;
}

}  // namespace walt
