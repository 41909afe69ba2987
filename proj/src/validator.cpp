#include "walt/validator.hpp"

#include <algorithm>

#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

// Param whose placeholder is the whole value of `value_template`.
std::optional<std::string> sole_placeholder(const std::optional<std::string>& value_template) {
  if (!value_template) return std::nullopt;
  auto names = placeholders_in(*value_template);
  if (names.size() != 1 || *value_template != "{" + names[0] + "}") return std::nullopt;
  return names[0];
}

bool selector_names_field(const std::string& selector, const std::string& field) {
  return selector.find("[name=" + field + "]") != std::string::npos ||
         selector.find("[name=\"" + field + "\"]") != std::string::npos || selector == "#" + field;
}

// Schema param a site form field corresponds to.
std::optional<std::string> param_for_site_field(const Tool& tool, const std::string& site_field) {
  auto scan = [&](const ActionScript& script) -> std::optional<std::string> {
    for (const auto& s : script.steps) {
      if (const auto* in = std::get_if<step::Interaction>(&s.body)) {
        auto p = sole_placeholder(in->value);
        if (!p || !in->locator) continue;
        for (const auto& sel : in->locator->all_selectors()) {
          if (selector_names_field(sel, site_field)) return p;
        }
      } else if (const auto* nav = std::get_if<step::Navigation>(&s.body)) {
        auto q = nav->url_template.find('?');
        if (q == std::string::npos) continue;
        std::size_t start = q + 1;
        while (start <= nav->url_template.size()) {
          auto end = nav->url_template.find('&', start);
          if (end == std::string::npos) end = nav->url_template.size();
          auto pair = nav->url_template.substr(start, end - start);
          auto eq = pair.find('=');
          if (eq != std::string::npos && url_decode(pair.substr(0, eq)) == site_field) {
            if (auto p = sole_placeholder(pair.substr(eq + 1))) return p;
          }
          start = end + 1;
        }
      }
    }
    return std::nullopt;
  };
  if (auto p = scan(tool.script)) return p;
  if (tool.ui_script) {
    if (auto p = scan(*tool.ui_script)) return p;
  }
  if (tool.schema.field(site_field)) return site_field;
  return std::nullopt;
}

const std::string* input_of(const TestCase& c, const std::string& field) {
  auto it = c.inputs.find(field);
  return it == c.inputs.end() ? nullptr : &it->second;
}

std::optional<FeedbackItem> uncovered_live_option(const Tool& tool, const ActionScript& script,
                                                  const ExecutionOutcome& outcome) {
  for (const auto& [index, options] : outcome.observed_options) {
    if (index < 0 || index >= static_cast<int>(script.steps.size())) continue;
    const auto* in = std::get_if<step::Interaction>(&script.steps[index].body);
    auto p = in ? sole_placeholder(in->value) : std::nullopt;
    const auto* f = p ? tool.schema.field(*p) : nullptr;
    if (!f || f->type != ValueType::Enum) continue;
    for (const auto& o : options) {
      if (std::find(f->options.begin(), f->options.end(), o) == f->options.end()) {
        return feedback::UncoveredEnum{*p, o, true};
      }
    }
  }
  return std::nullopt;
}

Inputs with_defaults(const Tool& tool, Inputs inputs) {
  for (const auto& f : tool.schema.fields) {
    if (!inputs.count(f.name) && f.default_value) inputs[f.name] = *f.default_value;
  }
  return inputs;
}

}  // namespace

Ratio agentic_ratio(const ActionScript& script) {
  return {static_cast<long long>(script.agentic_count()), static_cast<long long>(std::max<std::size_t>(script.steps.size(), 1))};
}

int ValidationReport::failing_cases() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.passed; }));
}

Objective compute_objective(const ValidationReport& report) {
  return {report.fail_rate, report.step_count, report.agentic_ratio};
}

FeedbackItem diagnose_failure(const ExecutionOutcome& outcome, const TestCase& test_case, const Tool& tool) {
  if (!outcome.failure) throw UnclassifiedFailure("outcome did not fail");
  const auto& f = *outcome.failure;
  switch (f.kind) {
    case FailureKind::LocatorUnresolved: return feedback::SelectorDrift{f.step, f.selectors};
    case FailureKind::Timeout: return feedback::Timeout{f.step};
    case FailureKind::InvalidOption: {
      const ActionScript& script = tool.script;
      if (f.step < static_cast<int>(script.steps.size())) {
        const auto* in = std::get_if<step::Interaction>(&script.steps[f.step].body);
        if (auto p = in ? sole_placeholder(in->value) : std::nullopt) {
          return feedback::UncoveredEnum{*p, f.value.value_or(""), false};
        }
      }
      break;
    }
    case FailureKind::HttpError:
      for (const auto& [site_field, message] : f.field_errors) {
        auto p = param_for_site_field(tool, site_field);
        if (!p) continue;
        if (message.find("required") != std::string::npos) return feedback::RequirednessMismatch{*p, true};
        const auto* field = tool.schema.field(*p);
        const auto* value = input_of(test_case, *p);
        if (field && field->type == ValueType::Enum && value) return feedback::UncoveredEnum{*p, *value, false};
      }
      break;
    default: break;
  }
  throw UnclassifiedFailure(std::string(to_string(f.kind)) + " at step " + std::to_string(f.step) + ": " + f.message);
}

ValidationReport summarize(const ActionScript& script, std::vector<CaseResult> cases) {
  ValidationReport report;
  report.cases = std::move(cases);
  report.fail_rate = {report.failing_cases(), static_cast<long long>(std::max<std::size_t>(report.cases.size(), 1))};
  report.step_count = static_cast<int>(script.steps.size());
  report.agentic_ratio = agentic_ratio(script);
  for (const auto& c : report.cases) {
    if (c.feedback) report.feedback.push_back(*c.feedback);
    if (c.unclassified) report.unclassified.push_back(*c.unclassified);
  }
  return report;
}

ValidationReport validate_tool(const Tool& tool, const TestSuite& suite, const BackendFactory& factory,
                               Reasoner* reasoner) {
  std::vector<CaseResult> results;
  for (const auto& test_case : suite.cases) {
    CaseResult r;
    r.test_case = test_case;
    auto backend = factory();
    try {
      r.outcome = execute_tool(tool, test_case.inputs, *backend, reasoner);
    } catch (const InputInvalid& e) {
      r.unclassified = e.what();
      results.push_back(std::move(r));
      continue;
    }
    if (!r.outcome.succeeded()) {
      try {
        r.feedback = diagnose_failure(r.outcome, test_case, tool);
      } catch (const UnclassifiedFailure& e) {
        r.unclassified = e.what();
      }
      results.push_back(std::move(r));
      continue;
    }
    r.passed = true;
    for (const auto& e : test_case.expectations) {
      if (!r.passed) break;
      if (e.kind == ExpectationKind::ExtractionNonempty) {
        bool nonempty = !r.outcome.outputs.empty() &&
                        std::all_of(r.outcome.outputs.begin(), r.outcome.outputs.end(), [](const auto& kv) {
                          return kv.second.find_first_not_of(" \t\r\n") != std::string::npos;
                        });
        if (!nonempty) {
          r.passed = false;
          r.feedback = feedback::SemanticMismatch{-1, "nonempty extraction", "empty extraction"};
        }
      } else if (e.kind == ExpectationKind::UrlMatches) {
        std::string expected;
        try {
          expected = render_url_template(e.pattern, with_defaults(tool, test_case.inputs));
        } catch (const UnboundPlaceholder& err) {
          expected = e.pattern;
        }
        if (!same_url(expected, r.outcome.final_url)) {
          r.passed = false;
          r.feedback = feedback::SemanticMismatch{-1, expected, r.outcome.final_url};
        }
      }
    }
    if (r.passed) {
      if (auto uncovered = uncovered_live_option(tool, tool.script, r.outcome)) {
        r.passed = false;
        r.feedback = uncovered;
      }
    }
    if (r.passed && tool.ui_script) {
      Tool oracle_tool = tool;
      oracle_tool.script = *tool.ui_script;
      oracle_tool.ui_script.reset();
      auto oracle_backend = factory();
      auto oracle = execute_tool(oracle_tool, test_case.inputs, *oracle_backend, reasoner);
      if (oracle.succeeded()) {
        if (auto uncovered = uncovered_live_option(tool, *tool.ui_script, oracle)) {
          r.passed = false;
          r.feedback = uncovered;
        } else if (oracle.outputs != r.outcome.outputs) {
          std::string expected, actual;
          for (const auto& [k, v] : oracle.outputs) expected += v;
          for (const auto& [k, v] : r.outcome.outputs) actual += v;
          r.passed = false;
          r.feedback = feedback::SemanticMismatch{-1, expected, actual};
        }
      }
    }
    results.push_back(std::move(r));
  }
  return summarize(tool.script, std::move(results));
}

}  // namespace walt
