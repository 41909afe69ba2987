#include "walt/executor.hpp"

#include <algorithm>
#include <set>

#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

StepFailure make_failure(int step, FailureKind kind, std::string message) {
  StepFailure f;
  f.step = step;
  f.kind = kind;
  f.message = std::move(message);
  return f;
}

StepFailure http_failure(int step, FailureKind kind, const BackendResult& r) {
  auto f = make_failure(step, kind, r.message);
  f.http_status = r.http_status;
  f.field_errors = r.field_errors;
  return f;
}

// Drops query params whose whole value is a placeholder for an absent input.
std::string strip_absent(const std::string& tmpl, const std::set<std::string>& absent) {
  auto q = tmpl.find('?');
  if (q == std::string::npos || absent.empty()) return tmpl;
  std::string out = tmpl.substr(0, q);
  std::string rest = tmpl.substr(q + 1);
  std::vector<std::string> kept;
  std::size_t start = 0;
  while (start <= rest.size()) {
    auto end = rest.find('&', start);
    if (end == std::string::npos) end = rest.size();
    auto pair = rest.substr(start, end - start);
    auto eq = pair.find('=');
    auto value = eq == std::string::npos ? "" : pair.substr(eq + 1);
    auto names = placeholders_in(value);
    bool drop = names.size() == 1 && value == "{" + names[0] + "}" && absent.count(names[0]);
    if (!pair.empty() && !drop) kept.push_back(pair);
    start = end + 1;
  }
  for (std::size_t i = 0; i < kept.size(); ++i) out += (i == 0 ? "?" : "&") + kept[i];
  return out;
}

struct Bindings {
  Inputs values;
  std::set<std::string> absent;
};

Bindings complete_inputs(const ActionScript& script, const InputSchema* schema, const Inputs& inputs) {
  Bindings b{inputs, {}};
  for (const auto& p : script.params) {
    if (b.values.count(p)) continue;
    const FieldSpec* f = schema ? schema->field(p) : nullptr;
    if (f && f->default_value) {
      b.values[p] = *f->default_value;
    } else {
      b.absent.insert(p);
    }
  }
  return b;
}

bool only_absent_placeholder(const std::optional<std::string>& value, const std::set<std::string>& absent) {
  if (!value) return false;
  auto names = placeholders_in(*value);
  return names.size() == 1 && *value == "{" + names[0] + "}" && absent.count(names[0]);
}

StepResult run_interaction(const step::Interaction& in, int index, const Inputs& bindings,
                           ExecutionBackend& backend, const ExecutorOptions& options) {
  StepResult result;
  using K = step::InteractionKind;
  if (in.kind == K::Wait) {
    backend.wait(in.seconds);
    result.backend_calls = 1;
    return result;
  }
  if (in.kind == K::Scroll) {
    backend.scroll(in.scroll_x, in.scroll_y);
    result.backend_calls = 1;
    return result;
  }
  if (!in.locator) {
    result.failure = make_failure(index, FailureKind::LocatorUnresolved, "interaction without locator");
    return result;
  }
  std::string value;
  if (in.value) {
    if (!placeholders_in(*in.value).empty()) {
      auto rendered = render_text(*in.value, bindings);
      if (!placeholders_in(rendered).empty()) {
        result.failure = make_failure(index, FailureKind::BadTemplate, "unbound placeholder in " + *in.value);
        return result;
      }
      value = rendered;
    } else {
      value = *in.value;
    }
  }
  auto selectors = in.locator->all_selectors();
  bool not_ready = false;
  for (int pass = 0; pass < 2; ++pass) {
    not_ready = false;
    for (const auto& sel : selectors) {
      BackendResult r;
      switch (in.kind) {
        case K::Click: r = backend.click(sel); break;
        case K::Input: r = backend.input(sel, value); break;
        case K::SelectChange: {
          auto options = backend.select_options(sel);
          r = backend.select(sel, value);
          if (r.ok() || r.status == BackendStatus::InvalidOption) result.observed_options = options;
          break;
        }
        case K::KeyPress:
          r = backend.click(sel);
          if (r.ok()) {
            ++result.backend_calls;
            r = backend.press(value);
          }
          break;
        default: break;
      }
      ++result.backend_calls;
      if (r.ok()) return result;
      if (r.status == BackendStatus::NotReady) {
        not_ready = true;
        break;
      }
      if (r.status == BackendStatus::InvalidOption) {
        auto f = make_failure(index, FailureKind::InvalidOption, r.message);
        f.value = value;
        f.selectors = {sel};
        result.failure = std::move(f);
        return result;
      }
      if (r.status == BackendStatus::HttpError) {
        auto f = http_failure(index, FailureKind::HttpError, r);
        f.selectors = {sel};
        result.failure = std::move(f);
        return result;
      }
    }
    if (pass == 0) {
      backend.wait(options.retry_wait_seconds);
      ++result.backend_calls;
    }
  }
  auto f = make_failure(index, not_ready ? FailureKind::Timeout : FailureKind::LocatorUnresolved,
                        not_ready ? "page not ready after retry" : "no selector resolved");
  f.selectors = selectors;
  if (in.value) f.value = value;
  result.failure = std::move(f);
  return result;
}

StepResult run_agentic(const step::Agentic& a, int index, const Inputs& bindings, ExecutionBackend& backend,
                       Reasoner* reasoner) {
  StepResult result;
  if (!reasoner) {
    result.failure = make_failure(index, FailureKind::AgenticBudgetExhausted, "no reasoner configured");
    return result;
  }
  ReasonerRequest request;
  request.task = render_text(a.task, bindings);
  request.max_steps = a.max_steps;
  request.inputs = bindings;
  int taken = 0;
  while (true) {
    request.dom_snapshot = backend.dom_snapshot();
    request.current_url = backend.current_url();
    request.steps_taken = taken;
    auto response = reasoner->next(request);
    for (const auto& cmd : response.commands) {
      if (taken >= a.max_steps) {
        result.failure = make_failure(index, FailureKind::AgenticBudgetExhausted,
                                      "max_steps " + std::to_string(a.max_steps) + " reached");
        return result;
      }
      apply_command(backend, cmd, bindings);
      ++taken;
      ++result.backend_calls;
    }
    if (response.done) return result;
    if (response.commands.empty()) {
      result.failure = make_failure(index, FailureKind::AgenticBudgetExhausted, "reasoner made no progress");
      return result;
    }
  }
}

}  // namespace

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::LocatorUnresolved: return "locator_unresolved";
    case FailureKind::NavigationFailed: return "navigation_failed";
    case FailureKind::AgenticBudgetExhausted: return "agentic_budget_exhausted";
    case FailureKind::Timeout: return "timeout";
    case FailureKind::HttpError: return "http_error";
    case FailureKind::InvalidOption: return "invalid_option";
    case FailureKind::BadTemplate: return "bad_template";
  }
  return "?";
}

StepResult execute_step(const Step& step, int index, const Inputs& bindings, ExecutionBackend& backend,
                        Reasoner* reasoner, const ExecutorOptions& options) {
  return std::visit(
      [&](const auto& b) -> StepResult {
        using T = std::decay_t<decltype(b)>;
        StepResult result;
        if constexpr (std::is_same_v<T, step::Navigation>) {
          std::string url;
          try {
            url = render_url_template(b.url_template, bindings);
          } catch (const UnboundPlaceholder& e) {
            result.failure = make_failure(index, FailureKind::BadTemplate, e.what());
            return result;
          }
          auto r = backend.navigate(url);
          result.backend_calls = 1;
          if (!r.ok()) {
            auto kind = r.field_errors.empty() ? FailureKind::NavigationFailed : FailureKind::HttpError;
            result.failure = http_failure(index, kind, r);
            if (result.failure->message.empty()) result.failure->message = "navigation to " + url + " failed";
          }
        } else if constexpr (std::is_same_v<T, step::Interaction>) {
          result = run_interaction(b, index, bindings, backend, options);
        } else if constexpr (std::is_same_v<T, step::Extraction>) {
          auto r = backend.extract(b.goal);
          result.backend_calls = 1;
          if (r.status == BackendStatus::NotReady) {
            backend.wait(options.retry_wait_seconds);
            r = backend.extract(b.goal);
            result.backend_calls += 2;
          }
          if (r.ok()) {
            result.output = {b.output, r.text};
          } else {
            auto kind = r.status == BackendStatus::NotReady ? FailureKind::Timeout : FailureKind::NavigationFailed;
            result.failure = make_failure(index, kind, r.message);
          }
        } else {
          result = run_agentic(b, index, bindings, backend, reasoner);
        }
        return result;
      },
      step.body);
}

namespace {

ExecutionOutcome run_steps(const ActionScript& script, const Bindings& bindings, ExecutionBackend& backend,
                           Reasoner* reasoner, const ExecutorOptions& options, int first_step) {
  ExecutionOutcome outcome;
  for (int i = first_step; i < static_cast<int>(script.steps.size()); ++i) {
    const auto& s = script.steps[i];
    ++outcome.steps_executed;
    if (s.is_agentic()) ++outcome.agentic_steps_executed;
    StepResult r;
    if (const auto* nav = std::get_if<step::Navigation>(&s.body)) {
      Step stripped = s;
      std::get<step::Navigation>(stripped.body).url_template = strip_absent(nav->url_template, bindings.absent);
      r = execute_step(stripped, i, bindings.values, backend, reasoner, options);
    } else if (const auto* in = std::get_if<step::Interaction>(&s.body);
               in && only_absent_placeholder(in->value, bindings.absent)) {
      continue;
    } else {
      r = execute_step(s, i, bindings.values, backend, reasoner, options);
    }
    outcome.backend_calls += r.backend_calls;
    if (r.output) outcome.outputs[r.output->first] = r.output->second;
    if (r.observed_options) outcome.observed_options[i] = *r.observed_options;
    if (r.failure) {
      outcome.status = OutcomeStatus::Failed;
      outcome.failure = std::move(r.failure);
      break;
    }
  }
  outcome.final_url = backend.current_url();
  return outcome;
}

std::string remaining_goal(const Tool& tool, int from) {
  std::string task = "Complete the task '" + tool.description + "' (tool " + tool.name + ") from step " +
                     std::to_string(from) + ":";
  for (int i = from; i < static_cast<int>(tool.script.steps.size()); ++i) {
    const auto& s = tool.script.steps[i];
    if (std::holds_alternative<step::Extraction>(s.body)) continue;
    task += " " + s.description + ";";
  }
  return task;
}

}  // namespace

ExecutionOutcome execute_script(const ActionScript& script, const Inputs& inputs, ExecutionBackend& backend,
                                Reasoner* reasoner, const ExecutorOptions& options, int first_step) {
  return run_steps(script, complete_inputs(script, nullptr, inputs), backend, reasoner, options, first_step);
}

ExecutionOutcome execute_tool(const Tool& tool, const Inputs& inputs, ExecutionBackend& backend,
                              Reasoner* reasoner, const ExecutorOptions& options) {
  auto violations = validate_input(tool.schema, inputs);
  if (!violations.empty()) {
    std::string detail;
    for (const auto& v : violations) detail += (detail.empty() ? "" : "; ") + describe(v);
    throw InputInvalid(detail);
  }
  return run_steps(tool.script, complete_inputs(tool.script, &tool.schema, inputs), backend, reasoner, options, 0);
}

ExecutionOutcome agentic_fallback(const Tool& tool, const Inputs& inputs, const ExecutionOutcome& failed,
                                  ExecutionBackend& backend, Reasoner* reasoner, int budget) {
  if (!reasoner) throw FallbackExhausted("no reasoner configured");
  if (budget <= 0) throw FallbackExhausted("step budget is zero");
  int from = failed.failure ? failed.failure->step : 0;
  auto bindings = complete_inputs(tool.script, &tool.schema, inputs);

  ExecutionOutcome outcome = failed;
  outcome.status = OutcomeStatus::Success;
  outcome.failure.reset();
  outcome.fallback_used = true;

  ReasonerRequest request;
  request.task = remaining_goal(tool, from);
  request.inputs = bindings.values;
  int taken = 0;
  while (true) {
    request.max_steps = budget - taken;
    request.dom_snapshot = backend.dom_snapshot();
    request.current_url = backend.current_url();
    request.steps_taken = taken;
    auto response = reasoner->next(request);
    for (const auto& cmd : response.commands) {
      if (taken >= budget) throw FallbackExhausted("global budget of " + std::to_string(budget) + " spent");
      apply_command(backend, cmd, bindings.values);
      ++taken;
      ++outcome.backend_calls;
    }
    if (response.done) break;
    if (response.commands.empty()) throw FallbackExhausted("reasoner made no progress");
  }

  for (int i = from; i < static_cast<int>(tool.script.steps.size()); ++i) {
    const auto& s = tool.script.steps[i];
    if (!std::holds_alternative<step::Extraction>(s.body)) continue;
    ++outcome.steps_executed;
    auto r = execute_step(s, i, bindings.values, backend, reasoner);
    outcome.backend_calls += r.backend_calls;
    if (r.output) outcome.outputs[r.output->first] = r.output->second;
    if (r.failure) throw FallbackExhausted("extraction after fallback failed: " + r.failure->message);
  }
  outcome.agentic_steps_executed = outcome.steps_executed;
  outcome.final_url = backend.current_url();
  return outcome;
}

ExecutionOutcome execute_with_fallback(const Tool& tool, const Inputs& inputs, ExecutionBackend& backend,
                                       Reasoner* reasoner, int budget) {
  auto outcome = execute_tool(tool, inputs, backend, reasoner);
  if (outcome.succeeded() || !reasoner) return outcome;
  return agentic_fallback(tool, inputs, outcome, backend, reasoner, budget);
}

}  // namespace walt
