#include "walt/script.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "serde.hpp"
#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

using jsonio::Json;

namespace {

constexpr std::string_view kInteractionTypes[] = {"click",    "input",  "select_change",
                                                  "key_press", "scroll", "wait"};

void add_names(std::vector<std::string>& out, const std::string& text) {
  for (auto& name : placeholders_in(text)) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
  }
}

}  // namespace

std::size_t ActionScript::agentic_count() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.is_agentic(); }));
}

std::string_view to_string(step::InteractionKind kind) {
  return kInteractionTypes[static_cast<int>(kind)];
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Navigation: return "navigation";
    case StepKind::Interaction: return "interaction";
    case StepKind::Extraction: return "extraction";
    case StepKind::Agentic: return "agent";
    case StepKind::Skip: return "skip";
  }
  return "?";
}

std::vector<std::string> step_placeholders(const Step& s) {
  std::vector<std::string> out;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, step::Navigation>) {
          add_names(out, b.url_template);
        } else if constexpr (std::is_same_v<T, step::Interaction>) {
          if (b.value) add_names(out, *b.value);
        } else if constexpr (std::is_same_v<T, step::Extraction>) {
          add_names(out, b.goal);
        } else if constexpr (std::is_same_v<T, step::Agentic>) {
          add_names(out, b.task);
        }
      },
      s.body);
  return out;
}

std::vector<std::string> script_placeholders(const ActionScript& script) {
  std::vector<std::string> out;
  for (const auto& s : script.steps) {
    for (auto& name : step_placeholders(s)) {
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    }
  }
  return out;
}

void validate_script(const ActionScript& script) {
  if (script.steps.empty()) throw EmptyScript();
  std::set<std::string> params(script.params.begin(), script.params.end());
  if (params.size() != script.params.size()) throw std::invalid_argument("duplicate script params");
  for (const auto& s : script.steps) {
    if (const auto* a = std::get_if<step::Agentic>(&s.body)) {
      if (a->max_steps < kMinAgenticSteps || a->max_steps > kMaxAgenticSteps) {
        throw std::invalid_argument("agentic max_steps out of range");
      }
    }
    if (const auto* i = std::get_if<step::Interaction>(&s.body)) {
      if (i->kind != step::InteractionKind::Wait && !i->locator) {
        throw std::invalid_argument("interaction step without locator");
      }
    }
    for (const auto& name : step_placeholders(s)) {
      if (!params.count(name)) throw UnboundPlaceholder(name);
    }
  }
}

namespace serde {

Json to_json(const StableLocator& l) {
  return Json{{"primary", l.primary},
              {"alternates", l.alternates},
              {"stability_score", l.stability_score}};
}

StableLocator locator_from_json(const Json& j, const std::string& element_hash,
                                const std::string& path) {
  StableLocator l;
  l.element_hash = element_hash;
  l.primary = jsonio::get_string(j, "primary", path);
  if (const auto* alts = jsonio::find(j, "alternates")) {
    l.alternates = jsonio::get_strings(*alts, jsonio::child_path(path, "alternates"));
  }
  l.stability_score = jsonio::get_number(j, "stability_score", path);
  return l;
}

Json to_json(const Step& s) {
  Json j = Json::object();
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, step::Navigation>) {
          j["type"] = "navigation";
          j["description"] = s.description;
          j["url"] = b.url_template;
        } else if constexpr (std::is_same_v<T, step::Interaction>) {
          j["type"] = std::string(to_string(b.kind));
          j["description"] = s.description;
          if (b.locator) {
            j["elementHash"] = b.locator->element_hash;
            j["selectors"] = to_json(*b.locator);
          }
          switch (b.kind) {
            case step::InteractionKind::Input: j["value"] = b.value.value_or(""); break;
            case step::InteractionKind::SelectChange: j["selectedText"] = b.value.value_or(""); break;
            case step::InteractionKind::KeyPress: j["key"] = b.value.value_or(""); break;
            case step::InteractionKind::Scroll:
              j["scrollX"] = b.scroll_x;
              j["scrollY"] = b.scroll_y;
              break;
            case step::InteractionKind::Wait: j["seconds"] = b.seconds; break;
            case step::InteractionKind::Click: break;
          }
          if (!b.recovery_hint.empty()) j["recovery_hint"] = b.recovery_hint;
        } else if constexpr (std::is_same_v<T, step::Extraction>) {
          j["type"] = "extraction";
          j["description"] = s.description;
          j["goal"] = b.goal;
          j["output"] = b.output;
        } else if constexpr (std::is_same_v<T, step::Agentic>) {
          j["type"] = "agent";
          j["description"] = s.description;
          j["task"] = b.task;
          j["max_steps"] = b.max_steps;
        }
      },
      s.body);
  if (s.source) j["source"] = Json::array({s.source->step, s.source->action});
  return j;
}

Step step_from_json(const Json& j, const std::string& path) {
  Step s;
  auto type = jsonio::get_string(j, "type", path);
  s.description = jsonio::get_string(j, "description", path);
  if (type == "navigation") {
    s.body = step::Navigation{jsonio::get_string(j, "url", path)};
  } else if (type == "extraction") {
    s.body = step::Extraction{jsonio::get_string(j, "goal", path), jsonio::get_string(j, "output", path)};
  } else if (type == "agent") {
    auto max_steps = jsonio::get_int(j, "max_steps", path);
    if (max_steps < kMinAgenticSteps || max_steps > kMaxAgenticSteps) {
      jsonio::fail(jsonio::child_path(path, "max_steps"), "must be within [1, 8]");
    }
    s.body = step::Agentic{jsonio::get_string(j, "task", path), static_cast<int>(max_steps)};
  } else {
    auto it = std::find(std::begin(kInteractionTypes), std::end(kInteractionTypes), type);
    if (it == std::end(kInteractionTypes)) jsonio::fail(jsonio::child_path(path, "type"), "unknown step type '" + type + "'");
    step::Interaction i;
    i.kind = static_cast<step::InteractionKind>(it - std::begin(kInteractionTypes));
    if (const auto* sel = jsonio::find(j, "selectors")) {
      i.locator = locator_from_json(*sel, jsonio::opt_string(j, "elementHash", path).value_or(""),
                                    jsonio::child_path(path, "selectors"));
    } else if (i.kind != step::InteractionKind::Wait) {
      jsonio::fail(jsonio::child_path(path, "selectors"), "interaction step needs selectors");
    }
    switch (i.kind) {
      case step::InteractionKind::Input: i.value = jsonio::get_string(j, "value", path); break;
      case step::InteractionKind::SelectChange: i.value = jsonio::get_string(j, "selectedText", path); break;
      case step::InteractionKind::KeyPress: i.value = jsonio::get_string(j, "key", path); break;
      case step::InteractionKind::Scroll:
        i.scroll_x = static_cast<int>(jsonio::get_int(j, "scrollX", path));
        i.scroll_y = static_cast<int>(jsonio::get_int(j, "scrollY", path));
        break;
      case step::InteractionKind::Wait: i.seconds = jsonio::get_number(j, "seconds", path); break;
      case step::InteractionKind::Click: break;
    }
    i.recovery_hint = jsonio::opt_string(j, "recovery_hint", path).value_or("");
    s.body = std::move(i);
  }
  if (const auto* src = jsonio::find(j, "source")) {
    if (!src->is_array() || src->size() != 2 || !(*src)[0].is_number_integer() ||
        !(*src)[1].is_number_integer()) {
      jsonio::fail(jsonio::child_path(path, "source"), "expected [step, action]");
    }
    s.source = ActionKey{(*src)[0].get<int>(), (*src)[1].get<int>()};
  }
  return s;
}

Json to_json(const ActionScript& script) {
  Json steps = Json::array();
  for (const auto& s : script.steps) steps.push_back(to_json(s));
  return Json{{"params", script.params}, {"steps", std::move(steps)}};
}

ActionScript script_from_json(const Json& j, const std::string& path) {
  ActionScript script;
  if (const auto* p = jsonio::find(j, "params")) {
    script.params = jsonio::get_strings(*p, jsonio::child_path(path, "params"));
  }
  const auto& steps = jsonio::require(j, "steps", path);
  auto spath = jsonio::child_path(path, "steps");
  jsonio::expect_array(steps, spath);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    script.steps.push_back(step_from_json(steps[i], jsonio::child_path(spath, i)));
  }
  return script;
}

}  // namespace serde

std::string serialize_script(const ActionScript& script) {
  return jsonio::dump(serde::to_json(script));
}

ActionScript parse_script(std::string_view raw) {
  try {
    auto script = serde::script_from_json(jsonio::parse_document(raw), "");
    validate_script(script);
    return script;
  } catch (const jsonio::ShapeError& e) {
    throw MalformedTool(e.path + ": " + e.reason);
  }
}

}  // namespace walt
