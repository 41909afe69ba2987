#include "walt/synthesizer.hpp"

#include <algorithm>
#include <set>

#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_submit(const InteractedElement& e) {
  auto type = e.attributes.find("type");
  if (e.tag == "button") return type == e.attributes.end() || type->second == "submit";
  return e.tag == "input" && type != e.attributes.end() && type->second == "submit";
}

std::string element_label(const InteractedElement& e) {
  for (const char* key : {"aria-label", "placeholder", "name", "id"}) {
    auto it = e.attributes.find(key);
    if (it != e.attributes.end() && !it->second.empty()) return it->second;
  }
  auto text = e.text.size() > 40 ? e.text.substr(0, 40) : e.text;
  return text.empty() ? e.tag : "'" + text + "'";
}

// Binding whose value equals `value`; ties go to the name closest to `hint`.
std::optional<std::string> binding_for(const std::map<std::string, std::string>& bindings,
                                       const std::string& value, const std::string& hint,
                                       bool case_insensitive) {
  std::optional<std::string> found;
  for (const auto& [name, bound] : bindings) {
    bool equal = case_insensitive ? lower(bound) == lower(value) : bound == value;
    if (!equal || bound.empty()) continue;
    if (!found || name == hint) found = name;
  }
  return found;
}

class Templater {
 public:
  explicit Templater(std::map<std::string, std::string> bindings) : bindings_(std::move(bindings)) {}

  std::string value(const std::string& literal, const InteractedElement* element, bool select) {
    std::string hint = element ? element_label(*element) : "";
    auto name = binding_for(bindings_, literal, hint, false);
    if (!name && select) name = binding_for(bindings_, literal, hint, true);
    if (!name) return literal;
    return use(*name);
  }

  std::string url(const std::string& literal) {
    auto parsed = parse_url(literal);
    if (!parsed) return literal;
    std::string out = parsed->origin();
    for (const auto& seg : parsed->path_segments()) {
      out += '/';
      auto name = binding_for(bindings_, seg, "", false);
      out += name ? use(*name) : encode_path_segment(seg);
    }
    if (parsed->path.size() > 1 && parsed->path.back() == '/') out += '/';
    if (parsed->path == "/") out += '/';
    if (!parsed->query.empty()) {
      out += '?';
      bool first = true;
      for (const auto& [key, val] : parsed->query) {
        if (!first) out += '&';
        first = false;
        auto name = binding_for(bindings_, val, key, false);
        out += form_encode(key) + "=" + (name ? use(*name) : form_encode(val));
      }
    }
    return out;
  }

  std::string text(std::string literal) {
    // longest values first so overlapping bindings resolve deterministically
    std::vector<std::pair<std::string, std::string>> order(bindings_.begin(), bindings_.end());
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });
    for (const auto& [name, value] : order) {
      if (value.size() < 2) continue;
      auto pos = literal.find(value);
      if (pos == std::string::npos) continue;
      literal.replace(pos, value.size(), use(name));
    }
    return literal;
  }

  const std::vector<std::string>& used() const { return used_; }

 private:
  std::string use(const std::string& name) {
    if (std::find(used_.begin(), used_.end(), name) == used_.end()) used_.push_back(name);
    return "{" + name + "}";
  }

  std::map<std::string, std::string> bindings_;
  std::vector<std::string> used_;
};

std::string url_after(const ExecutionTrace& trace, ActionKey key, const std::string& current) {
  const auto& record = trace.steps[key.step].actions[key.action];
  if (const auto* go = std::get_if<action::GoToUrl>(&record.payload)) return go->url;
  return current;
}

}  // namespace

StepKind classify_action(const ActionRecord& record, const std::optional<StableLocator>& locator,
                         bool essential) {
  switch (record.kind()) {
    case ActionKind::GoToUrl: return StepKind::Navigation;
    case ActionKind::ExtractContent: return StepKind::Extraction;
    case ActionKind::Wait: return StepKind::Interaction;
    default: break;
  }
  if (locator) return StepKind::Interaction;
  return essential ? StepKind::Agentic : StepKind::Skip;
}

bool is_essential(const ExecutionTrace& trace, ActionKey key) {
  const auto* element = element_for(trace, key);
  bool essential = false;
  for_each_action(trace, [&](ActionKey other, const ActionRecord& record) {
    if (essential || !(key < other)) return;
    if (record.kind() == ActionKind::ExtractContent) {
      essential = true;
      return;
    }
    if (record.kind() != ActionKind::ClickElement || !element || !element->form) return;
    const auto* target = element_for(trace, other);
    if (target && is_submit(*target) && target->form == element->form) essential = true;
  });
  return essential;
}

std::map<std::string, std::string> effective_bindings(const StabilizedTrace& stab) {
  if (!stab.base.param_bindings.empty()) return stab.base.param_bindings;
  std::map<std::string, std::string> out;
  for_each_action(stab.base, [&](ActionKey key, const ActionRecord& record) {
    const std::string* value = nullptr;
    if (const auto* in = std::get_if<action::InputText>(&record.payload)) value = &in->text;
    if (const auto* sel = std::get_if<action::SelectChange>(&record.payload)) value = &sel->selected_text;
    const auto* element = element_for(stab.base, key);
    if (!value || value->empty() || !element || !stab.locator_for(key)) return;
    for (const char* attr : {"name", "id"}) {
      auto it = element->attributes.find(attr);
      if (it == element->attributes.end() || placeholders_in("{" + it->second + "}").empty()) continue;
      out[it->second] = *value;
      break;
    }
  });
  return out;
}

ActionScript synthesize_script(const StabilizedTrace& stab, const ToolCandidate& candidate) {
  const auto& trace = stab.base;
  Templater templater(effective_bindings(stab));
  std::vector<std::pair<ActionKey, const ActionRecord*>> actions;
  for_each_action(trace, [&](ActionKey key, const ActionRecord& r) { actions.emplace_back(key, &r); });

  ActionScript script;
  int extraction_count = 0;
  std::string current;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    auto [key, record] = actions[i];
    if (key.action == 0) current = trace.steps[key.step].url;
    const auto& brain = trace.steps[key.step].brain;
    const auto* element = element_for(trace, key);
    const auto* found = stab.locator_for(key);
    std::optional<StableLocator> locator = found ? std::optional(*found) : std::nullopt;
    bool essential = !locator && is_ui_interaction(record->kind()) && is_essential(trace, key);
    auto kind = classify_action(*record, locator, essential);
    auto previous = current;
    current = url_after(trace, key, current);

    Step step;
    step.source = key;
    switch (kind) {
      case StepKind::Skip: continue;
      case StepKind::Navigation: {
        const auto& url = std::get<action::GoToUrl>(record->payload).url;
        if (same_url(url, previous)) continue;
        if (i + 1 < actions.size() && actions[i + 1].second->kind() == ActionKind::GoToUrl) continue;
        step.body = step::Navigation{templater.url(url)};
        step.description = "Open " + url;
        break;
      }
      case StepKind::Extraction: {
        const auto& goal = std::get<action::ExtractContent>(record->payload).goal;
        ++extraction_count;
        auto output = extraction_count == 1 ? std::string("results") : "results_" + std::to_string(extraction_count);
        step.body = step::Extraction{goal, output};
        step.description = "Extract " + goal;
        break;
      }
      case StepKind::Agentic: {
        auto task = brain.next_goal.empty()
                        ? "Perform the " + std::string(to_string(record->kind())) + " on " +
                              (element ? element_label(*element) : std::string("the page")) + " that the demo needed"
                        : brain.next_goal;
        step.body = step::Agentic{templater.text(task), 3};
        step.description = "Agentic: " + task;
        break;
      }
      case StepKind::Interaction: {
        step::Interaction in;
        in.locator = locator;
        in.recovery_hint = brain.next_goal;
        std::visit(
            [&](const auto& p) {
              using T = std::decay_t<decltype(p)>;
              if constexpr (std::is_same_v<T, action::Click>) {
                in.kind = step::InteractionKind::Click;
                step.description = "Click " + (element ? element_label(*element) : std::string("element"));
              } else if constexpr (std::is_same_v<T, action::InputText>) {
                in.kind = step::InteractionKind::Input;
                in.value = templater.value(p.text, element, false);
                step.description = "Type into " + (element ? element_label(*element) : std::string("field"));
              } else if constexpr (std::is_same_v<T, action::SelectChange>) {
                in.kind = step::InteractionKind::SelectChange;
                in.value = templater.value(p.selected_text, element, true);
                step.description = "Choose an option in " + (element ? element_label(*element) : std::string("select"));
              } else if constexpr (std::is_same_v<T, action::KeyPress>) {
                in.kind = step::InteractionKind::KeyPress;
                in.value = p.key;
                step.description = "Press " + p.key;
              } else if constexpr (std::is_same_v<T, action::Scroll>) {
                in.kind = step::InteractionKind::Scroll;
                in.scroll_x = p.dx;
                in.scroll_y = p.dy;
                step.description = "Scroll the page";
              } else if constexpr (std::is_same_v<T, action::Wait>) {
                in.kind = step::InteractionKind::Wait;
                in.seconds = p.seconds;
                step.description = "Wait for the page";
              }
            },
            record->payload);
        if (in.kind == step::InteractionKind::Wait) {
          in.locator.reset();
          in.recovery_hint.clear();
        }
        // a click that only focuses the field typed into next adds nothing
        if (in.kind == step::InteractionKind::Click && i + 1 < actions.size() &&
            actions[i + 1].second->kind() == ActionKind::InputText) {
          const auto* next = element_for(trace, actions[i + 1].first);
          if (element && next && next->element_hash == element->element_hash) continue;
        }
        step.body = std::move(in);
        break;
      }
    }
    script.steps.push_back(std::move(step));
  }
  if (script.steps.empty()) throw EmptyScript();
  script.params = templater.used();
  (void)candidate;
  validate_script(script);
  return script;
}

std::string_view to_string(ExpectationKind kind) {
  switch (kind) {
    case ExpectationKind::Completes: return "completes";
    case ExpectationKind::ExtractionNonempty: return "extraction_nonempty";
    case ExpectationKind::UrlMatches: return "url_matches";
  }
  return "?";
}

TestSuite extract_test_inputs(const ExecutionTrace& trace, const InputSchema& schema) {
  Inputs demo;
  for (const auto& f : schema.fields) {
    auto it = trace.param_bindings.find(f.name);
    if (it != trace.param_bindings.end()) {
      demo[f.name] = it->second;
    } else if (f.example) {
      demo[f.name] = *f.example;
    }
  }
  bool extracts = false;
  for_each_action(trace, [&](ActionKey, const ActionRecord& r) {
    if (r.kind() == ActionKind::ExtractContent) extracts = true;
  });

  TestSuite suite;
  TestCase first{demo, {{ExpectationKind::Completes, ""}}};
  if (extracts) {
    first.expectations.push_back({ExpectationKind::ExtractionNonempty, ""});
  } else if (!trace.steps.empty() && trace.steps.back().actions.empty()) {
    Templater templater(demo);
    first.expectations.push_back({ExpectationKind::UrlMatches, templater.url(trace.steps.back().url)});
  }
  suite.cases.push_back(std::move(first));

  for (const auto& f : schema.fields) {
    if (f.type != ValueType::Enum) continue;
    auto exercised = demo.find(f.name);
    for (const auto& option : f.options) {
      if (exercised != demo.end() && exercised->second == option) continue;
      auto inputs = demo;
      inputs[f.name] = option;
      suite.cases.push_back({std::move(inputs), {{ExpectationKind::Completes, ""}}});
    }
  }
  return suite;
}

}  // namespace walt
