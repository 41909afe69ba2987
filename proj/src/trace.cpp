#include "walt/trace.hpp"

#include <algorithm>
#include <set>

#include "serde.hpp"
#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

using jsonio::Json;
using jsonio::ShapeError;

namespace {

constexpr std::string_view kElementTypes[] = {"input", "select", "button", "link", "textarea"};
constexpr std::string_view kActionKinds[] = {"go_to_url", "click_element", "input_text",
                                             "select_change", "key_press", "scroll",
                                             "extract_content", "wait"};

bool binding_located(const ExecutionTrace& trace, const std::string& value) {
  for (const auto& step : trace.steps) {
    if (step.url.find(value) != std::string::npos) return true;
    if (url_decode(step.url).find(value) != std::string::npos) return true;
    for (const auto& a : step.actions) {
      bool found = std::visit(
          [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, action::GoToUrl>) {
              return p.url.find(value) != std::string::npos ||
                     url_decode(p.url).find(value) != std::string::npos;
            } else if constexpr (std::is_same_v<T, action::InputText>) {
              return p.text.find(value) != std::string::npos;
            } else if constexpr (std::is_same_v<T, action::SelectChange>) {
              return p.selected_text.find(value) != std::string::npos;
            } else if constexpr (std::is_same_v<T, action::KeyPress>) {
              return p.key.find(value) != std::string::npos;
            } else if constexpr (std::is_same_v<T, action::ExtractContent>) {
              return p.goal.find(value) != std::string::npos;
            } else {
              return false;
            }
          },
          a.payload);
      if (found) return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(ElementType type) { return kElementTypes[static_cast<int>(type)]; }

std::optional<ElementType> element_type_from_string(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kElementTypes); ++i) {
    if (kElementTypes[i] == text) return static_cast<ElementType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ActionKind kind) { return kActionKinds[static_cast<int>(kind)]; }

std::optional<ActionKind> action_kind_from_string(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kActionKinds); ++i) {
    if (kActionKinds[i] == text) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

bool is_ui_interaction(ActionKind kind) {
  switch (kind) {
    case ActionKind::ClickElement:
    case ActionKind::InputText:
    case ActionKind::SelectChange:
    case ActionKind::KeyPress:
    case ActionKind::Scroll:
      return true;
    default:
      return false;
  }
}

// -- candidates ---------------------------------------------------------------

namespace serde {

Json to_json(const ToolCandidate& c) {
  Json elements = Json::array();
  for (const auto& e : c.elements) {
    Json h = {{"type", std::string(to_string(e.type))}, {"purpose", e.purpose}};
    if (e.options) h["options"] = *e.options;
    elements.push_back(std::move(h));
  }
  return Json{{"name", c.name},
              {"start_url", c.start_url},
              {"description", c.description},
              {"elements", std::move(elements)}};
}

ToolCandidate candidate_from_json(const Json& j, const std::string& path) {
  ToolCandidate c;
  c.name = jsonio::get_string(j, "name", path);
  c.start_url = jsonio::get_string(j, "start_url", path);
  c.description = jsonio::opt_string(j, "description", path).value_or("");
  if (const auto* els = jsonio::find(j, "elements")) {
    auto epath = jsonio::child_path(path, "elements");
    jsonio::expect_array(*els, epath);
    for (std::size_t i = 0; i < els->size(); ++i) {
      auto hpath = jsonio::child_path(epath, i);
      const auto& h = (*els)[i];
      ElementHint hint;
      auto type = jsonio::get_string(h, "type", hpath);
      auto parsed = element_type_from_string(type);
      if (!parsed) jsonio::fail(jsonio::child_path(hpath, "type"), "unknown element type '" + type + "'");
      hint.type = *parsed;
      hint.purpose = jsonio::opt_string(h, "purpose", hpath).value_or("");
      if (const auto* opts = jsonio::find(h, "options")) {
        hint.options = jsonio::get_strings(*opts, jsonio::child_path(hpath, "options"));
      }
      c.elements.push_back(std::move(hint));
    }
  }
  return c;
}

}  // namespace serde

void validate_candidate(const ToolCandidate& c) {
  if (c.name.empty()) throw MalformedCandidates("candidate name is empty");
  auto url = parse_url(c.start_url);
  if (!url) throw MalformedCandidates(c.name + ": start_url is not an absolute URL");
  for (const auto& e : c.elements) {
    if (e.type == ElementType::Select && e.options && e.options->empty()) {
      throw MalformedCandidates(c.name + ": select hint '" + e.purpose + "' has no options");
    }
  }
}

std::vector<ToolCandidate> parse_candidates(std::string_view raw) {
  std::vector<ToolCandidate> out;
  try {
    auto doc = jsonio::parse_document(raw);
    const auto& tools = jsonio::require(doc, "tools", "");
    jsonio::expect_array(tools, "/tools");
    for (std::size_t i = 0; i < tools.size(); ++i) {
      out.push_back(serde::candidate_from_json(tools[i], jsonio::child_path("/tools", i)));
    }
  } catch (const ShapeError& e) {
    throw MalformedCandidates(e.path + ": " + e.reason);
  }
  std::set<std::string> seen;
  for (const auto& c : out) {
    validate_candidate(c);
    if (!seen.insert(c.name).second) throw DuplicateName(c.name);
  }
  return out;
}

std::string serialize_candidates(const std::vector<ToolCandidate>& candidates) {
  Json tools = Json::array();
  for (const auto& c : candidates) tools.push_back(serde::to_json(c));
  return jsonio::dump(Json{{"tools", std::move(tools)}});
}

// -- traces -------------------------------------------------------------------

namespace serde {

Json to_json(const ActionRecord& a) {
  Json payload = Json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, action::GoToUrl>) {
          payload["url"] = p.url;
        } else if constexpr (std::is_same_v<T, action::InputText>) {
          payload["text"] = p.text;
        } else if constexpr (std::is_same_v<T, action::SelectChange>) {
          payload["selected_text"] = p.selected_text;
        } else if constexpr (std::is_same_v<T, action::KeyPress>) {
          payload["key"] = p.key;
        } else if constexpr (std::is_same_v<T, action::Scroll>) {
          payload["dx"] = p.dx;
          payload["dy"] = p.dy;
        } else if constexpr (std::is_same_v<T, action::ExtractContent>) {
          payload["goal"] = p.goal;
        } else if constexpr (std::is_same_v<T, action::Wait>) {
          payload["seconds"] = p.seconds;
        }
      },
      a.payload);
  Json j = {{"kind", std::string(to_string(a.kind()))}, {"payload", std::move(payload)},
            {"success", a.success}};
  if (a.extracted) j["extracted"] = *a.extracted;
  if (a.http_method) j["http_method"] = *a.http_method;
  return j;
}

ActionRecord action_from_json(const Json& j, const std::string& path) {
  ActionRecord a;
  auto kind_text = jsonio::get_string(j, "kind", path);
  auto kind = action_kind_from_string(kind_text);
  if (!kind) jsonio::fail(jsonio::child_path(path, "kind"), "unknown action kind '" + kind_text + "'");
  const auto& p = jsonio::require(j, "payload", path);
  auto ppath = jsonio::child_path(path, "payload");
  jsonio::expect_object(p, ppath);
  switch (*kind) {
    case ActionKind::GoToUrl: {
      auto url = jsonio::get_string(p, "url", ppath);
      if (!parse_url(url)) jsonio::fail(jsonio::child_path(ppath, "url"), "unparseable URL '" + url + "'");
      a.payload = action::GoToUrl{url};
      break;
    }
    case ActionKind::ClickElement: a.payload = action::Click{}; break;
    case ActionKind::InputText: a.payload = action::InputText{jsonio::get_string(p, "text", ppath)}; break;
    case ActionKind::SelectChange:
      a.payload = action::SelectChange{jsonio::get_string(p, "selected_text", ppath)};
      break;
    case ActionKind::KeyPress: a.payload = action::KeyPress{jsonio::get_string(p, "key", ppath)}; break;
    case ActionKind::Scroll:
      a.payload = action::Scroll{static_cast<int>(jsonio::get_int(p, "dx", ppath)),
                                 static_cast<int>(jsonio::get_int(p, "dy", ppath))};
      break;
    case ActionKind::ExtractContent:
      a.payload = action::ExtractContent{jsonio::get_string(p, "goal", ppath)};
      break;
    case ActionKind::Wait: a.payload = action::Wait{jsonio::get_number(p, "seconds", ppath)}; break;
  }
  if (const auto* s = jsonio::find(j, "success")) {
    if (!s->is_boolean()) jsonio::fail(jsonio::child_path(path, "success"), "expected boolean");
    a.success = s->get<bool>();
  }
  a.extracted = jsonio::opt_string(j, "extracted", path);
  a.http_method = jsonio::opt_string(j, "http_method", path);
  return a;
}

Json to_json(const InteractedElement& e) {
  Json j = {{"element_hash", e.element_hash},
            {"tag", e.tag},
            {"attributes", Json(e.attributes)},
            {"dom_path", e.dom_path},
            {"css_selector", e.css_selector},
            {"alternates", e.alternates}};
  if (e.bounding_box) {
    j["bounding_box"] = {{"x", e.bounding_box->x},
                         {"y", e.bounding_box->y},
                         {"width", e.bounding_box->width},
                         {"height", e.bounding_box->height}};
  }
  j["text"] = e.text;
  j["parent_tag"] = e.parent_tag;
  if (e.form) j["form"] = *e.form;
  if (!e.options.empty()) j["options"] = e.options;
  if (e.selected_default) j["selected_default"] = *e.selected_default;
  if (e.required) j["required"] = *e.required;
  return j;
}

InteractedElement element_from_json(const Json& j, const std::string& path) {
  InteractedElement e;
  e.element_hash = jsonio::get_string(j, "element_hash", path);
  e.tag = jsonio::get_string(j, "tag", path);
  if (const auto* attrs = jsonio::find(j, "attributes")) {
    auto apath = jsonio::child_path(path, "attributes");
    jsonio::expect_object(*attrs, apath);
    for (const auto& [k, v] : attrs->items()) {
      if (!v.is_string()) jsonio::fail(jsonio::child_path(apath, k), "expected string");
      e.attributes[k] = v.get<std::string>();
    }
  }
  if (const auto* dp = jsonio::find(j, "dom_path")) {
    auto dpath = jsonio::child_path(path, "dom_path");
    jsonio::expect_array(*dp, dpath);
    for (std::size_t i = 0; i < dp->size(); ++i) {
      const auto& v = (*dp)[i];
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        jsonio::fail(jsonio::child_path(dpath, i), "dom_path index must be a nonnegative integer");
      }
      e.dom_path.push_back(v.get<int>());
    }
  }
  e.css_selector = jsonio::opt_string(j, "css_selector", path).value_or("");
  if (const auto* alts = jsonio::find(j, "alternates")) {
    e.alternates = jsonio::get_strings(*alts, jsonio::child_path(path, "alternates"));
  }
  if (const auto* bb = jsonio::find(j, "bounding_box")) {
    auto bpath = jsonio::child_path(path, "bounding_box");
    e.bounding_box = BoundingBox{jsonio::get_number(*bb, "x", bpath), jsonio::get_number(*bb, "y", bpath),
                                 jsonio::get_number(*bb, "width", bpath),
                                 jsonio::get_number(*bb, "height", bpath)};
  }
  e.text = jsonio::opt_string(j, "text", path).value_or("");
  e.parent_tag = jsonio::opt_string(j, "parent_tag", path).value_or("");
  e.form = jsonio::opt_string(j, "form", path);
  if (const auto* opts = jsonio::find(j, "options")) {
    e.options = jsonio::get_strings(*opts, jsonio::child_path(path, "options"));
  }
  e.selected_default = jsonio::opt_string(j, "selected_default", path);
  if (jsonio::find(j, "required")) e.required = jsonio::get_bool(j, "required", path);
  return e;
}

Json to_json(const ExecutionTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json actions = Json::array();
    for (const auto& a : s.actions) actions.push_back(to_json(a));
    Json elements = Json::array();
    for (const auto& e : s.interacted) elements.push_back(to_json(e));
    steps.push_back(Json{{"url", s.url},
                         {"title", s.title},
                         {"agent_brain",
                          {{"evaluation_previous_goal", s.brain.evaluation_previous_goal},
                           {"memory", s.brain.memory},
                           {"next_goal", s.brain.next_goal}}},
                         {"actions", std::move(actions)},
                         {"interacted_elements", std::move(elements)}});
  }
  return Json{{"candidate", t.candidate_name},
              {"steps", std::move(steps)},
              {"bindings", Json(t.param_bindings)}};
}

ExecutionTrace trace_from_json(const Json& doc, const std::string& root) {
  ExecutionTrace t;
  t.candidate_name = jsonio::get_string(doc, "candidate", root);
  const auto& steps = jsonio::require(doc, "steps", root);
  auto spath = jsonio::child_path(root, "steps");
  jsonio::expect_array(steps, spath);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto path = jsonio::child_path(spath, i);
    const auto& sj = steps[i];
    jsonio::expect_object(sj, path);
    TraceStep step;
    step.url = jsonio::get_string(sj, "url", path);
    step.title = jsonio::opt_string(sj, "title", path).value_or("");
    const auto& brain = jsonio::require(sj, "agent_brain", path);
    auto bpath = jsonio::child_path(path, "agent_brain");
    step.brain.evaluation_previous_goal = jsonio::get_string(brain, "evaluation_previous_goal", bpath);
    step.brain.memory = jsonio::get_string(brain, "memory", bpath);
    step.brain.next_goal = jsonio::get_string(brain, "next_goal", bpath);
    const auto& actions = jsonio::require(sj, "actions", path);
    auto apath = jsonio::child_path(path, "actions");
    jsonio::expect_array(actions, apath);
    for (std::size_t k = 0; k < actions.size(); ++k) {
      step.actions.push_back(action_from_json(actions[k], jsonio::child_path(apath, k)));
    }
    if (const auto* els = jsonio::find(sj, "interacted_elements")) {
      auto epath = jsonio::child_path(path, "interacted_elements");
      jsonio::expect_array(*els, epath);
      for (std::size_t k = 0; k < els->size(); ++k) {
        step.interacted.push_back(element_from_json((*els)[k], jsonio::child_path(epath, k)));
      }
    }
    t.steps.push_back(std::move(step));
  }
  if (const auto* b = jsonio::find(doc, "bindings")) {
    auto bpath = jsonio::child_path(root, "bindings");
    jsonio::expect_object(*b, bpath);
    for (const auto& [k, v] : b->items()) {
      if (!v.is_string()) jsonio::fail(jsonio::child_path(bpath, k), "expected string");
      t.param_bindings[k] = v.get<std::string>();
    }
  }
  return t;
}

}  // namespace serde

void validate_trace(const ExecutionTrace& trace) {
  if (trace.steps.empty()) throw MalformedTrace("/steps", "trace has no steps");
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const auto& step = trace.steps[s];
    std::size_t ui = 0;
    for (std::size_t a = 0; a < step.actions.size(); ++a) {
      const auto& act = step.actions[a];
      if (is_ui_interaction(act.kind())) ++ui;
      if (const auto* go = std::get_if<action::GoToUrl>(&act.payload)) {
        if (!parse_url(go->url)) {
          throw MalformedTrace("/steps/" + std::to_string(s) + "/actions/" + std::to_string(a),
                               "unparseable URL '" + go->url + "'");
        }
      }
    }
    if (ui != step.interacted.size()) {
      throw AlignmentError(static_cast<int>(s), ui, step.interacted.size());
    }
    for (std::size_t e = 0; e < step.interacted.size(); ++e) {
      const auto& el = step.interacted[e];
      auto path = "/steps/" + std::to_string(s) + "/interacted_elements/" + std::to_string(e);
      if (el.element_hash.empty()) throw MalformedTrace(path, "element_hash is empty");
      if (el.tag.empty()) throw MalformedTrace(path, "tag is empty");
      for (int index : el.dom_path) {
        if (index < 0) throw MalformedTrace(path, "negative dom_path index");
      }
    }
  }
  for (const auto& [name, value] : trace.param_bindings) {
    if (!binding_located(trace, value)) {
      throw MalformedTrace("/bindings/" + name,
                           "value '" + value + "' does not occur in any action payload or URL");
    }
  }
}

ExecutionTrace parse_trace(std::string_view raw) {
  ExecutionTrace trace;
  try {
    trace = serde::trace_from_json(jsonio::parse_document(raw), "");
  } catch (const ShapeError& e) {
    throw MalformedTrace(e.path, e.reason);
  }
  validate_trace(trace);
  return trace;
}

std::string serialize_trace(const ExecutionTrace& trace) {
  return jsonio::dump(serde::to_json(trace));
}

const InteractedElement* element_for(const ExecutionTrace& trace, ActionKey key) {
  if (key.step < 0 || key.step >= static_cast<int>(trace.steps.size())) return nullptr;
  const auto& step = trace.steps[key.step];
  if (key.action < 0 || key.action >= static_cast<int>(step.actions.size())) return nullptr;
  if (!is_ui_interaction(step.actions[key.action].kind())) return nullptr;
  int ordinal = 0;
  for (int a = 0; a < key.action; ++a) {
    if (is_ui_interaction(step.actions[a].kind())) ++ordinal;
  }
  if (ordinal >= static_cast<int>(step.interacted.size())) return nullptr;
  return &step.interacted[ordinal];
}

}  // namespace walt
