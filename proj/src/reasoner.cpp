#include "walt/reasoner.hpp"

#include <algorithm>

#include "httplib.h"
#include "json_io.hpp"
#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

using jsonio::Json;

namespace {

constexpr std::string_view kOps[] = {"navigate", "click", "input", "select", "press", "scroll", "wait"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(CommandOp op) { return kOps[static_cast<int>(op)]; }

ReasonerResponse ScriptedReasoner::next(const ReasonerRequest& request) {
  auto task = lower(request.task);
  for (const auto& rule : rules_) {
    if (task.find(lower(rule.keyword)) == std::string::npos) continue;
    auto index = static_cast<std::size_t>(std::max(request.steps_taken, 0));
    if (index >= rule.commands.size()) return {{}, true};
    return {{rule.commands[index]}, index + 1 == rule.commands.size()};
  }
  return {{}, false};
}

ScriptedReasoner ScriptedReasoner::fixture_default() {
  Command dismiss;
  dismiss.op = CommandOp::Click;
  dismiss.target = "[data-dismiss=modal]";
  auto cmd = [](CommandOp op, std::string target, std::string value = "") {
    Command c;
    c.op = op;
    c.target = std::move(target);
    c.value = std::move(value);
    return c;
  };
  std::vector<Command> rewritten_search = {cmd(CommandOp::Navigate, "http://fixture.local/"),
                                           cmd(CommandOp::Input, "#kw-box", "{query}"),
                                           cmd(CommandOp::Select, "#cat-box", "{category}"),
                                           cmd(CommandOp::Select, "#order-box", "{sort}"),
                                           cmd(CommandOp::Click, "#go-btn")};
  return ScriptedReasoner({{"popup", {dismiss}}, {"tool search_listings", rewritten_search}});
}

std::string request_to_json(const ReasonerRequest& r) {
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  Json j{{"task", r.task},
         {"max_steps", r.max_steps},
         {"dom_snapshot", r.dom_snapshot},
         {"current_url", r.current_url},
         {"steps_taken", r.steps_taken},
         {"inputs", std::move(inputs)}};
  return j.dump();
}

std::string response_to_json(const ReasonerResponse& response) {
  Json commands = Json::array();
  for (const auto& c : response.commands) {
    commands.push_back(Json{{"op", std::string(to_string(c.op))},
                            {"target", c.target},
                            {"value", c.value},
                            {"dx", c.dx},
                            {"dy", c.dy},
                            {"seconds", c.seconds}});
  }
  return Json{{"done", response.done}, {"commands", std::move(commands)}}.dump();
}

ReasonerResponse response_from_json(std::string_view body) {
  try {
    auto j = jsonio::parse_document(body);
    ReasonerResponse out;
    out.done = jsonio::get_bool(j, "done", "");
    const auto& commands = jsonio::require(j, "commands", "");
    jsonio::expect_array(commands, "/commands");
    for (std::size_t i = 0; i < commands.size(); ++i) {
      auto path = jsonio::child_path("/commands", i);
      const auto& c = commands[i];
      Command cmd;
      auto op = jsonio::get_string(c, "op", path);
      auto it = std::find(std::begin(kOps), std::end(kOps), op);
      if (it == std::end(kOps)) jsonio::fail(jsonio::child_path(path, "op"), "unknown op '" + op + "'");
      cmd.op = static_cast<CommandOp>(it - std::begin(kOps));
      cmd.target = jsonio::opt_string(c, "target", path).value_or("");
      cmd.value = jsonio::opt_string(c, "value", path).value_or("");
      if (jsonio::find(c, "dx")) cmd.dx = static_cast<int>(jsonio::get_int(c, "dx", path));
      if (jsonio::find(c, "dy")) cmd.dy = static_cast<int>(jsonio::get_int(c, "dy", path));
      if (jsonio::find(c, "seconds")) cmd.seconds = jsonio::get_number(c, "seconds", path);
      out.commands.push_back(std::move(cmd));
    }
    return out;
  } catch (const jsonio::ShapeError& e) {
    throw BackendUnavailable("reasoner reply " + e.path + ": " + e.reason);
  }
}

HttpReasoner::HttpReasoner(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {}

ReasonerResponse HttpReasoner::next(const ReasonerRequest& request) {
  auto parsed = parse_url(url_);
  if (!parsed) throw BackendUnavailable("bad reasoner URL " + url_);
  httplib::Client client(parsed->origin());
  auto seconds = static_cast<time_t>(timeout_seconds_);
  client.set_connection_timeout(seconds);
  client.set_read_timeout(seconds);
  auto path = parsed->path + (parsed->query.empty() ? "" : "?" + encode_query(parsed->query));
  auto res = client.Post(path, request_to_json(request), "application/json");
  if (!res) throw BackendUnavailable("reasoner at " + url_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendUnavailable("reasoner returned HTTP " + std::to_string(res->status));
  return response_from_json(res->body);
}

BackendResult apply_command(ExecutionBackend& backend, const Command& c,
                            const std::map<std::string, std::string>& inputs) {
  auto value = render_text(c.value, inputs);
  switch (c.op) {
    case CommandOp::Navigate: return backend.navigate(render_text(c.target, inputs));
    case CommandOp::Click: return backend.click(c.target);
    case CommandOp::Input: return backend.input(c.target, value);
    case CommandOp::Select: return backend.select(c.target, value);
    case CommandOp::Press: return backend.press(value);
    case CommandOp::Scroll: return backend.scroll(c.dx, c.dy);
    case CommandOp::Wait: return backend.wait(c.seconds);
  }
  return BackendResult::failure(BackendStatus::NotFound, "unknown command");
}

}  // namespace walt
