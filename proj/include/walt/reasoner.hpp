#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "walt/backend.hpp"

namespace walt {

struct ReasonerRequest {
  std::string task;
  int max_steps = 3;
  std::string dom_snapshot;
  std::string current_url;
  int steps_taken = 0;
  std::map<std::string, std::string> inputs;
};

enum class CommandOp { Navigate, Click, Input, Select, Press, Scroll, Wait };

/// One primitive browser command issued by a reasoner.
struct Command {
  CommandOp op = CommandOp::Click;
  std::string target;  // selector, or URL for navigate
  std::string value;   // text, option, key; may hold {param} placeholders
  int dx = 0;
  int dy = 0;
  double seconds = 0;
  bool operator==(const Command&) const = default;
};

struct ReasonerResponse {
  std::vector<Command> commands;
  bool done = false;
};

class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual ReasonerResponse next(const ReasonerRequest& request) = 0;
};

/// Deterministic stub: the first rule whose keyword occurs in the task
/// (case-insensitively) supplies a fixed command list, issued one command
/// per request; then it reports done. Unmatched tasks get an empty, done
/// response.
class ScriptedReasoner : public Reasoner {
 public:
  struct Rule {
    std::string keyword;
    std::vector<Command> commands;
  };

  ScriptedReasoner() = default;
  explicit ScriptedReasoner(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }
  ReasonerResponse next(const ReasonerRequest& request) override;

  /// Rules that know the bundled fixture: dismissing its edit-page popup and
  /// driving the fully rewritten search form.
  static ScriptedReasoner fixture_default();

 private:
  std::vector<Rule> rules_;
};

/// Adapts any callable.
class CallableReasoner : public Reasoner {
 public:
  using Fn = std::function<ReasonerResponse(const ReasonerRequest&)>;
  explicit CallableReasoner(Fn fn) : fn_(std::move(fn)) {}
  ReasonerResponse next(const ReasonerRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

/// POSTs the request as JSON to `url` and parses the JSON reply:
///   request  {"task","max_steps","dom_snapshot","current_url","steps_taken","inputs"}
///   response {"done": bool, "commands": [{"op","target","value","dx","dy","seconds"}]}
/// Transport or shape errors throw BackendUnavailable.
class HttpReasoner : public Reasoner {
 public:
  explicit HttpReasoner(std::string url, double timeout_seconds = 10);
  ReasonerResponse next(const ReasonerRequest& request) override;

 private:
  std::string url_;
  double timeout_seconds_;
};

std::string_view to_string(CommandOp op);
std::string request_to_json(const ReasonerRequest& request);
ReasonerResponse response_from_json(std::string_view body);
std::string response_to_json(const ReasonerResponse& response);

/// Runs one command against a backend, rendering placeholders in `value`.
BackendResult apply_command(ExecutionBackend& backend, const Command& command,
                            const std::map<std::string, std::string>& inputs);

}  // namespace walt
