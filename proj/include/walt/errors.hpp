#pragma once

#include <stdexcept>
#include <string>

namespace walt {

/// Base for every error the engine raises across a module boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTrace : public Error {
 public:
  MalformedTrace(std::string position, std::string reason)
      : Error("malformed trace at " + position + ": " + reason),
        position_(std::move(position)),
        reason_(std::move(reason)) {}

  const std::string& position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string position_;
  std::string reason_;
};

class AlignmentError : public Error {
 public:
  AlignmentError(int step, std::size_t ui_actions, std::size_t elements)
      : Error("step " + std::to_string(step) + " has " + std::to_string(ui_actions) +
              " UI actions but " + std::to_string(elements) + " interacted elements"),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class MalformedCandidates : public Error {
 public:
  explicit MalformedCandidates(const std::string& reason)
      : Error("malformed candidates: " + reason) {}
};

class DuplicateName : public Error {
 public:
  explicit DuplicateName(std::string name)
      : Error("duplicate tool candidate name: " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class WhollyUnstable : public Error {
 public:
  WhollyUnstable() : Error("every UI action in the trace is unstable") {}
};

class EmptyScript : public Error {
 public:
  EmptyScript() : Error("every trace action was skipped; no steps to emit") {}
};

class UnboundPlaceholder : public Error {
 public:
  explicit UnboundPlaceholder(std::string name)
      : Error("placeholder {" + name + "} is not bound to any parameter"),
        name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class MissingParamSource : public Error {
 public:
  explicit MissingParamSource(std::string param)
      : Error("parameter '" + param + "' cannot be traced to any element or URL"),
        param_(std::move(param)) {}
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

class UnknownField : public Error {
 public:
  explicit UnknownField(const std::string& field) : Error("unknown schema field: " + field) {}
};

class InputInvalid : public Error {
 public:
  explicit InputInvalid(const std::string& detail) : Error("invalid tool input: " + detail) {}
};

class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& why) : Error("backend unavailable: " + why) {}
};

class UnknownDemo : public Error {
 public:
  explicit UnknownDemo(const std::string& name) : Error("unknown scripted demo: " + name) {}
};

class Conflict : public Error {
 public:
  Conflict(const std::string& name, int version)
      : Error("tool " + name + " version " + std::to_string(version) + " is already registered") {}
};

class NotValidated : public Error {
 public:
  explicit NotValidated(const std::string& name)
      : Error("tool " + name + " has not passed validation") {}
};

class MalformedTool : public Error {
 public:
  explicit MalformedTool(const std::string& reason) : Error("malformed tool file: " + reason) {}
};

}  // namespace walt

namespace walt {

class FallbackExhausted : public Error {
 public:
  explicit FallbackExhausted(const std::string& why) : Error("agentic fallback exhausted: " + why) {}
};

class UnclassifiedFailure : public Error {
 public:
  explicit UnclassifiedFailure(const std::string& detail)
      : Error("failure does not map to a feedback kind: " + detail) {}
};

}  // namespace walt
