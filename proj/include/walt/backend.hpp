#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace walt {

enum class BackendStatus { Ok, NotFound, NotInteractable, InvalidOption, HttpError, NotReady };

std::string_view to_string(BackendStatus status);

struct BackendResult {
  BackendStatus status = BackendStatus::Ok;
  int http_status = 200;
  std::string message;
  // Server-side validation errors keyed by form field name.
  std::map<std::string, std::string> field_errors;
  std::string text;

  bool ok() const { return status == BackendStatus::Ok; }
  static BackendResult success(std::string text = {}) {
    BackendResult r;
    r.text = std::move(text);
    return r;
  }
  static BackendResult failure(BackendStatus status, std::string message) {
    BackendResult r;
    r.status = status;
    r.message = std::move(message);
    return r;
  }
};

/// Browser-session effector layer. One instance is one single-threaded
/// session; implementations must be deterministic for a fixed seed and call
/// sequence.
class ExecutionBackend {
 public:
  virtual ~ExecutionBackend() = default;

  virtual BackendResult navigate(const std::string& url) = 0;
  virtual BackendResult click(const std::string& selector) = 0;
  virtual BackendResult input(const std::string& selector, const std::string& text) = 0;
  virtual BackendResult select(const std::string& selector, const std::string& option_text) = 0;
  virtual BackendResult press(const std::string& key) = 0;
  virtual BackendResult scroll(int dx, int dy) = 0;
  virtual BackendResult wait(double seconds) = 0;
  virtual BackendResult extract(const std::string& goal) = 0;

  virtual std::string current_url() const = 0;
  virtual std::string dom_snapshot() const = 0;
  virtual std::optional<std::string> last_http_method() const = 0;
  /// Option texts of the select matched by `selector`, if it is one.
  virtual std::optional<std::vector<std::string>> select_options(const std::string& selector) const = 0;
};

using BackendFactory = std::function<std::unique_ptr<ExecutionBackend>()>;

}  // namespace walt
