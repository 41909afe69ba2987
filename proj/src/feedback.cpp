#include "walt/feedback.hpp"

#include "walt/backend.hpp"

namespace walt {

std::string_view to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::SelectorDrift: return "selector_drift";
    case FeedbackKind::UncoveredEnum: return "uncovered_enum";
    case FeedbackKind::Timeout: return "timeout";
    case FeedbackKind::SemanticMismatch: return "semantic_mismatch";
    case FeedbackKind::RequirednessMismatch: return "requiredness_mismatch";
  }
  return "?";
}

std::string describe(const FeedbackItem& item) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, feedback::SelectorDrift>) {
          std::string sels;
          for (const auto& s : f.selectors) sels += (sels.empty() ? "" : ", ") + s;
          return "step " + std::to_string(f.step) + ": no selector resolved (" + sels + ")";
        } else if constexpr (std::is_same_v<T, feedback::UncoveredEnum>) {
          return f.offered_by_site ? "site offers '" + f.value + "' for " + f.field + " but the schema lacks it"
                                   : "site rejected '" + f.value + "' for " + f.field;
        } else if constexpr (std::is_same_v<T, feedback::Timeout>) {
          return "step " + std::to_string(f.step) + " timed out";
        } else if constexpr (std::is_same_v<T, feedback::SemanticMismatch>) {
          return "expected " + f.expected + ", got " + f.actual;
        } else {
          return std::string("site ") + (f.site_requires ? "requires " : "does not require ") + f.field;
        }
      },
      item);
}

std::string_view to_string(BackendStatus status) {
  switch (status) {
    case BackendStatus::Ok: return "ok";
    case BackendStatus::NotFound: return "not_found";
    case BackendStatus::NotInteractable: return "not_interactable";
    case BackendStatus::InvalidOption: return "invalid_option";
    case BackendStatus::HttpError: return "http_error";
    case BackendStatus::NotReady: return "not_ready";
  }
  return "?";
}

}  // namespace walt
