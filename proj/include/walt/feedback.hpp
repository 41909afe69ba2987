#pragma once

#include <string>
#include <variant>
#include <vector>

namespace walt {

namespace feedback {

struct SelectorDrift {
  int step = 0;
  std::vector<std::string> selectors;
  bool operator==(const SelectorDrift&) const = default;
};

/// `offered_by_site` distinguishes an option the live page offers but the
/// schema lacks from a schema value the site rejected.
struct UncoveredEnum {
  std::string field;
  std::string value;
  bool offered_by_site = true;
  bool operator==(const UncoveredEnum&) const = default;
};

struct Timeout {
  int step = 0;
  bool operator==(const Timeout&) const = default;
};

struct SemanticMismatch {
  int step = -1;
  std::string expected;
  std::string actual;
  bool operator==(const SemanticMismatch&) const = default;
};

struct RequirednessMismatch {
  std::string field;
  bool site_requires = false;
  bool operator==(const RequirednessMismatch&) const = default;
};

}  // namespace feedback

using FeedbackItem = std::variant<feedback::SelectorDrift, feedback::UncoveredEnum,
                                  feedback::Timeout, feedback::SemanticMismatch,
                                  feedback::RequirednessMismatch>;

enum class FeedbackKind { SelectorDrift, UncoveredEnum, Timeout, SemanticMismatch, RequirednessMismatch };

inline FeedbackKind kind_of(const FeedbackItem& item) {
  return static_cast<FeedbackKind>(item.index());
}

std::string_view to_string(FeedbackKind kind);
std::string describe(const FeedbackItem& item);

}  // namespace walt
