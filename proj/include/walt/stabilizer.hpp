#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "walt/trace.hpp"

namespace walt {

/// Resolved locator for one interacted element: the best selector plus
/// ranked backups.
struct StableLocator {
  std::string element_hash;
  std::string primary;
  std::vector<std::string> alternates;
  double stability_score = 0;

  std::vector<std::string> all_selectors() const;
  bool operator==(const StableLocator&) const = default;
};

/// Inclusive range of trace step indices.
struct StepRange {
  int first = 0;
  int last = 0;
  bool operator==(const StepRange&) const = default;
};

struct StabilizedTrace {
  ExecutionTrace base;
  std::map<ActionKey, StableLocator> locators;
  std::set<ActionKey> unstable_actions;
  std::vector<StepRange> unstable_segments;

  const StableLocator* locator_for(ActionKey key) const;
  bool is_unstable(ActionKey key) const { return unstable_actions.count(key) > 0; }
};

enum class SelectorKind { Id, Name, AriaLabel, AttributeCss, Other, DomPath };

/// Calibration for selector ranking; exposed so callers can tune it.
struct StabilityPolicy {
  double id_score = 1.0;
  double name_score = 0.9;
  double aria_score = 0.8;
  double attribute_score = 0.6;
  double other_score = 0.5;
  double dom_path_score = 0.3;
  // Elements whose best score is at most this and whose DOM depth exceeds
  // max_dom_path_depth are unstable.
  double unstable_threshold = 0.3;
  std::size_t max_dom_path_depth = 8;

  double score(SelectorKind kind) const;
};

/// Content digest of (tag, stable attributes, normalized text, parent tag).
std::string compute_element_hash(const InteractedElement& element);

/// Selector over :nth-child steps for a root-to-node index path.
std::string dom_path_selector(const std::vector<int>& dom_path, std::string_view tag);

SelectorKind classify_selector(std::string_view selector);

struct RankedSelector {
  std::string selector;
  SelectorKind kind;
  double score;
};

/// All candidate selectors for an element, best first: generated ones
/// (id, name, aria-label, stable attributes, DOM path) plus recorder-supplied
/// ones, deduplicated. Ties break on shorter string, then lexicographic.
std::vector<RankedSelector> rank_selectors(const InteractedElement& element,
                                           const StabilityPolicy& policy = {});

/// Throws WhollyUnstable when the trace has UI actions and none is stable.
StabilizedTrace stabilize_trace(const ExecutionTrace& trace, const StabilityPolicy& policy = {});

/// Moves selectors known to be stale behind the fresh ones, swapping the
/// primary when it is stale. Returns true if anything moved.
bool demote_stale_selectors(StableLocator& locator, const std::set<std::string>& stale);

}  // namespace walt
