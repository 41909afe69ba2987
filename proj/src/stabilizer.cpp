#include "walt/stabilizer.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>

#include "walt/dom.hpp"
#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

// Attributes that identify an element by meaning rather than position.
constexpr std::string_view kHashAttributes[] = {"aria-label", "href", "id",
                                                "name",       "placeholder", "type"};

// Attributes usable for attribute-CSS selectors, in preference order.
constexpr std::string_view kSelectorAttributes[] = {"data-testid", "placeholder", "href", "title"};

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string href_path(const std::string& href) {
  if (auto url = parse_url(href)) return url->path;
  auto end = href.find_first_of("?#");
  return href.substr(0, end);
}

void append_field(std::string& out, std::string_view key, std::string_view value) {
  out += key;
  out += '=';
  out += std::to_string(value.size());
  out += ':';
  out += value;
  out += ';';
}

std::string attribute_selector(std::string_view tag, std::string_view name, std::string_view value) {
  return std::string(tag) + "[" + std::string(name) + "=" + dom::selector_value(value) + "]";
}

}  // namespace

std::vector<std::string> StableLocator::all_selectors() const {
  std::vector<std::string> out{primary};
  out.insert(out.end(), alternates.begin(), alternates.end());
  return out;
}

const StableLocator* StabilizedTrace::locator_for(ActionKey key) const {
  auto it = locators.find(key);
  return it == locators.end() ? nullptr : &it->second;
}

double StabilityPolicy::score(SelectorKind kind) const {
  switch (kind) {
    case SelectorKind::Id: return id_score;
    case SelectorKind::Name: return name_score;
    case SelectorKind::AriaLabel: return aria_score;
    case SelectorKind::AttributeCss: return attribute_score;
    case SelectorKind::Other: return other_score;
    case SelectorKind::DomPath: return dom_path_score;
  }
  return 0;
}

std::string compute_element_hash(const InteractedElement& element) {
  std::string canonical;
  append_field(canonical, "tag", element.tag);
  for (auto name : kHashAttributes) {
    auto it = element.attributes.find(std::string(name));
    if (it == element.attributes.end()) continue;
    append_field(canonical, name, name == "href" ? href_path(it->second) : it->second);
  }
  append_field(canonical, "text", dom::collapse_whitespace(element.text));
  append_field(canonical, "parent", element.parent_tag);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

std::string dom_path_selector(const std::vector<int>& dom_path, std::string_view tag) {
  std::string out = "html";
  for (std::size_t i = 0; i < dom_path.size(); ++i) {
    out += " > ";
    if (i + 1 == dom_path.size()) out += tag;
    out += ":nth-child(" + std::to_string(dom_path[i] + 1) + ")";
  }
  return out;
}

SelectorKind classify_selector(std::string_view selector) {
  auto parsed = dom::parse_selector(selector);
  if (!parsed) return SelectorKind::Other;
  bool positional = false;
  for (const auto& c : parsed->compounds) {
    if (c.nth_child) positional = true;
  }
  if (positional) return SelectorKind::DomPath;
  const auto& last = parsed->compounds.back();
  if (parsed->compounds.size() == 1 && !last.id.empty()) return SelectorKind::Id;
  bool any_attribute = false;
  for (const auto& a : last.attributes) {
    if (!a.value) continue;
    if (a.name == "name") return SelectorKind::Name;
    any_attribute = true;
  }
  for (const auto& a : last.attributes) {
    if (a.value && a.name == "aria-label") return SelectorKind::AriaLabel;
  }
  if (any_attribute) return SelectorKind::AttributeCss;
  return SelectorKind::Other;
}

std::vector<RankedSelector> rank_selectors(const InteractedElement& element,
                                           const StabilityPolicy& policy) {
  std::vector<RankedSelector> ranked;
  auto add = [&](std::string selector, SelectorKind kind) {
    if (selector.empty()) return;
    for (const auto& r : ranked) {
      if (r.selector == selector) return;
    }
    ranked.push_back({std::move(selector), kind, policy.score(kind)});
  };
  const auto& attrs = element.attributes;
  auto attr = [&](std::string_view name) -> const std::string* {
    auto it = attrs.find(std::string(name));
    return it == attrs.end() || it->second.empty() ? nullptr : &it->second;
  };
  if (const auto* id = attr("id")) {
    // ids that are not plain identifiers need the attribute form
    auto quoted = dom::selector_value(*id);
    add(quoted == *id ? "#" + *id : attribute_selector(element.tag, "id", *id), SelectorKind::Id);
  }
  if (const auto* name = attr("name")) add(attribute_selector(element.tag, "name", *name), SelectorKind::Name);
  if (const auto* aria = attr("aria-label")) {
    add(attribute_selector(element.tag, "aria-label", *aria), SelectorKind::AriaLabel);
  }
  for (auto name : kSelectorAttributes) {
    if (const auto* v = attr(name)) add(attribute_selector(element.tag, name, *v), SelectorKind::AttributeCss);
  }
  if (!element.css_selector.empty()) add(element.css_selector, classify_selector(element.css_selector));
  for (const auto& alt : element.alternates) add(alt, classify_selector(alt));
  if (!element.dom_path.empty()) add(dom_path_selector(element.dom_path, element.tag), SelectorKind::DomPath);

  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedSelector& a, const RankedSelector& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.selector.size() != b.selector.size()) return a.selector.size() < b.selector.size();
    return a.selector < b.selector;
  });
  return ranked;
}

StabilizedTrace stabilize_trace(const ExecutionTrace& trace, const StabilityPolicy& policy) {
  StabilizedTrace out;
  out.base = trace;
  int ui_actions = 0;
  for_each_action(trace, [&](ActionKey key, const ActionRecord& record) {
    if (!is_ui_interaction(record.kind())) return;
    ++ui_actions;
    const auto* element = element_for(trace, key);
    auto ranked = element ? rank_selectors(*element, policy) : std::vector<RankedSelector>{};
    bool unstable = ranked.empty() ||
                    (ranked.front().score <= policy.unstable_threshold &&
                     element->dom_path.size() > policy.max_dom_path_depth);
    if (unstable) {
      out.unstable_actions.insert(key);
      return;
    }
    StableLocator locator;
    locator.element_hash = element->element_hash;
    locator.primary = ranked.front().selector;
    locator.stability_score = ranked.front().score;
    for (std::size_t i = 1; i < ranked.size(); ++i) locator.alternates.push_back(ranked[i].selector);
    out.locators.emplace(key, std::move(locator));
  });
  if (ui_actions > 0 && out.locators.empty()) throw WhollyUnstable();
  for (const auto& key : out.unstable_actions) {
    if (!out.unstable_segments.empty() && out.unstable_segments.back().last + 1 >= key.step) {
      out.unstable_segments.back().last = std::max(out.unstable_segments.back().last, key.step);
    } else {
      out.unstable_segments.push_back({key.step, key.step});
    }
  }
  return out;
}

bool demote_stale_selectors(StableLocator& locator, const std::set<std::string>& stale) {
  auto all = locator.all_selectors();
  std::vector<std::string> fresh, old;
  for (auto& s : all) (stale.count(s) ? old : fresh).push_back(std::move(s));
  if (old.empty() || fresh.empty()) return false;
  fresh.insert(fresh.end(), old.begin(), old.end());
  locator.primary = fresh.front();
  locator.alternates.assign(fresh.begin() + 1, fresh.end());
  locator.stability_score = StabilityPolicy{}.score(classify_selector(locator.primary));
  return true;
}

}  // namespace walt
