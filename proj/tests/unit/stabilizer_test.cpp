#include <gtest/gtest.h>

#include "support.hpp"
#include "walt/errors.hpp"
#include "walt/stabilizer.hpp"

using namespace walt;

namespace {

InteractedElement element(std::map<std::string, std::string> attrs, std::vector<int> path = {1, 0, 2}) {
  InteractedElement e;
  e.tag = "input";
  e.attributes = std::move(attrs);
  e.dom_path = std::move(path);
  e.parent_tag = "form";
  e.element_hash = compute_element_hash(e);
  return e;
}

}  // namespace

TEST(Stabilizer, RanksIdThenNameThenAriaThenPath) {
  auto ranked = rank_selectors(element({{"id", "searchquery"}, {"name", "q"}, {"aria-label", "Search"}}));
  ASSERT_GE(ranked.size(), 4u);
  EXPECT_EQ(ranked[0].selector, "#searchquery");
  EXPECT_EQ(ranked[1].selector, "input[name=q]");
  EXPECT_EQ(ranked[2].selector, "input[aria-label=Search]");
  EXPECT_EQ(ranked.back().kind, SelectorKind::DomPath);
}

TEST(Stabilizer, ClassifiesSelectors) {
  EXPECT_EQ(classify_selector("#a"), SelectorKind::Id);
  EXPECT_EQ(classify_selector("input[name=q]"), SelectorKind::Name);
  EXPECT_EQ(classify_selector("button[aria-label=Go]"), SelectorKind::AriaLabel);
  EXPECT_EQ(classify_selector("a[href=\"/x\"]"), SelectorKind::AttributeCss);
  EXPECT_EQ(classify_selector("div.card"), SelectorKind::Other);
  EXPECT_EQ(classify_selector("html > :nth-child(2)"), SelectorKind::DomPath);
}

TEST(Stabilizer, HashIgnoresClassesAndPosition) {
  auto a = element({{"id", "x"}, {"class", "big"}}, {1, 2});
  auto b = element({{"id", "x"}, {"class", "small red"}}, {4, 0, 0});
  EXPECT_EQ(a.element_hash, b.element_hash);
  auto c = element({{"id", "y"}});
  EXPECT_NE(a.element_hash, c.element_hash);
}

TEST(Stabilizer, HashUsesHrefPathOnly) {
  auto a = element({{"href", "http://h/listing/7?ref=1"}});
  auto b = element({{"href", "http://h/listing/7?ref=2"}});
  EXPECT_EQ(a.element_hash, b.element_hash);
}

TEST(Stabilizer, SearchTraceFullyStable) {
  auto trace = parse_trace(walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
  auto stab = stabilize_trace(trace);
  EXPECT_TRUE(stab.unstable_actions.empty());
  EXPECT_EQ(stab.locators.size(), 5u);
  EXPECT_EQ(stab.locator_for({2, 0})->primary, "#searchquery");
  EXPECT_EQ(stab.locator_for({2, 0})->alternates.front(), "input[name=q]");
}

TEST(Stabilizer, DeepAnonymousElementIsUnstable) {
  fixture::FixtureBackend backend;
  auto trace = fixture::scripted_demo(fixture::Demo::EditListing, backend);
  auto stab = stabilize_trace(trace);
  ASSERT_EQ(stab.unstable_actions.size(), 1u);
  auto key = *stab.unstable_actions.begin();
  EXPECT_EQ(element_for(trace, key)->attributes.at("data-dismiss"), "modal");
  ASSERT_EQ(stab.unstable_segments.size(), 1u);
  EXPECT_EQ(stab.unstable_segments[0].first, key.step);
}

TEST(Stabilizer, WhollyUnstableTraceThrows) {
  auto trace = parse_trace(walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
  for (auto& s : trace.steps) {
    for (auto& e : s.interacted) {
      e.attributes.clear();
      e.css_selector.clear();
      e.alternates.clear();
      e.dom_path = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    }
  }
  EXPECT_THROW(stabilize_trace(trace), WhollyUnstable);
}

TEST(Stabilizer, DemoteStaleSwapsPrimary) {
  StableLocator l{"h", "#old", {"input[name=q]", "html > :nth-child(1)"}, 1.0};
  EXPECT_TRUE(demote_stale_selectors(l, {"#old"}));
  EXPECT_EQ(l.primary, "input[name=q]");
  EXPECT_EQ(l.alternates.back(), "#old");
  EXPECT_DOUBLE_EQ(l.stability_score, StabilityPolicy{}.name_score);
  StableLocator all_stale{"h", "#a", {"#b"}, 1.0};
  EXPECT_FALSE(demote_stale_selectors(all_stale, {"#a", "#b"}));
}

TEST(StabilizerProperty, RankingIsDeduplicatedAndSorted) {
  walt::testing::Gen gen(21);
  for (int i = 0; i < 300; ++i) {
    std::map<std::string, std::string> attrs;
    for (auto name : {"id", "name", "aria-label", "placeholder", "title", "data-testid"}) {
      if (gen.coin()) attrs[name] = gen.coin() ? gen.identifier() : gen.word() + " " + gen.word();
    }
    std::vector<int> path;
    for (int d = gen.range(0, 12); d > 0; --d) path.push_back(gen.range(0, 5));
    auto e = element(attrs, path);
    if (gen.coin()) e.alternates.push_back("input." + gen.identifier());
    auto ranked = rank_selectors(e);
    std::set<std::string> seen;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      EXPECT_TRUE(seen.insert(ranked[k].selector).second);
      EXPECT_TRUE(dom::parse_selector(ranked[k].selector)) << ranked[k].selector;
      if (k > 0) EXPECT_GE(ranked[k - 1].score, ranked[k].score);
    }
    EXPECT_EQ(compute_element_hash(e), e.element_hash);
  }
}
