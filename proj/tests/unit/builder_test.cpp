#include <gtest/gtest.h>

#include "support.hpp"
#include "walt/builder.hpp"
#include "walt/registry.hpp"

using namespace walt;

namespace {

TraceSource shifted(fixture::FixtureOptions options, int shift) {
  auto base = fixture::trace_source(options);
  return [base, shift](const ToolCandidate& c, int attempt) { return base(c, attempt + shift); };
}

}  // namespace

TEST(Builder, CleanSearchValidatesFirstTry) {
  auto r = walt::testing::build_fixture_tool("search_listings");
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts(), 1);
  EXPECT_TRUE(r.tool->promoted());
  EXPECT_EQ(r.tool->script.steps.size(), 2u);
  EXPECT_EQ(r.history[0].pass1_step_count, 6);
  EXPECT_TRUE(r.report->fail_rate.is_zero());
}

TEST(Builder, StagesEveryGeneratedTool) {
  auto reasoner = ScriptedReasoner::fixture_default();
  auto staging = Registry::staging();
  auto r = build_tool(walt::testing::fixture_candidate("search_listings"), fixture::trace_source({}), {},
                      fixture::backend_factory({}), &reasoner, &staging);
  ASSERT_TRUE(r.success);
  ASSERT_EQ(staging.staged().size(), 1u);
  EXPECT_EQ(staging.staged()[0], *r.tool);
  EXPECT_THROW(staging.register_tool(make_record(walt::testing::fixture_candidate("search_listings"), r)), std::logic_error);
}

TEST(Builder, RejectedEnumValueIsDroppedOnRetry) {
  auto candidate = walt::testing::fixture_candidate("search_listings");
  candidate.elements[1].options->push_back("Sporting Goods");
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(candidate, fixture::trace_source({}), {}, fixture::backend_factory({}), &reasoner);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts(), 2);
  ASSERT_FALSE(r.history[0].feedback.empty());
  EXPECT_EQ(r.history[0].feedback[0], FeedbackItem(feedback::UncoveredEnum{"category", "Sporting Goods", false}));
  const auto& options = r.tool->schema.field("category")->options;
  EXPECT_EQ(std::count(options.begin(), options.end(), "Sporting Goods"), 0);
}

TEST(Builder, SelectorDriftRecoversByAttemptTwo) {
  fixture::FixtureOptions drift;
  drift.drift = fixture::Drift::RenamedId;
  auto before = fixture::trace_source({});
  auto after = fixture::trace_source(drift);
  BuildOptions no_promotion;
  no_promotion.allow_promotion = false;
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(
      walt::testing::fixture_candidate("search_listings"),
      [&](const ToolCandidate& c, int attempt) { return attempt == 1 ? before(c, attempt) : after(c, attempt); }, {},
      fixture::backend_factory(drift), &reasoner, nullptr, no_promotion);
  ASSERT_TRUE(r.success);
  EXPECT_LE(r.attempts(), 2);
}

TEST(Builder, StaleSelectorIsSwappedOut) {
  fixture::FixtureOptions drift;
  drift.drift = fixture::Drift::RenamedId;
  auto after = fixture::trace_source(drift);
  BuildOptions no_promotion;
  no_promotion.allow_promotion = false;
  auto reasoner = ScriptedReasoner::fixture_default();
  // pre-drift trace whose only selector for the box is its id
  auto before = [](const ToolCandidate& c, int attempt) {
    auto t = fixture::trace_source({})(c, attempt);
    for (auto& s : t.steps) {
      for (auto& e : s.interacted) {
        if (e.attributes.count("id") && e.attributes.at("id") == "searchquery") {
          e.attributes.erase("name");
          e.css_selector.clear();
          e.alternates.clear();
          e.dom_path.clear();
        }
      }
    }
    return t;
  };
  auto r = build_tool(
      walt::testing::fixture_candidate("search_listings"),
      [&](const ToolCandidate& c, int attempt) { return attempt == 1 ? before(c, attempt) : after(c, attempt); }, {},
      fixture::backend_factory(drift), &reasoner, nullptr, no_promotion);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts(), 2);
  EXPECT_EQ(kind_of(r.history[0].feedback.at(0)), FeedbackKind::SelectorDrift);
  const auto& input = std::get<step::Interaction>(r.tool->script.steps[1].body);
  EXPECT_EQ(input.locator->primary, "#search-input-v2");
}

TEST(Builder, BrokenRoutePromotionRefused) {
  fixture::FixtureOptions broken;
  broken.broken_sort = true;
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(walt::testing::fixture_candidate("search_listings"), shifted(broken, 2), {},
                      fixture::backend_factory(broken), &reasoner);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts(), 1);
  EXPECT_FALSE(r.tool->promoted());
  EXPECT_NE(r.history[0].promotion_note.find("differs"), std::string::npos);
}

TEST(Builder, BrokenRoutePromotionDemoted) {
  fixture::FixtureOptions broken;
  broken.broken_sort = true;
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(walt::testing::fixture_candidate("search_listings"), fixture::trace_source(broken), {},
                      fixture::backend_factory(broken), &reasoner);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts(), 2);
  EXPECT_TRUE(r.history[0].promoted);
  EXPECT_EQ(kind_of(r.history[0].feedback.at(0)), FeedbackKind::SemanticMismatch);
  EXPECT_FALSE(r.tool->promoted());
}

TEST(Builder, TimeoutInsertsWait) {
  fixture::FixtureOptions slow;
  slow.render_delay_ticks = 8;
  BuildOptions no_promotion;
  no_promotion.allow_promotion = false;
  auto r = walt::testing::build_fixture_tool("search_listings", slow, no_promotion);
  ASSERT_TRUE(r.success);
  EXPECT_GT(r.attempts(), 1);
  EXPECT_EQ(kind_of(r.history[0].feedback.at(0)), FeedbackKind::Timeout);
  int waits = 0;
  for (const auto& s : r.tool->script.steps) {
    if (const auto* i = std::get_if<step::Interaction>(&s.body); i && i->kind == step::InteractionKind::Wait) ++waits;
  }
  EXPECT_GE(waits, 1);
}

TEST(Builder, MissingPageFailsAfterBudget) {
  ToolCandidate ghost{"ghost", "http://fixture.local/no-such-page", "Read a page that does not exist", {}};
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(ghost, fixture::trace_source({}), {}, fixture::backend_factory({}), &reasoner);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.attempts(), 4);
  EXPECT_FALSE(r.tool);
  for (const auto& a : r.history) EXPECT_EQ(a.outcome, "rejected");
  auto two = build_tool(ghost, fixture::trace_source({}), {2}, fixture::backend_factory({}), &reasoner);
  EXPECT_EQ(two.attempts(), 2);
}

TEST(Builder, TraceSourceErrorsAreRecorded) {
  auto reasoner = ScriptedReasoner::fixture_default();
  auto r = build_tool(
      walt::testing::fixture_candidate("search_listings"),
      [](const ToolCandidate&, int) -> ExecutionTrace { throw std::runtime_error("recorder crashed"); }, {3},
      fixture::backend_factory({}), &reasoner);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.attempts(), 3);
  EXPECT_EQ(r.history[0].outcome, "demonstrate");
  EXPECT_EQ(r.history[0].error, "recorder crashed");
}

TEST(BuilderProperty, BestObjectiveNeverWorsensAndStepsNeverGrow) {
  std::vector<fixture::FixtureOptions> sites;
  for (int delay : {0, 8}) {
    for (bool broken : {false, true}) sites.push_back({0, fixture::Drift::None, broken, delay});
  }
  for (const auto& site : sites) {
    for (const auto& c : fixture::fixture_candidates()) {
      auto reasoner = ScriptedReasoner::fixture_default();
      auto r = build_tool(c, fixture::trace_source(site), {}, fixture::backend_factory(site), &reasoner);
      std::optional<Objective> best;
      for (const auto& a : r.history) {
        if (!a.objective) continue;
        if (!best || *a.objective < *best) best = a.objective;
        EXPECT_LE(a.objective->step_count, a.pass1_step_count);
      }
      EXPECT_EQ(r.best, best);
      if (r.success) {
        EXPECT_TRUE(r.report->fail_rate.is_zero());
        EXPECT_EQ(r.best, compute_objective(*r.report));
      }
    }
  }
}

TEST(BuilderProperty, DeterministicAcrossRuns) {
  for (const auto& c : fixture::fixture_candidates()) {
    auto a = walt::testing::build_fixture_tool(c.name);
    auto b = walt::testing::build_fixture_tool(c.name);
    ASSERT_TRUE(a.success);
    EXPECT_EQ(serialize_record(make_record(c, a)), serialize_record(make_record(c, b)));
  }
}
