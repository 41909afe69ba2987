#include <gtest/gtest.h>

#include "support.hpp"
#include "walt/errors.hpp"
#include "walt/synthesizer.hpp"

using namespace walt;

namespace {

ExecutionTrace golden_trace() { return parse_trace(walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json"))); }

ExecutionTrace demo(fixture::Demo d, int variant = 0) {
  fixture::FixtureBackend backend;
  return fixture::scripted_demo(d, backend, variant);
}

}  // namespace

TEST(Classify, DecisionTree) {
  StableLocator loc{"h", "#a", {}, 1.0};
  EXPECT_EQ(classify_action({action::GoToUrl{"http://h/"}}, std::nullopt), StepKind::Navigation);
  EXPECT_EQ(classify_action({action::ExtractContent{"rows"}}, std::nullopt), StepKind::Extraction);
  EXPECT_EQ(classify_action({action::Click{}}, loc), StepKind::Interaction);
  EXPECT_EQ(classify_action({action::Click{}}, std::nullopt, true), StepKind::Agentic);
  EXPECT_EQ(classify_action({action::Click{}}, std::nullopt, false), StepKind::Skip);
  EXPECT_EQ(classify_action({action::Wait{1}}, std::nullopt), StepKind::Interaction);
}

TEST(Synthesizer, SearchScriptShape) {
  auto trace = golden_trace();
  auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate("search_listings"));
  ASSERT_EQ(script.steps.size(), 6u);
  std::vector<StepKind> kinds;
  for (const auto& s : script.steps) kinds.push_back(s.kind());
  EXPECT_EQ(kinds, (std::vector<StepKind>{StepKind::Navigation, StepKind::Interaction, StepKind::Interaction,
                                          StepKind::Interaction, StepKind::Interaction, StepKind::Extraction}));
  EXPECT_EQ(script.params, (std::vector<std::string>{"query", "category", "sort"}));
  const auto& input = std::get<step::Interaction>(script.steps[1].body);
  EXPECT_EQ(input.kind, step::InteractionKind::Input);
  EXPECT_EQ(input.value, "{query}");
  EXPECT_EQ(input.locator->primary, "#searchquery");
  EXPECT_EQ(std::get<step::Extraction>(script.steps[5].body).output, "results");
  EXPECT_NO_THROW(validate_script(script));
}

TEST(Synthesizer, TemplatesUrlPathSegments) {
  auto trace = demo(fixture::Demo::EditListing);
  auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate("edit_listing"));
  EXPECT_EQ(std::get<step::Navigation>(script.steps[0].body).url_template, "http://fixture.local/listing/{listing_id}/edit");
  ASSERT_EQ(script.agentic_count(), 1u);
  const auto& agentic = std::get<step::Agentic>(script.steps[1].body);
  EXPECT_EQ(agentic.task, "Close the promotional popup");
  EXPECT_EQ(agentic.max_steps, 3);
}

TEST(Synthesizer, InfersBindingsWhenTraceHasNone) {
  auto trace = golden_trace();
  trace.param_bindings.clear();
  auto bindings = effective_bindings(stabilize_trace(trace));
  EXPECT_EQ(bindings.at("q"), "blue kayak");
  EXPECT_EQ(bindings.at("category"), "Boats");
  EXPECT_EQ(bindings.at("sort"), "price_asc");
}

TEST(Synthesizer, UnstableNonEssentialActionsAreSkipped) {
  auto trace = golden_trace();
  // drop the extraction and make the focus click anonymous, deep and form-less
  trace.steps.pop_back();
  auto& e = trace.steps[1].interacted[0];
  e.attributes.clear();
  e.css_selector.clear();
  e.alternates.clear();
  e.form.reset();
  e.dom_path = std::vector<int>(10, 0);
  EXPECT_FALSE(is_essential(trace, {1, 0}));
  auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate("search_listings"));
  EXPECT_EQ(script.agentic_count(), 0u);
  EXPECT_EQ(script.steps.size(), 5u);
}

TEST(Synthesizer, UnstableActionBeforeExtractionIsAgentic) {
  auto trace = golden_trace();
  auto& e = trace.steps[1].interacted[0];
  e.attributes.clear();
  e.css_selector.clear();
  e.alternates.clear();
  e.dom_path = std::vector<int>(10, 0);
  EXPECT_TRUE(is_essential(trace, {1, 0}));
  auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate("search_listings"));
  EXPECT_EQ(script.agentic_count(), 1u);
}

TEST(Synthesizer, UnstableSubmitIsEssential) {
  auto trace = golden_trace();
  ActionKey submit{5, 0};
  ASSERT_EQ(trace.steps[5].actions[0].kind(), ActionKind::ClickElement);
  EXPECT_TRUE(is_essential(trace, submit));
}

TEST(Synthesizer, SerializedScriptRoundTrips) {
  for (auto d : {fixture::Demo::Search, fixture::Demo::CreateListing, fixture::Demo::EditListing,
                 fixture::Demo::PostComment, fixture::Demo::SortResults}) {
    auto trace = demo(d);
    auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate(trace.candidate_name));
    auto raw = serialize_script(script);
    EXPECT_EQ(parse_script(raw), script);
    EXPECT_EQ(serialize_script(parse_script(raw)), raw);
    EXPECT_NE(raw.find("\"description\""), std::string::npos);
  }
}

TEST(Synthesizer, ParseScriptRejectsBadDocuments) {
  EXPECT_THROW(parse_script(R"({"params":[],"steps":[{"type":"fly","description":""}]})"), MalformedTool);
  EXPECT_THROW(parse_script(R"({"params":[],"steps":[{"type":"agent","description":"","task":"t","max_steps":9}]})"),
               MalformedTool);
  EXPECT_THROW(parse_script(R"({"params":[],"steps":[{"type":"navigation","description":"","url":"http://h/{x}"}]})"),
               UnboundPlaceholder);
  EXPECT_THROW(parse_script(R"({"params":[],"steps":[]})"), EmptyScript);
}

TEST(TestInputs, OneCasePerUnexercisedOption) {
  auto trace = golden_trace();
  auto script = synthesize_script(stabilize_trace(trace), walt::testing::fixture_candidate("search_listings"));
  auto schema = induce_schema(trace, script, walt::testing::fixture_candidate("search_listings"));
  auto suite = extract_test_inputs(trace, schema);
  // demo + 3 other categories + 2 other sorts
  ASSERT_EQ(suite.cases.size(), 6u);
  EXPECT_EQ(suite.cases[0].inputs, (Inputs{{"category", "Boats"}, {"query", "blue kayak"}, {"sort", "price_asc"}}));
  ASSERT_EQ(suite.cases[0].expectations.size(), 2u);
  EXPECT_EQ(suite.cases[0].expectations[0].kind, ExpectationKind::Completes);
  EXPECT_EQ(suite.cases[0].expectations[1].kind, ExpectationKind::ExtractionNonempty);
  std::set<std::string> categories, sorts;
  for (const auto& c : suite.cases) {
    categories.insert(c.inputs.at("category"));
    sorts.insert(c.inputs.at("sort"));
    EXPECT_TRUE(validate_input(schema, c.inputs).empty());
  }
  EXPECT_EQ(categories.size(), 4u);
  EXPECT_EQ(sorts.size(), 3u);
}

TEST(TestInputs, UrlExpectationWithoutExtraction) {
  auto trace = demo(fixture::Demo::PostComment);
  auto candidate = walt::testing::fixture_candidate("post_comment");
  auto script = synthesize_script(stabilize_trace(trace), candidate);
  auto suite = extract_test_inputs(trace, induce_schema(trace, script, candidate));
  ASSERT_EQ(suite.cases.size(), 1u);
  ASSERT_EQ(suite.cases[0].expectations.size(), 2u);
  EXPECT_EQ(suite.cases[0].expectations[1].kind, ExpectationKind::UrlMatches);
  EXPECT_EQ(suite.cases[0].expectations[1].pattern, "http://fixture.local/listing/{listing_id}");
}
