#include <gtest/gtest.h>

#include "support.hpp"
#include "walt/errors.hpp"
#include "walt/validator.hpp"

using namespace walt;

namespace {

Tool search_tool(bool promote) {
  BuildOptions options;
  options.allow_promotion = promote;
  auto r = walt::testing::build_fixture_tool("search_listings", {}, options);
  EXPECT_TRUE(r.success);
  return *r.tool;
}

TestCase kayak_case(const std::string& category, const std::string& query = "kayak") {
  return {{{"query", query}, {"category", category}, {"sort", "newest"}}, {{ExpectationKind::ExtractionNonempty, ""}}};
}

}  // namespace

TEST(Ratio, ExactComparison) {
  EXPECT_EQ((Ratio{0, 5}), (Ratio{0, 6}));
  EXPECT_EQ((Ratio{2, 5}), (Ratio{4, 10}));
  EXPECT_LT((Ratio{1, 3}), (Ratio{2, 5}));
  EXPECT_EQ((Ratio{2, 5}).to_string(), "2/5");
  EXPECT_DOUBLE_EQ((Ratio{2, 5}).value(), 0.4);
}

TEST(Objective, LexicographicOrder) {
  Objective a{{0, 3}, 9, {1, 9}};
  Objective b{{1, 3}, 2, {0, 2}};
  Objective c{{0, 3}, 2, {1, 2}};
  Objective d{{0, 3}, 2, {0, 2}};
  EXPECT_LT(a, b);
  EXPECT_LT(c, a);
  EXPECT_LT(d, c);
  EXPECT_TRUE(d.accepted());
  EXPECT_FALSE(b.accepted());
}

TEST(Validator, SyntheticSuiteWithTwoOfFiveFailing) {
  auto tool = search_tool(false);
  TestSuite suite{{kayak_case("Boats"), kayak_case("Electronics", "no such item"), kayak_case("All"),
                   kayak_case("Furniture", "zzz"), kayak_case("Boats")}};
  auto report = validate_tool(tool, suite, fixture::backend_factory({}), nullptr);
  EXPECT_EQ(report.failing_cases(), 2);
  EXPECT_EQ(report.fail_rate.num, 2);
  EXPECT_EQ(report.fail_rate.den, 5);
  EXPECT_EQ(report.fail_rate.value(), 0.4);
  EXPECT_EQ(report.step_count, 6);
  EXPECT_EQ(report.agentic_ratio, (Ratio{0, 6}));
  ASSERT_EQ(report.feedback.size(), 2u);
  for (const auto& f : report.feedback) EXPECT_EQ(kind_of(f), FeedbackKind::SemanticMismatch);
}

TEST(Validator, DiagnosisMapping) {
  auto tool = search_tool(false);
  TestCase c{{{"query", "x"}, {"category", "Boats"}}, {}};
  ExecutionOutcome o;
  o.status = OutcomeStatus::Failed;
  o.failure = StepFailure{3, FailureKind::LocatorUnresolved, "gone", {"#sort", "select[name=sort]"}};
  EXPECT_EQ(diagnose_failure(o, c, tool), FeedbackItem(feedback::SelectorDrift{3, {"#sort", "select[name=sort]"}}));
  o.failure = StepFailure{1, FailureKind::Timeout, "slow"};
  EXPECT_EQ(diagnose_failure(o, c, tool), FeedbackItem(feedback::Timeout{1}));
  o.failure = StepFailure{2, FailureKind::InvalidOption, "no option", {}, {}, "Sporting Goods"};
  EXPECT_EQ(diagnose_failure(o, c, tool), FeedbackItem(feedback::UncoveredEnum{"category", "Sporting Goods", false}));
  o.failure = StepFailure{0, FailureKind::HttpError, "400", {}, {{"category", "unknown category 'Boats'"}}, std::nullopt, 400};
  EXPECT_EQ(diagnose_failure(o, c, tool), FeedbackItem(feedback::UncoveredEnum{"category", "Boats", false}));
  o.failure = StepFailure{0, FailureKind::HttpError, "400", {}, {{"q", "required"}}, std::nullopt, 400};
  EXPECT_EQ(diagnose_failure(o, c, tool), FeedbackItem(feedback::RequirednessMismatch{"query", true}));
  o.failure = StepFailure{0, FailureKind::NavigationFailed, "404"};
  EXPECT_THROW(diagnose_failure(o, c, tool), UnclassifiedFailure);
}

TEST(Validator, PromotedToolIsCheckedAgainstUiScript) {
  auto tool = search_tool(true);
  ASSERT_TRUE(tool.promoted());
  fixture::FixtureOptions broken;
  broken.broken_sort = true;
  // point the promoted URL at the cookie-sorted route
  auto& nav = std::get<step::Navigation>(tool.script.steps[0].body);
  nav.url_template.replace(nav.url_template.find("/search?"), 8, "/search-nosort?");
  TestCase c{{{"query", "kayak"}, {"category", "Boats"}, {"sort", "price_desc"}}, {{ExpectationKind::ExtractionNonempty, ""}}};
  auto report = validate_tool(tool, TestSuite{{c}}, fixture::backend_factory(broken), nullptr);
  ASSERT_EQ(report.feedback.size(), 1u);
  EXPECT_EQ(kind_of(report.feedback[0]), FeedbackKind::SemanticMismatch);
}

TEST(Validator, LiveOptionsMissingFromSchemaAreReported) {
  auto tool = search_tool(false);
  auto& f = *tool.schema.field("sort");
  f.options = {"newest", "price_asc"};
  auto report = validate_tool(tool, TestSuite{{kayak_case("Boats")}}, fixture::backend_factory({}), nullptr);
  ASSERT_EQ(report.feedback.size(), 1u);
  EXPECT_EQ(report.feedback[0], FeedbackItem(feedback::UncoveredEnum{"sort", "price_desc", true}));
}

TEST(ValidatorProperty, AgenticRatioIsExactOnRandomScripts) {
  walt::testing::Gen gen(51);
  for (int i = 0; i < 10; ++i) {
    ActionScript script;
    int agentic = 0;
    int n = gen.range(1, 20);
    for (int k = 0; k < n; ++k) {
      switch (gen.range(0, 3)) {
        case 0: script.steps.push_back({step::Navigation{"http://h/" + gen.word()}, "nav", {}}); break;
        case 1: {
          step::Interaction w;
          w.kind = step::InteractionKind::Wait;
          w.seconds = 1;
          script.steps.push_back({w, "wait", {}});
          break;
        }
        case 2: script.steps.push_back({step::Extraction{gen.word(), gen.word()}, "extract", {}}); break;
        default:
          script.steps.push_back({step::Agentic{gen.word(), gen.range(1, 8)}, "agent", {}});
          ++agentic;
      }
    }
    auto r = agentic_ratio(script);
    EXPECT_EQ(r.num, agentic);
    EXPECT_EQ(r.den, n);
    EXPECT_EQ(r, (Ratio{agentic, n}));
    auto report = summarize(script, {});
    EXPECT_EQ(report.agentic_ratio.num, agentic);
    EXPECT_EQ(report.step_count, n);
  }
}

TEST(ValidatorProperty, FailRateCountsFailingCases) {
  walt::testing::Gen gen(52);
  ActionScript script{{Step{step::Extraction{"g", "o"}, "e", {}}}, {}};
  for (int i = 0; i < 50; ++i) {
    std::vector<CaseResult> cases(gen.range(1, 12));
    int failing = 0;
    for (auto& c : cases) {
      c.passed = gen.coin();
      failing += c.passed ? 0 : 1;
    }
    auto report = summarize(script, cases);
    EXPECT_EQ(report.fail_rate, (Ratio{failing, static_cast<long long>(cases.size())}));
    EXPECT_EQ(report.fail_rate.den, static_cast<long long>(cases.size()));
  }
}
