#include <gtest/gtest.h>

#include "support.hpp"
#include "walt/errors.hpp"
#include "walt/fixture.hpp"
#include "walt/trace.hpp"

using namespace walt;

TEST(Trace, GoldenRoundTripIsByteStable) {
  auto raw = walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json"));
  auto trace = parse_trace(raw);
  EXPECT_EQ(serialize_trace(trace), raw);
  EXPECT_EQ(trace.candidate_name, "search_listings");
  EXPECT_EQ(trace.steps.size(), 7u);
  EXPECT_EQ(trace.param_bindings.at("query"), "blue kayak");
}

TEST(Trace, ScriptedDemoMatchesGolden) {
  fixture::FixtureBackend backend;
  auto trace = fixture::scripted_demo("search", backend, 0);
  EXPECT_EQ(serialize_trace(trace), walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
}

TEST(Trace, AllDemosValidateAndRoundTrip) {
  for (auto name : {"search", "sort_results", "create_listing", "edit_listing", "post_comment"}) {
    for (int variant = 0; variant < 3; ++variant) {
      fixture::FixtureBackend backend;
      auto trace = fixture::scripted_demo(name, backend, variant);
      EXPECT_NO_THROW(validate_trace(trace));
      EXPECT_EQ(parse_trace(serialize_trace(trace)), trace) << name << " v" << variant;
    }
  }
}

TEST(Trace, MisalignedElementsAreRejected) {
  auto trace = parse_trace(walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
  trace.steps[1].interacted.clear();
  EXPECT_THROW(validate_trace(trace), AlignmentError);
  EXPECT_THROW(parse_trace(serialize_trace(trace)), AlignmentError);
}

TEST(Trace, MalformedDocumentsReportPosition) {
  EXPECT_THROW(parse_trace("{"), MalformedTrace);
  EXPECT_THROW(parse_trace(R"({"candidate":"x","steps":[]})"), MalformedTrace);
  try {
    parse_trace(R"({"candidate":"x","steps":[{"url":"http://h/","title":"","agent_brain":{},"actions":[{"kind":"teleport"}],"interacted_elements":[]}]})");
    FAIL();
  } catch (const MalformedTrace& e) {
    EXPECT_NE(e.position().find("/steps/0"), std::string::npos) << e.position();
  }
}

TEST(Trace, UnknownUnicodeSurvives) {
  auto trace = parse_trace(walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
  trace.param_bindings["query"] = "caf\xc3\xa9 \xe2\x82\xac";
  trace.steps[2].actions[0].payload = action::InputText{"caf\xc3\xa9 \xe2\x82\xac"};
  EXPECT_EQ(parse_trace(serialize_trace(trace)), trace);
}

TEST(Candidates, GoldenRoundTrip) {
  auto raw = walt::testing::read_text(walt::testing::golden("fixture.candidates.json"));
  auto candidates = parse_candidates(raw);
  EXPECT_EQ(candidates, fixture::fixture_candidates());
  EXPECT_EQ(serialize_candidates(candidates), raw);
}

TEST(Candidates, Validation) {
  auto candidates = fixture::fixture_candidates();
  candidates.push_back(candidates.front());
  EXPECT_THROW(parse_candidates(serialize_candidates(candidates)), DuplicateName);
  ToolCandidate bad{"x", "not a url", "d", {}};
  EXPECT_THROW(validate_candidate(bad), MalformedCandidates);
  ToolCandidate empty_options{"y", "http://h/", "d", {{ElementType::Select, "Pick", std::vector<std::string>{}}}};
  EXPECT_THROW(validate_candidate(empty_options), MalformedCandidates);
  ToolCandidate unknown_options{"z", "http://h/", "d", {{ElementType::Select, "Pick", std::nullopt}}};
  EXPECT_NO_THROW(validate_candidate(unknown_options));
}
