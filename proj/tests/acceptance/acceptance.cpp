#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"
#include "walt/cli.hpp"
#include "walt/executor.hpp"
#include "walt/registry.hpp"
#include "walt/validator.hpp"

using namespace walt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  std::string failure;
  void expect(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

int run(std::vector<std::string> args, const fs::path& workspace, std::string* out = nullptr) {
  args.insert(args.begin(), {"--workspace", workspace.string()});
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

const Inputs kKayakInputs{{"query", "blue kayak"}, {"category", "Boats"}, {"sort", "price_asc"}};

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

// 1
void cheapest_kayak(Check& c) {
  auto start = Clock::now();
  auto r = testing::build_fixture_tool("search_listings");
  c.expect(r.success, "search_listings did not validate");
  if (!r.success) return;
  const auto& tool = *r.tool;
  c.expect(tool.promoted(), "not promoted");
  c.expect(tool.script.steps.size() == 2, "promoted script has " + std::to_string(tool.script.steps.size()) + " steps");
  c.expect(tool.script.steps.size() == 2 && tool.script.steps[0].kind() == StepKind::Navigation &&
               tool.script.steps[1].kind() == StepKind::Extraction,
           "promoted script is not navigation + extraction");
  c.expect(tool.ui_script && tool.ui_script->steps.size() >= 6, "pass-1 script has fewer than 6 steps");
  fixture::FixtureBackend backend;
  auto outcome = execute_tool(tool, kKayakInputs, backend, nullptr);
  c.expect(outcome.succeeded(), "execution failed");
  auto catalog = fixture::generate_catalog(0);
  std::vector<fixture::Listing> kayaks;
  for (const auto& l : catalog) {
    std::string title = l.title;
    std::transform(title.begin(), title.end(), title.begin(), ::tolower);
    if (l.category == "Boats" && title.find("blue kayak") != std::string::npos) kayaks.push_back(l);
  }
  std::stable_sort(kayaks.begin(), kayaks.end(),
                   [](const auto& a, const auto& b) { return a.price_cents < b.price_cents; });
  c.expect(kayaks.size() >= 2, "catalog lacks two blue kayaks");
  std::string text = outcome.outputs.empty() ? "" : outcome.outputs.begin()->second;
  c.expect(!kayaks.empty() && first_line(text) == fixture::format_row(kayaks.front()),
           "first result '" + first_line(text) + "' is not the cheapest blue kayak");
  double elapsed = seconds_since(start);
  c.expect(elapsed < 5, "took " + std::to_string(elapsed) + " s");
}

// 2
void metrics(Check& c) {
  auto r = testing::build_fixture_tool("search_listings", {}, BuildOptions{false, {}});
  c.expect(r.success, "search_listings did not validate");
  if (!r.success) return;
  auto kase = [](const std::string& q, const std::string& cat) {
    return TestCase{{{"query", q}, {"category", cat}, {"sort", "newest"}}, {{ExpectationKind::ExtractionNonempty, ""}}};
  };
  TestSuite suite{{kase("kayak", "Boats"), kase("no such item", "Electronics"), kase("kayak", "All"),
                   kase("zzz", "Furniture"), kase("kayak", "Boats")}};
  auto report = validate_tool(*r.tool, suite, fixture::backend_factory({}), nullptr);
  c.expect(report.fail_rate.num == 2 && report.fail_rate.den == 5 && report.fail_rate.value() == 0.4,
           "fail_rate " + report.fail_rate.to_string());
  testing::Gen gen(2024);
  for (int i = 0; i < 10; ++i) {
    ActionScript script;
    long long agentic = 0;
    int n = gen.range(1, 24);
    for (int k = 0; k < n; ++k) {
      if (gen.coin()) {
        script.steps.push_back({step::Agentic{gen.word(), gen.range(1, 8)}, "a", {}});
        ++agentic;
      } else {
        script.steps.push_back({step::Navigation{"http://h/" + gen.word()}, "n", {}});
      }
    }
    auto ratio = agentic_ratio(script);
    c.expect(ratio.num == agentic && ratio.den == n, "agentic_ratio " + ratio.to_string());
  }
}

// 3
void promotion_soundness(Check& c) {
  int promoted = 0;
  for (const auto& candidate : fixture::fixture_candidates()) {
    auto r = testing::build_fixture_tool(candidate.name);
    c.expect(r.success, candidate.name + " did not validate");
    if (!r.success || !r.tool->promoted()) continue;
    ++promoted;
    Tool ui = *r.tool;
    ui.script = *ui.ui_script;
    ui.ui_script.reset();
    for (const auto& kase : r.tool->suite.cases) {
      fixture::FixtureBackend a, b;
      auto pa = execute_tool(*r.tool, kase.inputs, a, nullptr);
      auto pb = execute_tool(ui, kase.inputs, b, nullptr);
      c.expect(pa.succeeded() && pb.succeeded() && pa.outputs == pb.outputs,
               candidate.name + " promoted and UI outputs differ");
    }
  }
  c.expect(promoted >= 1, "no tool was promoted");

  fixture::FixtureOptions broken;
  broken.broken_sort = true;
  auto reasoner = ScriptedReasoner::fixture_default();
  auto base = fixture::trace_source(broken);
  auto refused = build_tool(
      testing::fixture_candidate("search_listings"),
      [&](const ToolCandidate& cand, int attempt) { return base(cand, attempt + 2); }, {},
      fixture::backend_factory(broken), &reasoner);
  c.expect(refused.success && !refused.tool->promoted() && !refused.history[0].promoted,
           "broken route promotion was not refused");
  auto demoted = build_tool(testing::fixture_candidate("search_listings"), base, {}, fixture::backend_factory(broken),
                            &reasoner);
  bool saw_mismatch = false;
  for (const auto& a : demoted.history) {
    for (const auto& f : a.feedback) saw_mismatch |= a.promoted && kind_of(f) == FeedbackKind::SemanticMismatch;
  }
  c.expect(demoted.success && !demoted.tool->promoted() && saw_mismatch, "broken route promotion was not demoted");
}

// 4
void recovery(Check& c) {
  fixture::FixtureOptions drift;
  drift.drift = fixture::Drift::RenamedId;
  auto before = fixture::trace_source({});
  auto after = fixture::trace_source(drift);
  auto reasoner = ScriptedReasoner::fixture_default();
  BuildOptions no_promotion{false, {}};
  auto drifted = build_tool(
      testing::fixture_candidate("search_listings"),
      [&](const ToolCandidate& cand, int attempt) { return attempt == 1 ? before(cand, attempt) : after(cand, attempt); },
      {}, fixture::backend_factory(drift), &reasoner, nullptr, no_promotion);
  c.expect(drifted.success && drifted.attempts() <= 2, "drifted build did not succeed by attempt 2");

  auto clean = testing::build_fixture_tool("search_listings", {}, no_promotion);
  c.expect(clean.success, "clean build failed");
  if (clean.success) {
    fixture::FixtureOptions rewrite;
    rewrite.drift = fixture::Drift::FullRewrite;
    fixture::FixtureBackend plain(rewrite);
    c.expect(!execute_tool(*clean.tool, kKayakInputs, plain, nullptr).succeeded(), "rewrite did not break the script");
    fixture::FixtureBackend backend(rewrite);
    try {
      auto outcome = execute_with_fallback(*clean.tool, kKayakInputs, backend, &reasoner);
      c.expect(outcome.succeeded() && outcome.fallback_used, "fallback did not complete");
      std::string text = outcome.outputs.empty() ? "" : outcome.outputs.begin()->second;
      c.expect(first_line(text).rfind("23 |", 0) == 0, "fallback returned '" + first_line(text) + "'");
    } catch (const std::exception& e) {
      c.expect(false, std::string("fallback threw: ") + e.what());
    }
  }

  ToolCandidate ghost{"ghost", "http://fixture.local/no-such-page", "Read a page that does not exist", {}};
  auto failed = build_tool(ghost, fixture::trace_source({}), {}, fixture::backend_factory({}), &reasoner);
  c.expect(!failed.success && failed.attempts() == 4, "404 candidate took " + std::to_string(failed.attempts()) + " attempts");
}

// 5
void corpus(Check& c) {
  testing::TempDir ws;
  c.expect(run({"ingest-candidates", "--fixture"}, ws.path()) == kExitOk, "ingest failed");
  for (const auto& candidate : fixture::fixture_candidates()) {
    c.expect(run({"build", candidate.name}, ws.path()) == kExitOk, candidate.name + " did not build");
  }
  auto loaded = load_registry(ws.path() / "tools");
  int with_agentic = 0;
  for (const auto* r : loaded.registry.latest_records()) {
    c.expect(r->provenance.report.fail_rate.is_zero(), r->tool.name + " has nonzero fail_rate");
    with_agentic += r->tool.script.agentic_count() > 0 ? 1 : 0;
  }
  c.expect(loaded.registry.latest_records().size() == 5, "registry does not hold 5 tools");
  c.expect(with_agentic <= 1, std::to_string(with_agentic) + " tools have agentic steps");
  std::string report;
  c.expect(run({"report"}, ws.path(), &report) == kExitOk, "report failed");
  c.expect(report.find("tries until success") != std::string::npos && report.find("\n1        5   #####") != std::string::npos,
           "report lacks the tries table");
}

// 6
std::vector<std::string> full_run(const fs::path& ws) {
  std::vector<std::string> artifacts;
  run({"ingest-candidates", "--fixture"}, ws);
  for (const auto& candidate : fixture::fixture_candidates()) run({"build", candidate.name}, ws);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(ws / "tools")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) artifacts.push_back(f.filename().string() + "\n" + testing::read_text(f));
  std::string out;
  run({"report"}, ws, &out);
  artifacts.push_back(out);
  run({"--json", "report"}, ws, &out);
  artifacts.push_back(out);
  run({"run", "search_listings", "--input", "query=blue kayak", "category=Boats", "sort=price_asc"}, ws, &out);
  artifacts.push_back(out);
  run({"run", "edit_listing", "--input", "listing_id=7", "price=99"}, ws, &out);
  artifacts.push_back(out);
  run({"--json", "run", "post_comment", "--input", "listing_id=12", "comment=Still available?"}, ws, &out);
  artifacts.push_back(out);
  return artifacts;
}

void determinism(Check& c) {
  testing::TempDir a, b;
  auto first = full_run(a.path());
  auto second = full_run(b.path());
  c.expect(first.size() >= 10, "pipeline produced " + std::to_string(first.size()) + " artifacts");
  c.expect(first == second, "two runs differ");
}

// 7
void suite_budget(Check& c, Clock::time_point start) {
  double elapsed = seconds_since(start);
#ifdef WALT_UNIT_BINARY
  auto unit_start = Clock::now();
  std::string command = std::string("\"") + WALT_UNIT_BINARY + "\" --gtest_brief=1 > /dev/null 2>&1";
  c.expect(std::system(command.c_str()) == 0, "unit tests failed");
  elapsed += seconds_since(unit_start);
#endif
  c.expect(elapsed < 60, "took " + std::to_string(elapsed) + " s");
}

}  // namespace

int main() {
  auto start = Clock::now();
  std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"search_listings promoted to 2 steps, cheapest blue kayak first", cheapest_kayak},
      {"objective metrics exact", metrics},
      {"promotion soundness", promotion_soundness},
      {"refinement loop recovery", recovery},
      {"tool corpus profile", corpus},
      {"determinism across runs", determinism},
      {"whole suite under 60 s", [&](Check& c) { suite_budget(c, start); }},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    ++n;
    if (c.failure.empty()) {
      std::cout << "PASS " << n << " " << name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << n << " " << name << ": " << c.failure << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}
