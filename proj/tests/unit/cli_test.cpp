#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "walt/cli.hpp"
#include "walt/registry.hpp"

using namespace walt;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), {"--workspace", dir_.path().string()});
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  walt::testing::TempDir dir_;
};

}  // namespace

TEST_F(CliTest, BuildRunListReport) {
  auto built = cli({"build", "search_listings"});
  ASSERT_EQ(built.code, kExitOk) << built.out << built.err;
  EXPECT_NE(built.out.find("registered search_listings v1 (2 steps, promoted) attempts=1"), std::string::npos);

  auto run = cli({"run", "search_listings", "--input", "query=blue kayak", "category=Boats", "sort=price_asc"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  EXPECT_EQ(run.out.rfind("23 | Blue Kayak with Paddle | $268.99", 0), 0u);

  auto list = cli({"list"});
  EXPECT_EQ(list.code, kExitOk);
  EXPECT_NE(list.out.find("search_listings"), std::string::npos);

  auto report = cli({"report"});
  EXPECT_EQ(report.code, kExitOk);
  EXPECT_NE(report.out.find("tries until success"), std::string::npos);
  EXPECT_NE(report.out.find("0 of 1 tools have at least one agentic step"), std::string::npos);

  EXPECT_EQ(cli({"validate", "search_listings"}).code, kExitOk);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "nothing"}).code, kExitNotFound);
  EXPECT_EQ(cli({"build", "nothing"}).code, kExitNotFound);
  ASSERT_EQ(cli({"build", "search_listings"}).code, kExitOk);
  EXPECT_EQ(cli({"run", "search_listings", "--input", "query=x", "category=Sporting Goods"}).code, kExitInvalidInput);
  EXPECT_EQ(cli({"run", "search_listings", "--input", "bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "search_listings", "--version", "9"}).code, kExitNotFound);
  EXPECT_EQ(cli({"demo-record", "juggle"}).code, kExitNotFound);
}

TEST_F(CliTest, FailedBuildExitsThree) {
  auto file = dir_.path() / "ghost.json";
  std::ofstream(file) << R"({"tools":[{"name":"ghost","start_url":"http://fixture.local/no-such-page","description":"Read a missing page","elements":[]}]})";
  ASSERT_EQ(cli({"ingest-candidates", file.string()}).code, kExitOk);
  auto r = cli({"build", "ghost"});
  EXPECT_EQ(r.code, kExitBuildFailed);
  EXPECT_NE(r.out.find("build failed after 4 attempts"), std::string::npos);
  EXPECT_EQ(cli({"ingest-candidates", (dir_.path() / "absent.json").string()}).code, kExitNotFound);
}

TEST_F(CliTest, JsonMode) {
  auto built = cli({"--json", "build", "post_comment"});
  ASSERT_EQ(built.code, kExitOk);
  EXPECT_EQ(built.out.rfind("{", 0), 0u);
  EXPECT_NE(built.out.find("\"success\": true"), std::string::npos);
  auto missing = cli({"--json", "run", "nothing"});
  EXPECT_EQ(missing.code, kExitNotFound);
  EXPECT_NE(missing.out.find("\"exit\": 5"), std::string::npos);
  auto descriptors = cli({"list", "--descriptors"});
  EXPECT_NE(descriptors.out.find("\"input_schema\""), std::string::npos);
}

TEST_F(CliTest, DemoRecordMatchesGolden) {
  auto r = cli({"demo-record", "search"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(walt::testing::read_text(dir_.path() / "traces" / "search.s0.v0.trace.json"),
            walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
}

TEST_F(CliTest, FixtureFlagsReachTheSite) {
  ASSERT_EQ(cli({"build", "search_listings", "--no-promotion"}).code, kExitOk);
  auto drifted = cli({"--drift", "full-rewrite", "--reasoner", "none", "run", "search_listings", "--input",
                      "query=blue kayak", "category=Boats", "sort=price_asc"});
  EXPECT_EQ(drifted.code, kExitExecutionFailed);
  auto recovered = cli({"--drift", "full-rewrite", "run", "search_listings", "--input", "query=blue kayak",
                        "category=Boats", "sort=price_asc"});
  EXPECT_EQ(recovered.code, kExitOk) << recovered.out << recovered.err;
  EXPECT_NE(recovered.err.find("agentic fallback"), std::string::npos);
  EXPECT_EQ(cli({"--drift", "sideways", "demo-record", "search"}).code, kExitUsage);
}
