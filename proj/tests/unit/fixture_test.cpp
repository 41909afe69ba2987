#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <httplib.h>

#include "support.hpp"
#include "walt/errors.hpp"

using namespace walt;
using namespace walt::fixture;

namespace {

Request get(std::string path, QueryParams query = {}) {
  Request r;
  r.path = std::move(path);
  r.query = std::move(query);
  return r;
}

std::vector<std::string> result_ids(FixtureBackend& b) {
  std::vector<std::string> ids;
  std::istringstream rows(b.extract("result listings").text);
  for (std::string line; std::getline(rows, line);) ids.push_back(line.substr(0, line.find(' ')));
  return ids;
}

}  // namespace

TEST(Catalog, DeterministicPerSeed) {
  EXPECT_EQ(generate_catalog(0), generate_catalog(0));
  EXPECT_EQ(generate_catalog(0).size(), static_cast<std::size_t>(kCatalogSize));
  EXPECT_NE(generate_catalog(0), generate_catalog(1));
}

TEST(Catalog, ContainsTheBlueKayaks) {
  auto catalog = generate_catalog(0);
  auto kayak5 = std::find_if(catalog.begin(), catalog.end(), [](const Listing& l) { return l.id == 5; });
  auto kayak23 = std::find_if(catalog.begin(), catalog.end(), [](const Listing& l) { return l.id == 23; });
  ASSERT_NE(kayak5, catalog.end());
  ASSERT_NE(kayak23, catalog.end());
  EXPECT_EQ(kayak5->price_cents, 35800);
  EXPECT_EQ(kayak23->title, "Blue Kayak with Paddle");
  EXPECT_EQ(kayak23->price_cents, 26899);
  EXPECT_EQ(format_price(26899), "$268.99");
}

TEST(Catalog, EveryListingIsWellFormed) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto catalog = generate_catalog(seed);
    for (const auto& l : catalog) {
      EXPECT_FALSE(l.title.empty());
      EXPECT_GT(l.price_cents, 0);
      EXPECT_NE(std::find(kCategories.begin(), kCategories.end(), l.category), kCategories.end());
    }
  }
}

TEST(Site, Routes) {
  FixtureSite site;
  EXPECT_EQ(site.handle(get("/")).status, 200);
  EXPECT_EQ(site.handle(get("/search", {{"q", "kayak"}})).status, 200);
  EXPECT_EQ(site.handle(get("/listing/5")).status, 200);
  EXPECT_EQ(site.handle(get("/listing/999")).status, 404);
  EXPECT_EQ(site.handle(get("/listing/new")).status, 200);
  EXPECT_EQ(site.handle(get("/nowhere")).status, 404);
  auto bad = site.handle(get("/search", {{"category", "Sporting Goods"}}));
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.field_errors.count("category"), 1u);
}

TEST(Site, CreateValidatesAndRedirects) {
  FixtureSite site;
  Request post;
  post.method = "POST";
  post.path = "/listing/new";
  post.form = {{"title", "Red Canoe"}, {"price", ""}, {"category", "Boats"}};
  auto rejected = site.handle(post);
  EXPECT_EQ(rejected.status, 400);
  EXPECT_EQ(rejected.field_errors.at("price"), "required");
  post.form = {{"title", "Red Canoe"}, {"price", "120.50"}, {"category", "Boats"}};
  auto created = site.handle(post);
  EXPECT_EQ(created.status, 303);
  EXPECT_EQ(created.location, "/listing/41");
  ASSERT_NE(site.listing(41), nullptr);
  EXPECT_EQ(site.listing(41)->price_cents, 12050);
}

TEST(Backend, SearchSortsByPrice) {
  FixtureBackend b;
  ASSERT_TRUE(b.navigate("http://fixture.local/search?q=blue+kayak&category=Boats&sort=price_asc").ok());
  auto ids = result_ids(b);
  ASSERT_GE(ids.size(), 2u);
  EXPECT_EQ(ids[0], "23");
  auto rows = b.extract("result listings");
  ASSERT_TRUE(rows.ok());
  EXPECT_EQ(rows.text.rfind("23 | Blue Kayak with Paddle | $268.99 | Boats", 0), 0u);
}

TEST(Backend, FormSubmissionFollowsTheForm) {
  FixtureBackend b;
  ASSERT_TRUE(b.navigate("http://fixture.local/").ok());
  ASSERT_TRUE(b.input("#searchquery", "blue kayak").ok());
  ASSERT_TRUE(b.select("select[name=category]", "Boats").ok());
  EXPECT_EQ(b.select("select[name=category]", "Sporting Goods").status, BackendStatus::InvalidOption);
  auto options = b.select_options("select[name=category]");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->front(), "All");
  EXPECT_EQ(b.click("#nope").status, BackendStatus::NotFound);
}

TEST(Backend, RenderDelayNeedsWait) {
  FixtureOptions slow;
  slow.render_delay_ticks = 8;
  FixtureBackend b(slow);
  ASSERT_TRUE(b.navigate("http://fixture.local/").ok());
  EXPECT_EQ(b.input("#searchquery", "x").status, BackendStatus::NotReady);
  ASSERT_TRUE(b.wait(1).ok());
  EXPECT_TRUE(b.input("#searchquery", "x").ok());
}

TEST(Backend, DriftRenamesTheSearchBox) {
  FixtureOptions renamed;
  renamed.drift = Drift::RenamedId;
  FixtureBackend b(renamed);
  b.navigate("http://fixture.local/");
  EXPECT_EQ(b.find("#searchquery"), nullptr);
  EXPECT_NE(b.find("#search-input-v2"), nullptr);
  EXPECT_NE(b.find("input[name=q]"), nullptr);
  FixtureOptions rewrite;
  rewrite.drift = Drift::FullRewrite;
  FixtureBackend c(rewrite);
  c.navigate("http://fixture.local/");
  EXPECT_EQ(c.find("input[name=q]"), nullptr);
  EXPECT_NE(c.find("#kw-box"), nullptr);
}

TEST(Backend, BrokenSortIgnoresTheQuery) {
  FixtureOptions broken;
  broken.broken_sort = true;
  FixtureBackend b(broken);
  b.navigate("http://fixture.local/search-nosort?q=chair&sort=price_asc");
  FixtureBackend ok;
  ok.navigate("http://fixture.local/search?q=chair&sort=newest");
  EXPECT_EQ(b.extract("result listings").text, ok.extract("result listings").text);
}

TEST(Backend, EmptyResultsExtractNothing) {
  FixtureBackend b;
  b.navigate("http://fixture.local/search?q=zzz");
  auto r = b.extract("result listings");
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.text, "");
}

TEST(Demos, TracesAreDeterministic) {
  for (auto demo : {Demo::Search, Demo::CreateListing, Demo::PostComment, Demo::EditListing, Demo::SortResults}) {
    FixtureBackend a, b;
    EXPECT_EQ(serialize_trace(scripted_demo(demo, a)), serialize_trace(scripted_demo(demo, b))) << to_string(demo);
  }
  EXPECT_THROW(demo_from_string("juggle"), UnknownDemo);
}

TEST(Demos, SearchTraceMatchesGolden) {
  FixtureBackend b;
  auto trace = scripted_demo(Demo::Search, b);
  EXPECT_EQ(serialize_trace(trace), walt::testing::read_text(walt::testing::golden("search.s0.v0.trace.json")));
}

TEST(Demos, CandidatesMatchGolden) {
  EXPECT_EQ(serialize_candidates(fixture_candidates()), walt::testing::read_text(walt::testing::golden("fixture.candidates.json")));
}

TEST(Server, ServesOverHttp) {
  FixtureServer server;
  int port = server.start(0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  auto home = client.Get("/");
  ASSERT_TRUE(home);
  EXPECT_EQ(home->status, 200);
  EXPECT_NE(home->body.find("searchquery"), std::string::npos);
  auto search = client.Get("/search?q=blue%20kayak&sort=price_asc");
  ASSERT_TRUE(search);
  EXPECT_NE(search->body.find("Blue Kayak with Paddle"), std::string::npos);
  auto missing = client.Get("/listing/999");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto created = client.Post("/listing/new", "title=Lamp&price=12&category=Furniture", "application/x-www-form-urlencoded");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 303);
  EXPECT_EQ(created->get_header_value("Location"), "/listing/41");
  server.stop();
}
