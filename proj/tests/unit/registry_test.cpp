#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "walt/errors.hpp"
#include "walt/registry.hpp"

using namespace walt;

namespace {

ToolRecord built(const std::string& name) {
  auto r = walt::testing::build_fixture_tool(name);
  if (!r.success) throw std::runtime_error("fixture build failed: " + name);
  return make_record(walt::testing::fixture_candidate(name), r);
}

const ToolRecord& search_record() {
  static const ToolRecord record = built("search_listings");
  return record;
}

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST(Registry, RecordRoundTripIsByteStable) {
  for (const auto& c : fixture::fixture_candidates()) {
    auto record = built(c.name);
    record.version = 1;
    auto text = serialize_record(record);
    auto parsed = parse_record(text);
    EXPECT_EQ(parsed, record) << c.name;
    EXPECT_EQ(serialize_record(parsed), text) << c.name;
  }
}

TEST(Registry, SchemaRoundTrip) {
  const auto& schema = search_record().tool.schema;
  auto text = serialize_schema(schema);
  EXPECT_EQ(parse_schema(text), schema);
  EXPECT_THROW(parse_schema("{\"type\":\"array\"}"), MalformedTool);
}

TEST(Registry, VersionsIncrement) {
  Registry reg;
  auto a = reg.register_tool(search_record());
  auto b = reg.register_tool(search_record());
  EXPECT_EQ(a.version, 1);
  EXPECT_EQ(b.version, 2);
  EXPECT_EQ(reg.latest("search_listings")->version, 2);
  EXPECT_EQ(reg.find("search_listings", 1)->version, 1);
  EXPECT_EQ(reg.find("search_listings", 3), nullptr);
  EXPECT_EQ(reg.latest("nope"), nullptr);
  EXPECT_EQ(reg.size(), 2u);
}

TEST(Registry, ExplicitVersionConflicts) {
  Registry reg;
  auto r = search_record();
  r.version = 3;
  reg.register_tool(r);
  EXPECT_THROW(reg.register_tool(r), Conflict);
  r.version = 0;
  EXPECT_EQ(reg.register_tool(r).version, 4);
}

TEST(Registry, RejectsUnvalidated) {
  Registry reg;
  auto r = search_record();
  r.provenance.report.fail_rate = Ratio{1, 6};
  EXPECT_THROW(reg.register_tool(r), NotValidated);
  r = search_record();
  r.provenance.report.cases.clear();
  EXPECT_THROW(reg.register_tool(r), NotValidated);
  EXPECT_EQ(reg.size(), 0u);
}

TEST(Registry, RejectsBrokenBijection) {
  Registry reg;
  auto r = search_record();
  r.tool.schema.fields.push_back(r.tool.schema.fields.front());
  r.tool.schema.fields.back().name = "unused";
  EXPECT_THROW(reg.register_tool(r), std::invalid_argument);
}

TEST(Registry, PersistsAndReloads) {
  walt::testing::TempDir dir;
  {
    Registry reg(dir.path());
    for (const auto& c : fixture::fixture_candidates()) reg.register_tool(built(c.name));
    reg.register_tool(search_record());
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / record_file_name("search_listings", 2)));
  auto loaded = load_registry(dir.path());
  EXPECT_TRUE(loaded.diagnostics.empty());
  EXPECT_EQ(loaded.registry.size(), 6u);
  EXPECT_EQ(loaded.registry.latest_records().size(), 5u);
  auto names = loaded.registry.records();
  for (std::size_t i = 1; i < names.size(); ++i) {
    EXPECT_LE(std::tie(names[i - 1]->tool.name, names[i - 1]->version),
              std::tie(names[i]->tool.name, names[i]->version));
  }
  Registry reopened(dir.path());
  EXPECT_EQ(reopened.register_tool(search_record()).version, 3);
}

TEST(Registry, CorruptFileIsDiagnosed) {
  walt::testing::TempDir dir;
  {
    Registry reg(dir.path());
    for (const auto& c : fixture::fixture_candidates()) {
      if (c.name != "post_comment") reg.register_tool(built(c.name));
    }
  }
  write(dir.path() / record_file_name("broken", 1), "{\"name\": \"broken\", \"version\": ");
  write(dir.path() / "notes.txt", "ignored");
  auto loaded = load_registry(dir.path());
  EXPECT_EQ(loaded.registry.size(), 4u);
  ASSERT_EQ(loaded.diagnostics.size(), 1u);
  EXPECT_EQ(loaded.diagnostics[0].file, record_file_name("broken", 1));
}

TEST(Registry, MismatchedFileNameIsDiagnosed) {
  walt::testing::TempDir dir;
  auto r = search_record();
  r.version = 1;
  write(dir.path() / record_file_name("search_listings", 9), serialize_record(r));
  auto loaded = load_registry(dir.path());
  EXPECT_EQ(loaded.registry.size(), 0u);
  EXPECT_EQ(loaded.diagnostics.size(), 1u);
}

TEST(Registry, MissingDirectoryIsEmpty) {
  walt::testing::TempDir dir;
  auto loaded = load_registry(dir.path() / "absent");
  EXPECT_EQ(loaded.registry.size(), 0u);
  EXPECT_TRUE(loaded.diagnostics.empty());
}

TEST(Registry, DescriptorsExposeSchemaOnly) {
  Registry reg;
  reg.register_tool(search_record());
  reg.register_tool(search_record());
  auto d = reg.descriptors();
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].name, "search_listings");
  EXPECT_EQ(d[0].version, 2);
  EXPECT_EQ(d[0].schema, search_record().tool.schema);
  auto text = serialize_descriptors(d);
  EXPECT_EQ(text.find("\"script\""), std::string::npos);
  EXPECT_NE(text.find("\"input_schema\""), std::string::npos);
}

TEST(Registry, StagingIsMemoryOnly) {
  auto staging = Registry::staging();
  EXPECT_TRUE(staging.is_staging());
  staging.stage(search_record().tool);
  EXPECT_EQ(staging.staged().size(), 1u);
  EXPECT_EQ(staging.size(), 0u);
  Registry plain;
  EXPECT_THROW(plain.stage(search_record().tool), std::logic_error);
}

TEST(Registry, ParseRejectsMalformed) {
  auto text = serialize_record(search_record());
  EXPECT_THROW(parse_record("[]"), MalformedTool);
  EXPECT_THROW(parse_record(text.substr(0, text.size() / 2)), MalformedTool);
  auto j = text;
  auto pos = j.find("\"{query}\"");
  if (pos != std::string::npos) {
    j.replace(pos, 9, "\"{nothing}\"");
    EXPECT_THROW(parse_record(j), Error);
  }
}

TEST(RegistryProperty, RandomVersionSequencesStayOrdered) {
  walt::testing::Gen gen(7);
  for (int round = 0; round < 20; ++round) {
    Registry reg;
    int highest = 0;
    std::set<int> taken;
    for (int i = 0; i < 6; ++i) {
      auto r = search_record();
      r.version = gen.coin() ? 0 : gen.range(1, 8);
      if (r.version != 0 && taken.count(r.version)) {
        EXPECT_THROW(reg.register_tool(r), Conflict);
        continue;
      }
      int v = reg.register_tool(r).version;
      if (r.version == 0) EXPECT_EQ(v, highest + 1);
      taken.insert(v);
      highest = std::max(highest, v);
    }
    EXPECT_EQ(reg.latest("search_listings")->version, highest);
  }
}
