#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "walt/builder.hpp"
#include "walt/tool.hpp"
#include "walt/validator.hpp"

namespace walt {

struct Provenance {
  ToolCandidate candidate;
  int attempts = 0;
  std::vector<AttemptRecord> history;
  ValidationReport report;
  bool operator==(const Provenance&) const = default;
};

struct ToolRecord {
  Tool tool;
  Provenance provenance;
  int version = 0;
  bool operator==(const ToolRecord&) const = default;
};

/// Record from a successful build. Throws std::invalid_argument if it failed.
ToolRecord make_record(const ToolCandidate& candidate, const BuildResult& result);

std::string serialize_record(const ToolRecord& record);
/// Throws MalformedTool.
ToolRecord parse_record(std::string_view raw);

std::string serialize_report(const ValidationReport& report);
std::string serialize_schema(const InputSchema& schema);
/// Throws MalformedTool.
InputSchema parse_schema(std::string_view raw);

/// What an agent sees of a tool: name, description and input schema.
struct ActionDescriptor {
  std::string name;
  std::string description;
  InputSchema schema;
  int version = 0;
};

std::string serialize_descriptors(const std::vector<ActionDescriptor>& descriptors);

/// "<name>.v<version>.tool.json"
std::string record_file_name(const std::string& name, int version);

/// Tool records keyed by name and version. A registry opened on a directory
/// persists every registration; a staging registry keeps unvalidated tools in
/// memory only.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::filesystem::path directory);
  static Registry staging();

  /// Version 0 means next free version. Throws NotValidated, Conflict, or
  /// std::invalid_argument when the script/schema bijection fails.
  const ToolRecord& register_tool(ToolRecord record);
  /// Staging registries only.
  void stage(const Tool& tool);
  const std::vector<Tool>& staged() const { return staged_; }

  const ToolRecord* latest(std::string_view name) const;
  const ToolRecord* find(std::string_view name, int version) const;
  /// All records ordered by name, then version.
  std::vector<const ToolRecord*> records() const;
  std::vector<const ToolRecord*> latest_records() const;
  std::vector<ActionDescriptor> descriptors() const;
  std::size_t size() const;
  bool is_staging() const { return staging_; }
  const std::optional<std::filesystem::path>& directory() const { return directory_; }

 private:
  friend struct RegistryLoader;
  std::map<std::string, std::map<int, ToolRecord>, std::less<>> records_;
  std::vector<Tool> staged_;
  std::optional<std::filesystem::path> directory_;
  bool staging_ = false;
};

struct LoadDiagnostic {
  std::string file;
  std::string message;
};

struct LoadResult {
  Registry registry;
  std::vector<LoadDiagnostic> diagnostics;
};

/// Loads every *.tool.json in `directory`; a missing directory is empty.
/// Bad files become diagnostics and the rest still load.
LoadResult load_registry(const std::filesystem::path& directory);

}  // namespace walt
