#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "walt/builder.hpp"
#include "walt/fixture.hpp"
#include "walt/reasoner.hpp"

namespace walt::testing {

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path golden(const std::string& name) { return std::filesystem::path(WALT_GOLDEN_DIR) / name; }

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("walt-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return range(0, 1) == 1; }
  template <typename T>
  const T& pick(const std::vector<T>& items) { return items[range(0, static_cast<int>(items.size()) - 1)]; }

  std::string word(int min_len = 1, int max_len = 8) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    std::string out;
    int n = range(min_len, max_len);
    for (int i = 0; i < n; ++i) out += letters[range(0, 25)];
    return out;
  }

  std::string identifier() { return word(1, 1) + word(0, 6); }

  /// Arbitrary bytes from a mix of ASCII, reserved URL characters and UTF-8.
  std::string text(int max_len = 16) {
    static const std::vector<std::string> pieces = {"a", "Z", "0", " ", "+", "&", "=", "?", "/", "#", "%",
                                                    "{", "}", "\"", "'", "~", "-", "_", ".", "\xc3\xa9", "\xe2\x82\xac"};
    std::string out;
    int n = range(0, max_len);
    for (int i = 0; i < n; ++i) out += pick(pieces);
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline ToolCandidate fixture_candidate(const std::string& name) {
  for (const auto& c : fixture::fixture_candidates()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument(name);
}

inline BuildResult build_fixture_tool(const std::string& name, fixture::FixtureOptions options = {},
                                      BuildOptions build_options = {}) {
  auto reasoner = ScriptedReasoner::fixture_default();
  return build_tool(fixture_candidate(name), fixture::trace_source(options), {}, fixture::backend_factory(options),
                    &reasoner, nullptr, build_options);
}

}  // namespace walt::testing
