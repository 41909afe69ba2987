#pragma once

// Internal JSON helpers shared by the serializers. Not installed.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace walt::jsonio {

using Json = nlohmann::ordered_json;

/// Thrown by the readers below; each public parse_* entry point converts it
/// into its own error type.
struct ShapeError {
  std::string path;
  std::string reason;
};

[[noreturn]] inline void fail(const std::string& path, const std::string& reason) {
  throw ShapeError{path.empty() ? "/" : path, reason};
}

inline std::string child_path(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

inline std::string child_path(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

inline const Json& expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected object");
  return j;
}

inline const Json& expect_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected array");
  return j;
}

inline const Json& require(const Json& obj, std::string_view key, const std::string& path) {
  expect_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) fail(child_path(path, key), "missing required field");
  return *it;
}

inline const Json* find(const Json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string get_string(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) fail(child_path(path, key), "expected string");
  return v.get<std::string>();
}

inline std::optional<std::string> opt_string(const Json& obj, std::string_view key,
                                             const std::string& path) {
  const auto* v = find(obj, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) fail(child_path(path, key), "expected string");
  return v->get<std::string>();
}

inline long long get_int(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) fail(child_path(path, key), "expected integer");
  return v.get<long long>();
}

inline double get_number(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) fail(child_path(path, key), "expected number");
  return v.get<double>();
}

inline bool get_bool(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_boolean()) fail(child_path(path, key), "expected boolean");
  return v.get<bool>();
}

inline std::vector<std::string> get_strings(const Json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(child_path(path, i), "expected string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

inline Json parse_document(std::string_view raw) {
  try {
    return Json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail("byte " + std::to_string(e.byte), "invalid JSON");
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace walt::jsonio
