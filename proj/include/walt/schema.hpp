#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walt/feedback.hpp"
#include "walt/script.hpp"
#include "walt/trace.hpp"

namespace walt {

enum class ValueType { Text, Integer, Number, Boolean, Enum };

struct FieldSpec {
  std::string name;
  ValueType type = ValueType::Text;
  bool required = false;
  std::vector<std::string> options;  // enum only, presentation order
  std::optional<std::string> default_value;
  std::string description;
  std::optional<std::string> example;
  bool operator==(const FieldSpec&) const = default;
};

struct InputSchema {
  std::vector<FieldSpec> fields;
  bool is_static = false;

  const FieldSpec* field(std::string_view name) const;
  FieldSpec* field(std::string_view name);
  bool operator==(const InputSchema&) const = default;
};

/// Tool inputs: param name to raw string value.
using Inputs = std::map<std::string, std::string>;

enum class ViolationRule { MissingRequired, TypeMismatch, NotInEnum, UnknownField };

struct Violation {
  std::string field;
  ViolationRule rule;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

std::string_view to_string(ValueType type);
std::optional<ValueType> value_type_from_string(std::string_view text);
std::string_view to_string(ViolationRule rule);
std::string describe(const Violation& v);

/// True when `value` conforms to the field's type (and enum membership).
bool value_conforms(const FieldSpec& field, const std::string& value);

/// Checks names, enum sizes, defaults/examples and the static flag.
/// Throws std::invalid_argument.
void check_schema(const InputSchema& schema);

/// Throws MissingParamSource.
InputSchema induce_schema(const ExecutionTrace& trace, const ActionScript& script,
                          const ToolCandidate& candidate);

std::vector<Violation> validate_input(const InputSchema& schema, const Inputs& inputs);

/// Throws UnknownField for feedback naming a field the schema lacks.
InputSchema amend_schema(const InputSchema& schema, const FeedbackItem& item);

/// Removes `values` from an enum field's options, degrading to text when
/// fewer than two remain. Unknown fields are ignored.
InputSchema drop_options(const InputSchema& schema, const std::string& field,
                         const std::vector<std::string>& values);

}  // namespace walt
