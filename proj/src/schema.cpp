#include "walt/schema.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <stdexcept>

#include "walt/errors.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

constexpr std::string_view kValueTypes[] = {"text", "integer", "number", "boolean", "enum"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parses_integer(const std::string& s) {
  long long v = 0;
  auto begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

bool parses_number(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

bool contains_ci(const std::vector<std::string>& list, const std::string& value) {
  auto key = lower(value);
  return std::any_of(list.begin(), list.end(), [&](const std::string& s) { return lower(s) == key; });
}

ElementType element_type_of(const InteractedElement& e) {
  if (e.tag == "select") return ElementType::Select;
  if (e.tag == "textarea") return ElementType::Textarea;
  if (e.tag == "a") return ElementType::Link;
  if (e.tag == "button") return ElementType::Button;
  return ElementType::Input;
}

struct ParamSource {
  const InteractedElement* element = nullptr;
  bool in_url = false;
  bool in_task = false;
};

std::map<std::string, ParamSource> find_sources(const ExecutionTrace& trace, const ActionScript& script) {
  std::map<std::string, ParamSource> out;
  for (const auto& s : script.steps) {
    auto names = step_placeholders(s);
    for (const auto& name : names) {
      auto& src = out[name];
      if (std::holds_alternative<step::Interaction>(s.body)) {
        if (src.element == nullptr && s.source) src.element = element_for(trace, *s.source);
      } else if (std::holds_alternative<step::Navigation>(s.body)) {
        src.in_url = true;
      } else {
        src.in_task = true;
      }
    }
  }
  return out;
}

// Picks the select hint sharing the most options with the DOM list, else the
// one at the same ordinal position among select hints.
const ElementHint* match_select_hint(const std::vector<const ElementHint*>& hints,
                                     const std::vector<std::string>& dom_options, std::size_t ordinal) {
  const ElementHint* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto* h : hints) {
    if (!h->options) continue;
    std::size_t overlap = 0;
    for (const auto& o : *h->options) overlap += contains_ci(dom_options, o) ? 1 : 0;
    if (overlap > best_overlap) {
      best = h;
      best_overlap = overlap;
    }
  }
  if (best) return best;
  return ordinal < hints.size() ? hints[ordinal] : nullptr;
}

}  // namespace

const FieldSpec* InputSchema::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

FieldSpec* InputSchema::field(std::string_view name) {
  for (auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view to_string(ValueType type) { return kValueTypes[static_cast<int>(type)]; }

std::optional<ValueType> value_type_from_string(std::string_view text) {
  for (int i = 0; i < 5; ++i) {
    if (kValueTypes[i] == text) return static_cast<ValueType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::MissingRequired: return "missing_required";
    case ViolationRule::TypeMismatch: return "type_mismatch";
    case ViolationRule::NotInEnum: return "not_in_enum";
    case ViolationRule::UnknownField: return "unknown_field";
  }
  return "?";
}

std::string describe(const Violation& v) {
  return v.field + ": " + std::string(to_string(v.rule)) + (v.detail.empty() ? "" : " (" + v.detail + ")");
}

bool value_conforms(const FieldSpec& field, const std::string& value) {
  switch (field.type) {
    case ValueType::Text: return true;
    case ValueType::Integer: return parses_integer(value);
    case ValueType::Number: return parses_number(value);
    case ValueType::Boolean: return value == "true" || value == "false";
    case ValueType::Enum:
      return std::find(field.options.begin(), field.options.end(), value) != field.options.end();
  }
  return false;
}

void check_schema(const InputSchema& schema) {
  std::set<std::string> names;
  for (const auto& f : schema.fields) {
    if (f.name.empty() || !names.insert(f.name).second) {
      throw std::invalid_argument("schema field names must be nonempty and unique: '" + f.name + "'");
    }
    if (f.type == ValueType::Enum && f.options.size() < 2) {
      throw std::invalid_argument("enum field '" + f.name + "' needs at least two options");
    }
    if (f.type != ValueType::Enum && !f.options.empty()) {
      throw std::invalid_argument("non-enum field '" + f.name + "' has options");
    }
    if (f.default_value && !value_conforms(f, *f.default_value)) {
      throw std::invalid_argument("default of '" + f.name + "' does not satisfy its field");
    }
    if (f.example && !value_conforms(f, *f.example)) {
      throw std::invalid_argument("example of '" + f.name + "' does not satisfy its field");
    }
  }
  if (schema.fields.empty() != schema.is_static) {
    throw std::invalid_argument("schema must have fields unless it is static");
  }
}

InputSchema induce_schema(const ExecutionTrace& trace, const ActionScript& script,
                          const ToolCandidate& candidate) {
  auto sources = find_sources(trace, script);
  std::vector<const ElementHint*> select_hints, text_hints;
  for (const auto& h : candidate.elements) {
    if (h.type == ElementType::Select) select_hints.push_back(&h);
    if (h.type == ElementType::Input || h.type == ElementType::Textarea) text_hints.push_back(&h);
  }
  std::size_t select_ordinal = 0, text_ordinal = 0;

  InputSchema schema;
  for (const auto& name : script.params) {
    auto it = sources.find(name);
    if (it == sources.end() || (!it->second.element && !it->second.in_url && !it->second.in_task)) {
      throw MissingParamSource(name);
    }
    const auto& src = it->second;
    FieldSpec f;
    f.name = name;
    auto binding = trace.param_bindings.find(name);
    if (binding != trace.param_bindings.end()) f.example = binding->second;

    if (const auto* e = src.element) {
      const ElementHint* hint = nullptr;
      if (element_type_of(*e) == ElementType::Select) {
        hint = match_select_hint(select_hints, e->options, select_ordinal++);
        f.options = e->options;
        if (hint && hint->options) {
          for (const auto& o : *hint->options) {
            if (!contains_ci(f.options, o)) f.options.push_back(o);
          }
        }
        f.type = f.options.size() >= 2 ? ValueType::Enum : ValueType::Text;
        if (f.type != ValueType::Enum) f.options.clear();
        if (e->selected_default && value_conforms(f, *e->selected_default)) f.default_value = e->selected_default;
      } else {
        if (text_ordinal < text_hints.size()) hint = text_hints[text_ordinal];
        ++text_ordinal;
        auto type = e->attributes.find("type");
        bool numeric = type != e->attributes.end() && type->second == "number";
        if (numeric && f.example && parses_integer(*f.example)) {
          f.type = ValueType::Integer;
        } else if (numeric && f.example && parses_number(*f.example)) {
          f.type = ValueType::Number;
        } else if (type != e->attributes.end() && type->second == "checkbox") {
          f.type = ValueType::Boolean;
        }
      }
      if (e->required) {
        f.required = *e->required;
      } else {
        f.required = f.example && !f.example->empty();
      }
      if (hint && !hint->purpose.empty()) f.description = hint->purpose;
    } else {
      f.required = true;
    }
    if (f.description.empty()) {
      f.description = src.element ? "Value for " + name : "Value substituted into the " +
                                                             std::string(src.in_url ? "URL" : "task") +
                                                             " as {" + name + "}";
    }
    if (f.example && !value_conforms(f, *f.example)) {
      if (f.type == ValueType::Enum) {
        f.options.push_back(*f.example);
      } else {
        f.type = ValueType::Text;
      }
    }
    schema.fields.push_back(std::move(f));
  }
  schema.is_static = schema.fields.empty();
  check_schema(schema);
  return schema;
}

std::vector<Violation> validate_input(const InputSchema& schema, const Inputs& inputs) {
  std::vector<Violation> out;
  for (const auto& f : schema.fields) {
    auto it = inputs.find(f.name);
    if (it == inputs.end()) {
      if (f.required) out.push_back({f.name, ViolationRule::MissingRequired, ""});
      continue;
    }
    if (value_conforms(f, it->second)) continue;
    if (f.type == ValueType::Enum) {
      out.push_back({f.name, ViolationRule::NotInEnum, "'" + it->second + "' is not an allowed option"});
    } else {
      out.push_back({f.name, ViolationRule::TypeMismatch,
                     "'" + it->second + "' is not a valid " + std::string(to_string(f.type))});
    }
  }
  for (const auto& [key, value] : inputs) {
    if (!schema.field(key)) out.push_back({key, ViolationRule::UnknownField, ""});
  }
  return out;
}

InputSchema amend_schema(const InputSchema& schema, const FeedbackItem& item) {
  InputSchema out = schema;
  if (const auto* u = std::get_if<feedback::UncoveredEnum>(&item)) {
    auto* f = out.field(u->field);
    if (!f) throw UnknownField(u->field);
    if (!u->offered_by_site) return out;
    if (f->type == ValueType::Enum) {
      if (std::find(f->options.begin(), f->options.end(), u->value) == f->options.end()) {
        f->options.push_back(u->value);
      }
    }
  } else if (const auto* r = std::get_if<feedback::RequirednessMismatch>(&item)) {
    auto* f = out.field(r->field);
    if (!f) throw UnknownField(r->field);
    f->required = r->site_requires;
  }
  return out;
}

InputSchema drop_options(const InputSchema& schema, const std::string& field,
                         const std::vector<std::string>& values) {
  InputSchema out = schema;
  auto* f = out.field(field);
  if (!f || f->type != ValueType::Enum) return out;
  std::erase_if(f->options, [&](const std::string& o) {
    return std::find(values.begin(), values.end(), o) != values.end();
  });
  if (f->options.size() < 2) {
    f->type = ValueType::Text;
    f->options.clear();
  }
  if (f->default_value && !value_conforms(*f, *f->default_value)) f->default_value.reset();
  if (f->example && !value_conforms(*f, *f->example)) f->example.reset();
  return out;
}

}  // namespace walt
