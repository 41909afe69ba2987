#include "walt/tool.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace walt {

void check_bijection(const ActionScript& script, const InputSchema& schema) {
  auto used = script_placeholders(script);
  std::set<std::string> placeholders(used.begin(), used.end());
  std::set<std::string> fields;
  for (const auto& f : schema.fields) {
    if (!fields.insert(f.name).second) throw std::invalid_argument("duplicate schema field " + f.name);
  }
  for (const auto& p : placeholders) {
    if (!fields.count(p)) throw std::invalid_argument("placeholder {" + p + "} has no schema field");
  }
  for (const auto& f : fields) {
    if (!placeholders.count(f)) throw std::invalid_argument("schema field " + f + " is not used by the script");
  }
  std::set<std::string> params(script.params.begin(), script.params.end());
  if (params != placeholders) throw std::invalid_argument("script params differ from its placeholders");
}

}  // namespace walt
