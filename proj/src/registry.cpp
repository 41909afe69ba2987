#include "walt/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "serde.hpp"
#include "walt/errors.hpp"

namespace walt {

using jsonio::Json;
namespace fs = std::filesystem;

namespace {

Json ratio_json(const Ratio& r) { return Json{{"num", r.num}, {"den", r.den}}; }

Ratio ratio_from(const Json& j, const std::string& path) {
  Ratio r{jsonio::get_int(j, "num", path), jsonio::get_int(j, "den", path)};
  if (r.num < 0 || r.den <= 0) jsonio::fail(path, "ratio needs num >= 0 and den > 0");
  return r;
}

Json string_map(const std::map<std::string, std::string>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, std::string> string_map_from(const Json& j, const std::string& path) {
  jsonio::expect_object(j, path);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) jsonio::fail(jsonio::child_path(path, k), "expected string");
    out[k] = v.get<std::string>();
  }
  return out;
}

Json schema_json(const InputSchema& schema) {
  Json props = Json::object();
  Json required = Json::array();
  for (const auto& f : schema.fields) {
    Json p = Json::object();
    p["type"] = f.type == ValueType::Enum || f.type == ValueType::Text ? "string" : std::string(to_string(f.type));
    if (f.type == ValueType::Enum) p["enum"] = f.options;
    if (f.default_value) p["default"] = *f.default_value;
    p["description"] = f.description;
    if (f.example) p["examples"] = Json::array({*f.example});
    props[f.name] = std::move(p);
    if (f.required) required.push_back(f.name);
  }
  return Json{{"type", "object"}, {"properties", std::move(props)}, {"required", std::move(required)}};
}

InputSchema schema_from(const Json& j, const std::string& path) {
  InputSchema schema;
  const auto& props = jsonio::require(j, "properties", path);
  auto ppath = jsonio::child_path(path, "properties");
  jsonio::expect_object(props, ppath);
  std::vector<std::string> required;
  if (const auto* r = jsonio::find(j, "required")) required = jsonio::get_strings(*r, jsonio::child_path(path, "required"));
  for (const auto& [name, p] : props.items()) {
    auto fpath = jsonio::child_path(ppath, name);
    FieldSpec f;
    f.name = name;
    auto type = jsonio::get_string(p, "type", fpath);
    if (const auto* e = jsonio::find(p, "enum")) {
      f.type = ValueType::Enum;
      f.options = jsonio::get_strings(*e, jsonio::child_path(fpath, "enum"));
    } else if (type == "string") {
      f.type = ValueType::Text;
    } else if (auto t = value_type_from_string(type); t && *t != ValueType::Enum) {
      f.type = *t;
    } else {
      jsonio::fail(jsonio::child_path(fpath, "type"), "unknown type '" + type + "'");
    }
    f.default_value = jsonio::opt_string(p, "default", fpath);
    f.description = jsonio::opt_string(p, "description", fpath).value_or("");
    if (const auto* ex = jsonio::find(p, "examples")) {
      auto examples = jsonio::get_strings(*ex, jsonio::child_path(fpath, "examples"));
      if (!examples.empty()) f.example = examples.front();
    }
    f.required = std::find(required.begin(), required.end(), name) != required.end();
    schema.fields.push_back(std::move(f));
  }
  for (const auto& r : required) {
    if (!schema.field(r)) jsonio::fail(jsonio::child_path(path, "required"), "unknown field " + r);
  }
  schema.is_static = schema.fields.empty();
  return schema;
}

Json suite_json(const TestSuite& suite) {
  Json cases = Json::array();
  for (const auto& c : suite.cases) {
    Json exps = Json::array();
    for (const auto& e : c.expectations) {
      Json ej{{"kind", std::string(to_string(e.kind))}};
      if (e.kind == ExpectationKind::UrlMatches) ej["pattern"] = e.pattern;
      exps.push_back(std::move(ej));
    }
    cases.push_back(Json{{"inputs", string_map(c.inputs)}, {"expectations", std::move(exps)}});
  }
  return cases;
}

TestCase case_from(const Json& j, const std::string& path) {
  TestCase c;
  c.inputs = string_map_from(jsonio::require(j, "inputs", path), jsonio::child_path(path, "inputs"));
  const auto& exps = jsonio::require(j, "expectations", path);
  auto epath = jsonio::child_path(path, "expectations");
  jsonio::expect_array(exps, epath);
  for (std::size_t i = 0; i < exps.size(); ++i) {
    auto ipath = jsonio::child_path(epath, i);
    auto kind = jsonio::get_string(exps[i], "kind", ipath);
    Expectation e;
    if (kind == "completes") {
      e.kind = ExpectationKind::Completes;
    } else if (kind == "extraction_nonempty") {
      e.kind = ExpectationKind::ExtractionNonempty;
    } else if (kind == "url_matches") {
      e.kind = ExpectationKind::UrlMatches;
      e.pattern = jsonio::get_string(exps[i], "pattern", ipath);
    } else {
      jsonio::fail(jsonio::child_path(ipath, "kind"), "unknown expectation '" + kind + "'");
    }
    c.expectations.push_back(std::move(e));
  }
  return c;
}

TestSuite suite_from(const Json& j, const std::string& path) {
  jsonio::expect_array(j, path);
  TestSuite suite;
  for (std::size_t i = 0; i < j.size(); ++i) suite.cases.push_back(case_from(j[i], jsonio::child_path(path, i)));
  return suite;
}

Json feedback_json(const FeedbackItem& item) {
  Json j{{"kind", std::string(to_string(kind_of(item)))}};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, feedback::SelectorDrift>) {
          j["step"] = f.step;
          j["selectors"] = f.selectors;
        } else if constexpr (std::is_same_v<T, feedback::UncoveredEnum>) {
          j["field"] = f.field;
          j["value"] = f.value;
          j["offered_by_site"] = f.offered_by_site;
        } else if constexpr (std::is_same_v<T, feedback::Timeout>) {
          j["step"] = f.step;
        } else if constexpr (std::is_same_v<T, feedback::SemanticMismatch>) {
          j["step"] = f.step;
          j["expected"] = f.expected;
          j["actual"] = f.actual;
        } else {
          j["field"] = f.field;
          j["site_requires"] = f.site_requires;
        }
      },
      item);
  return j;
}

FeedbackItem feedback_from(const Json& j, const std::string& path) {
  auto kind = jsonio::get_string(j, "kind", path);
  auto step = [&] { return static_cast<int>(jsonio::get_int(j, "step", path)); };
  if (kind == "selector_drift") {
    return feedback::SelectorDrift{step(), jsonio::get_strings(jsonio::require(j, "selectors", path), jsonio::child_path(path, "selectors"))};
  }
  if (kind == "uncovered_enum") {
    return feedback::UncoveredEnum{jsonio::get_string(j, "field", path), jsonio::get_string(j, "value", path),
                                   jsonio::get_bool(j, "offered_by_site", path)};
  }
  if (kind == "timeout") return feedback::Timeout{step()};
  if (kind == "semantic_mismatch") {
    return feedback::SemanticMismatch{step(), jsonio::get_string(j, "expected", path), jsonio::get_string(j, "actual", path)};
  }
  if (kind == "requiredness_mismatch") {
    return feedback::RequirednessMismatch{jsonio::get_string(j, "field", path), jsonio::get_bool(j, "site_requires", path)};
  }
  jsonio::fail(jsonio::child_path(path, "kind"), "unknown feedback kind '" + kind + "'");
}

const std::vector<std::string_view> kFailureKinds = {"locator_unresolved", "navigation_failed", "agentic_budget_exhausted",
                                                     "timeout", "http_error", "invalid_option", "bad_template"};

Json outcome_json(const ExecutionOutcome& o) {
  Json j{{"status", o.succeeded() ? "success" : "failed"},
         {"steps_executed", o.steps_executed},
         {"agentic_steps_executed", o.agentic_steps_executed},
         {"fallback_used", o.fallback_used},
         {"backend_calls", o.backend_calls},
         {"final_url", o.final_url},
         {"outputs", string_map(o.outputs)}};
  if (!o.observed_options.empty()) {
    Json obs = Json::object();
    for (const auto& [step, options] : o.observed_options) obs[std::to_string(step)] = options;
    j["observed_options"] = std::move(obs);
  }
  if (o.failure) {
    const auto& f = *o.failure;
    Json fj{{"step", f.step}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}};
    if (!f.selectors.empty()) fj["selectors"] = f.selectors;
    if (!f.field_errors.empty()) fj["field_errors"] = string_map(f.field_errors);
    if (f.value) fj["value"] = *f.value;
    if (f.http_status) fj["http_status"] = f.http_status;
    j["failure"] = std::move(fj);
  }
  return j;
}

ExecutionOutcome outcome_from(const Json& j, const std::string& path) {
  ExecutionOutcome o;
  auto status = jsonio::get_string(j, "status", path);
  if (status != "success" && status != "failed") jsonio::fail(jsonio::child_path(path, "status"), "unknown status");
  o.status = status == "success" ? OutcomeStatus::Success : OutcomeStatus::Failed;
  o.steps_executed = static_cast<int>(jsonio::get_int(j, "steps_executed", path));
  o.agentic_steps_executed = static_cast<int>(jsonio::get_int(j, "agentic_steps_executed", path));
  o.fallback_used = jsonio::get_bool(j, "fallback_used", path);
  o.backend_calls = static_cast<int>(jsonio::get_int(j, "backend_calls", path));
  o.final_url = jsonio::get_string(j, "final_url", path);
  o.outputs = string_map_from(jsonio::require(j, "outputs", path), jsonio::child_path(path, "outputs"));
  if (const auto* obs = jsonio::find(j, "observed_options")) {
    auto opath = jsonio::child_path(path, "observed_options");
    jsonio::expect_object(*obs, opath);
    for (const auto& [k, v] : obs->items()) {
      int step = 0;
      try {
        step = std::stoi(k);
      } catch (const std::exception&) {
        jsonio::fail(jsonio::child_path(opath, k), "expected step index");
      }
      o.observed_options[step] = jsonio::get_strings(v, jsonio::child_path(opath, k));
    }
  }
  if (const auto* fj = jsonio::find(j, "failure")) {
    auto fpath = jsonio::child_path(path, "failure");
    StepFailure f;
    f.step = static_cast<int>(jsonio::get_int(*fj, "step", fpath));
    auto kind = jsonio::get_string(*fj, "kind", fpath);
    auto it = std::find(kFailureKinds.begin(), kFailureKinds.end(), kind);
    if (it == kFailureKinds.end()) jsonio::fail(jsonio::child_path(fpath, "kind"), "unknown failure kind");
    f.kind = static_cast<FailureKind>(it - kFailureKinds.begin());
    f.message = jsonio::get_string(*fj, "message", fpath);
    if (const auto* s = jsonio::find(*fj, "selectors")) f.selectors = jsonio::get_strings(*s, jsonio::child_path(fpath, "selectors"));
    if (const auto* e = jsonio::find(*fj, "field_errors")) f.field_errors = string_map_from(*e, jsonio::child_path(fpath, "field_errors"));
    f.value = jsonio::opt_string(*fj, "value", fpath);
    if (jsonio::find(*fj, "http_status")) f.http_status = static_cast<int>(jsonio::get_int(*fj, "http_status", fpath));
    o.failure = std::move(f);
  }
  return o;
}

Json report_json(const ValidationReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json cj{{"inputs", string_map(c.test_case.inputs)}, {"passed", c.passed}, {"outcome", outcome_json(c.outcome)}};
    cj["expectations"] = suite_json(TestSuite{{c.test_case}})[0]["expectations"];
    if (c.feedback) cj["feedback"] = feedback_json(*c.feedback);
    if (c.unclassified) cj["unclassified"] = *c.unclassified;
    cases.push_back(std::move(cj));
  }
  return Json{{"fail_rate", ratio_json(r.fail_rate)},
              {"step_count", r.step_count},
              {"agentic_ratio", ratio_json(r.agentic_ratio)},
              {"cases", std::move(cases)}};
}

ValidationReport report_from(const Json& j, const std::string& path) {
  const auto& cases = jsonio::require(j, "cases", path);
  auto cpath = jsonio::child_path(path, "cases");
  jsonio::expect_array(cases, cpath);
  std::vector<CaseResult> results;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto ipath = jsonio::child_path(cpath, i);
    CaseResult c;
    c.test_case = case_from(cases[i], ipath);
    c.passed = jsonio::get_bool(cases[i], "passed", ipath);
    c.outcome = outcome_from(jsonio::require(cases[i], "outcome", ipath), jsonio::child_path(ipath, "outcome"));
    if (const auto* f = jsonio::find(cases[i], "feedback")) c.feedback = feedback_from(*f, jsonio::child_path(ipath, "feedback"));
    c.unclassified = jsonio::opt_string(cases[i], "unclassified", ipath);
    results.push_back(std::move(c));
  }
  ValidationReport r;
  r.cases = std::move(results);
  r.fail_rate = ratio_from(jsonio::require(j, "fail_rate", path), jsonio::child_path(path, "fail_rate"));
  r.step_count = static_cast<int>(jsonio::get_int(j, "step_count", path));
  r.agentic_ratio = ratio_from(jsonio::require(j, "agentic_ratio", path), jsonio::child_path(path, "agentic_ratio"));
  for (const auto& c : r.cases) {
    if (c.feedback) r.feedback.push_back(*c.feedback);
    if (c.unclassified) r.unclassified.push_back(*c.unclassified);
  }
  return r;
}

Json objective_json(const Objective& o) {
  return Json{{"fail_rate", ratio_json(o.fail_rate)}, {"step_count", o.step_count}, {"agentic_ratio", ratio_json(o.agentic_ratio)}};
}

Json attempt_json(const AttemptRecord& a) {
  Json j{{"attempt", a.attempt}, {"outcome", a.outcome}};
  if (!a.error.empty()) j["error"] = a.error;
  if (a.objective) j["objective"] = objective_json(*a.objective);
  j["promoted"] = a.promoted;
  if (!a.promotion_note.empty()) j["promotion_note"] = a.promotion_note;
  j["pass1_step_count"] = a.pass1_step_count;
  Json fb = Json::array();
  for (const auto& f : a.feedback) fb.push_back(feedback_json(f));
  j["feedback"] = std::move(fb);
  if (!a.unclassified.empty()) j["unclassified"] = a.unclassified;
  return j;
}

AttemptRecord attempt_from(const Json& j, const std::string& path) {
  AttemptRecord a;
  a.attempt = static_cast<int>(jsonio::get_int(j, "attempt", path));
  a.outcome = jsonio::get_string(j, "outcome", path);
  a.error = jsonio::opt_string(j, "error", path).value_or("");
  if (const auto* o = jsonio::find(j, "objective")) {
    auto opath = jsonio::child_path(path, "objective");
    a.objective = Objective{ratio_from(jsonio::require(*o, "fail_rate", opath), jsonio::child_path(opath, "fail_rate")),
                            static_cast<int>(jsonio::get_int(*o, "step_count", opath)),
                            ratio_from(jsonio::require(*o, "agentic_ratio", opath), jsonio::child_path(opath, "agentic_ratio"))};
  }
  a.promoted = jsonio::get_bool(j, "promoted", path);
  a.promotion_note = jsonio::opt_string(j, "promotion_note", path).value_or("");
  a.pass1_step_count = static_cast<int>(jsonio::get_int(j, "pass1_step_count", path));
  const auto& fb = jsonio::require(j, "feedback", path);
  auto fpath = jsonio::child_path(path, "feedback");
  jsonio::expect_array(fb, fpath);
  for (std::size_t i = 0; i < fb.size(); ++i) a.feedback.push_back(feedback_from(fb[i], jsonio::child_path(fpath, i)));
  if (const auto* u = jsonio::find(j, "unclassified")) a.unclassified = jsonio::get_strings(*u, jsonio::child_path(path, "unclassified"));
  return a;
}

void check_record(const ToolRecord& r) {
  if (r.tool.name.empty()) throw std::invalid_argument("tool name is empty");
  validate_script(r.tool.script);
  check_schema(r.tool.schema);
  check_bijection(r.tool.script, r.tool.schema);
  if (r.tool.ui_script) validate_script(*r.tool.ui_script);
}

bool validated(const ToolRecord& r) {
  return !r.provenance.report.cases.empty() && r.provenance.report.fail_rate.is_zero() &&
         r.provenance.report.failing_cases() == 0;
}

// Exclusive lock on the registry directory for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    fs::create_directories(dir);
    fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw Error("cannot open lock file in " + dir.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error("cannot lock " + dir.string());
    }
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

const std::regex kFilePattern(R"(^(.+)\.v([0-9]+)\.tool\.json$)");

void write_atomically(const fs::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

ToolRecord make_record(const ToolCandidate& candidate, const BuildResult& result) {
  if (!result.success || !result.tool || !result.report) throw std::invalid_argument("build did not produce a validated tool");
  return ToolRecord{*result.tool, Provenance{candidate, result.attempts(), result.history, *result.report}, 0};
}

std::string serialize_record(const ToolRecord& r) {
  Json j{{"name", r.tool.name},
         {"version", r.version},
         {"description", r.tool.description},
         {"start_url", r.tool.start_url},
         {"promoted", r.tool.promoted()},
         {"script", serde::to_json(r.tool.script)}};
  if (r.tool.ui_script) j["ui_script"] = serde::to_json(*r.tool.ui_script);
  j["input_schema"] = schema_json(r.tool.schema);
  j["test_suite"] = suite_json(r.tool.suite);
  Json history = Json::array();
  for (const auto& a : r.provenance.history) history.push_back(attempt_json(a));
  j["provenance"] = Json{{"candidate", serde::to_json(r.provenance.candidate)},
                         {"attempts", r.provenance.attempts},
                         {"history", std::move(history)},
                         {"report", report_json(r.provenance.report)}};
  return jsonio::dump(j);
}

ToolRecord parse_record(std::string_view raw) {
  ToolRecord r;
  try {
    auto j = jsonio::parse_document(raw);
    jsonio::expect_object(j, "");
    r.tool.name = jsonio::get_string(j, "name", "");
    r.version = static_cast<int>(jsonio::get_int(j, "version", ""));
    r.tool.description = jsonio::get_string(j, "description", "");
    r.tool.start_url = jsonio::get_string(j, "start_url", "");
    r.tool.script = serde::script_from_json(jsonio::require(j, "script", ""), "/script");
    if (const auto* ui = jsonio::find(j, "ui_script")) r.tool.ui_script = serde::script_from_json(*ui, "/ui_script");
    if (jsonio::get_bool(j, "promoted", "") != r.tool.promoted()) jsonio::fail("/promoted", "disagrees with ui_script");
    r.tool.schema = schema_from(jsonio::require(j, "input_schema", ""), "/input_schema");
    r.tool.suite = suite_from(jsonio::require(j, "test_suite", ""), "/test_suite");
    const auto& p = jsonio::require(j, "provenance", "");
    r.provenance.candidate = serde::candidate_from_json(jsonio::require(p, "candidate", "/provenance"), "/provenance/candidate");
    r.provenance.attempts = static_cast<int>(jsonio::get_int(p, "attempts", "/provenance"));
    const auto& history = jsonio::require(p, "history", "/provenance");
    jsonio::expect_array(history, "/provenance/history");
    for (std::size_t i = 0; i < history.size(); ++i) {
      r.provenance.history.push_back(attempt_from(history[i], jsonio::child_path("/provenance/history", i)));
    }
    r.provenance.report = report_from(jsonio::require(p, "report", "/provenance"), "/provenance/report");
  } catch (const jsonio::ShapeError& e) {
    throw MalformedTool(e.path + ": " + e.reason);
  }
  if (r.version < 1) throw MalformedTool("/version: must be >= 1");
  try {
    check_record(r);
  } catch (const std::invalid_argument& e) {
    throw MalformedTool(e.what());
  } catch (const UnboundPlaceholder& e) {
    throw MalformedTool(e.what());
  } catch (const EmptyScript& e) {
    throw MalformedTool(e.what());
  }
  return r;
}

std::string serialize_report(const ValidationReport& report) { return jsonio::dump(report_json(report)); }

std::string serialize_schema(const InputSchema& schema) { return jsonio::dump(schema_json(schema)); }

InputSchema parse_schema(std::string_view raw) {
  try {
    auto schema = schema_from(jsonio::parse_document(raw), "");
    check_schema(schema);
    return schema;
  } catch (const jsonio::ShapeError& e) {
    throw MalformedTool(e.path + ": " + e.reason);
  } catch (const std::invalid_argument& e) {
    throw MalformedTool(e.what());
  }
}

std::string serialize_descriptors(const std::vector<ActionDescriptor>& descriptors) {
  Json out = Json::array();
  for (const auto& d : descriptors) {
    out.push_back(Json{{"name", d.name},
                       {"description", d.description},
                       {"version", d.version},
                       {"input_schema", schema_json(d.schema)}});
  }
  return jsonio::dump(out);
}

std::string record_file_name(const std::string& name, int version) {
  return name + ".v" + std::to_string(version) + ".tool.json";
}

Registry::Registry(fs::path directory) : directory_(std::move(directory)) {}

Registry Registry::staging() {
  Registry r;
  r.staging_ = true;
  return r;
}

const ToolRecord& Registry::register_tool(ToolRecord record) {
  if (staging_) throw std::logic_error("staging registries only stage tools");
  if (!validated(record)) throw NotValidated(record.tool.name);
  check_record(record);
  std::optional<DirectoryLock> lock;
  auto& versions = records_[record.tool.name];
  std::set<int> taken;
  for (const auto& [v, r] : versions) taken.insert(v);
  if (directory_) {
    lock.emplace(*directory_);
    // versions committed by other writers, readable or not
    std::smatch m;
    for (const auto& entry : fs::directory_iterator(*directory_)) {
      auto file = entry.path().filename().string();
      if (!std::regex_match(file, m, kFilePattern) || m[1] != record.tool.name) continue;
      int v = std::stoi(m[2]);
      if (!taken.insert(v).second) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        auto existing = parse_record(buf.str());
        if (existing.version == v && existing.tool.name == record.tool.name) versions[v] = std::move(existing);
      } catch (const MalformedTool&) {
      }
    }
  }
  if (record.version == 0) {
    record.version = taken.empty() ? 1 : *taken.rbegin() + 1;
  } else if (taken.count(record.version)) {
    throw Conflict(record.tool.name, record.version);
  }
  if (directory_) write_atomically(*directory_ / record_file_name(record.tool.name, record.version), serialize_record(record));
  auto version = record.version;
  return versions[version] = std::move(record);
}

void Registry::stage(const Tool& tool) {
  if (!staging_) throw std::logic_error("only staging registries accept unvalidated tools");
  staged_.push_back(tool);
}

const ToolRecord* Registry::latest(std::string_view name) const {
  auto it = records_.find(name);
  if (it == records_.end() || it->second.empty()) return nullptr;
  return &it->second.rbegin()->second;
}

const ToolRecord* Registry::find(std::string_view name, int version) const {
  auto it = records_.find(name);
  if (it == records_.end()) return nullptr;
  auto v = it->second.find(version);
  return v == it->second.end() ? nullptr : &v->second;
}

std::vector<const ToolRecord*> Registry::records() const {
  std::vector<const ToolRecord*> out;
  for (const auto& [name, versions] : records_) {
    for (const auto& [v, r] : versions) out.push_back(&r);
  }
  return out;
}

std::vector<const ToolRecord*> Registry::latest_records() const {
  std::vector<const ToolRecord*> out;
  for (const auto& [name, versions] : records_) {
    if (!versions.empty()) out.push_back(&versions.rbegin()->second);
  }
  return out;
}

std::vector<ActionDescriptor> Registry::descriptors() const {
  std::vector<ActionDescriptor> out;
  for (const auto* r : latest_records()) out.push_back({r->tool.name, r->tool.description, r->tool.schema, r->version});
  return out;
}

std::size_t Registry::size() const {
  std::size_t n = 0;
  for (const auto& [name, versions] : records_) n += versions.size();
  return n;
}

struct RegistryLoader {
  static void add(Registry& registry, ToolRecord record) {
    auto& slot = registry.records_[record.tool.name];
    auto version = record.version;
    slot[version] = std::move(record);
  }
};

LoadResult load_registry(const fs::path& directory) {
  LoadResult result{Registry(directory), {}};
  if (!fs::exists(directory)) return result;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 10 && name.ends_with(".tool.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto file = path.filename().string();
    try {
      std::ifstream in(path, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      auto record = parse_record(buf.str());
      std::smatch m;
      if (!std::regex_match(file, m, kFilePattern) || m[1] != record.tool.name || std::stoi(m[2]) != record.version) {
        throw MalformedTool("file name does not match tool name and version");
      }
      if (!validated(record)) throw NotValidated(record.tool.name);
      if (result.registry.find(record.tool.name, record.version)) throw Conflict(record.tool.name, record.version);
      RegistryLoader::add(result.registry, std::move(record));
    } catch (const std::exception& e) {
      result.diagnostics.push_back({file, e.what()});
    }
  }
  return result;
}

}  // namespace walt
