#include "walt/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json_io.hpp"
#include "walt/builder.hpp"
#include "walt/errors.hpp"
#include "walt/executor.hpp"
#include "walt/fixture.hpp"
#include "walt/reasoner.hpp"
#include "walt/registry.hpp"
#include "walt/trace.hpp"

namespace walt {

namespace fs = std::filesystem;
using jsonio::Json;

namespace {

struct CliError {
  int code;
  std::string message;
};

std::string_view code_name(int code) {
  switch (code) {
    case kExitUsage: return "usage";
    case kExitInvalidInput: return "invalid_input";
    case kExitBuildFailed: return "build_failed";
    case kExitExecutionFailed: return "execution_failed";
    case kExitNotFound: return "not_found";
    default: return "error";
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitNotFound, "cannot read " + path.string()};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw CliError{kExitInvalidInput, "cannot write " + path.string()};
  }
  fs::rename(tmp, path);
}

struct Globals {
  std::string workspace;
  bool json = false;
  std::uint64_t seed = 0;
  std::string drift = "none";
  bool broken_sort = false;
  int render_delay = 0;
  std::string reasoner = "stub";

  fs::path tools_dir() const { return fs::path(workspace) / "tools"; }
  fs::path candidates_file() const { return fs::path(workspace) / "candidates.json"; }
  fs::path traces_dir() const { return fs::path(workspace) / "traces"; }

  fixture::FixtureOptions fixture() const {
    auto d = fixture::drift_from_string(drift);
    if (!d) throw CliError{kExitUsage, "unknown drift '" + drift + "'"};
    return {seed, *d, broken_sort, render_delay};
  }

  std::unique_ptr<Reasoner> make_reasoner() const {
    if (reasoner == "stub") return std::make_unique<ScriptedReasoner>(ScriptedReasoner::fixture_default());
    if (reasoner == "none") return nullptr;
    return std::make_unique<HttpReasoner>(reasoner);
  }
};

std::vector<ToolCandidate> workspace_candidates(const Globals& g) {
  if (!fs::exists(g.candidates_file())) return {};
  try {
    return parse_candidates(read_file(g.candidates_file()));
  } catch (const MalformedCandidates& e) {
    throw CliError{kExitInvalidInput, e.what()};
  }
}

ToolCandidate find_candidate(const Globals& g, const std::string& name) {
  for (const auto& c : workspace_candidates(g)) {
    if (c.name == name) return c;
  }
  for (const auto& c : fixture::fixture_candidates()) {
    if (c.name == name) return c;
  }
  throw CliError{kExitNotFound, "no candidate named '" + name + "'"};
}

const ToolRecord& find_record(const Registry& registry, const std::string& name, int version) {
  const auto* r = version > 0 ? registry.find(name, version) : registry.latest(name);
  if (!r) throw CliError{kExitNotFound, "no tool named '" + name + "'" + (version > 0 ? " at version " + std::to_string(version) : "")};
  return *r;
}

Json ratio_json(const Ratio& r) { return Json{{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

Json outcome_json(const ExecutionOutcome& o) {
  Json outputs = Json::object();
  for (const auto& [k, v] : o.outputs) outputs[k] = v;
  Json j{{"status", o.succeeded() ? "success" : "failed"},
         {"steps_executed", o.steps_executed},
         {"agentic_steps_executed", o.agentic_steps_executed},
         {"fallback_used", o.fallback_used},
         {"final_url", o.final_url},
         {"outputs", std::move(outputs)}};
  if (o.failure) {
    j["failure"] = Json{{"step", o.failure->step}, {"kind", std::string(to_string(o.failure->kind))}, {"message", o.failure->message}};
  }
  return j;
}

std::string pad(const std::string& s, std::size_t width) { return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' '); }

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Build, validate and run website tools from demonstrations", "walt"};
    app.require_subcommand(1);
    app.add_option("--workspace", g_.workspace, "Workspace directory")->envname("WALT_WORKSPACE")->default_val("walt-workspace");
    app.add_flag("--json", g_.json, "Machine-readable JSON output");
    app.add_option("--seed", g_.seed, "Fixture catalog seed")->default_val(0);
    app.add_option("--drift", g_.drift, "Fixture drift: none, renamed-id, full-rewrite")->default_val("none");
    app.add_flag("--broken-sort", g_.broken_sort, "Fixture home form submits to /search-nosort");
    app.add_option("--render-delay", g_.render_delay, "Fixture render delay in ticks (10 per second)")->default_val(0);
    app.add_option("--reasoner", g_.reasoner, "stub, none, or an HTTP endpoint URL")
        ->envname("WALT_REASONER_URL")
        ->default_val("stub");

    std::string file;
    bool fixture_set = false;
    auto* ingest = app.add_subcommand("ingest-candidates", "Store tool candidates in the workspace");
    ingest->add_option("file", file, "Candidates JSON file");
    ingest->add_flag("--fixture", fixture_set, "Ingest the bundled fixture candidates");

    std::string name;
    int variant = 0;
    std::string out_path;
    auto* demo = app.add_subcommand("demo-record", "Record a scripted demonstration on the fixture");
    demo->add_option("name", name, "Demo name")->required();
    demo->add_option("--variant", variant, "Demo variant")->default_val(0);
    demo->add_option("--out", out_path, "Output trace file");

    int max_attempts = 4;
    bool no_promotion = false;
    std::string trace_file;
    auto* build = app.add_subcommand("build", "Build and register a tool for a candidate");
    build->add_option("candidate", name, "Candidate name")->required();
    build->add_option("--max-attempts", max_attempts, "Attempt budget")->default_val(4)->check(CLI::Range(1, 64));
    build->add_flag("--no-promotion", no_promotion, "Keep the UI script");
    build->add_option("--trace", trace_file, "Use this recorded trace for every attempt");

    int version = 0;
    auto* validate = app.add_subcommand("validate", "Re-validate a registered tool against the fixture");
    validate->add_option("tool", name, "Tool name")->required();
    validate->add_option("--version", version, "Tool version (default latest)");

    std::vector<std::string> inputs;
    bool no_fallback = false;
    int budget = kDefaultFallbackBudget;
    auto* run = app.add_subcommand("run", "Run a registered tool");
    run->add_option("tool", name, "Tool name")->required();
    run->add_option("--input", inputs, "Input as key=value")->expected(0, -1);
    run->add_option("--version", version, "Tool version (default latest)");
    run->add_flag("--no-fallback", no_fallback, "Do not hand failures to the reasoner");
    run->add_option("--fallback-budget", budget, "Reasoner step budget for fallback")->default_val(kDefaultFallbackBudget);

    bool descriptors = false;
    auto* list = app.add_subcommand("list", "List registered tools");
    list->add_flag("--descriptors", descriptors, "Print action descriptors for agents");

    auto* report = app.add_subcommand("report", "Per-tool metrics and tries-until-success table");

    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the fixture site over HTTP");
    serve->add_option("--port", port, "Port")->default_val(8080);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }

    try {
      if (*ingest) return cmd_ingest(file, fixture_set);
      if (*demo) return cmd_demo(name, variant, out_path);
      if (*build) return cmd_build(name, max_attempts, no_promotion, trace_file);
      if (*validate) return cmd_validate(name, version);
      if (*run) return cmd_run(name, version, inputs, no_fallback, budget);
      if (*list) return cmd_list(descriptors);
      if (*report) return cmd_report();
      if (*serve) return cmd_serve(port);
    } catch (const CliError& e) {
      return fail(e.code, e.message);
    } catch (const BackendUnavailable& e) {
      return fail(kExitExecutionFailed, e.what());
    } catch (const std::exception& e) {
      return fail(kExitInvalidInput, e.what());
    }
    return kExitUsage;
  }

 private:
  int fail(int code, const std::string& message) {
    if (g_.json) {
      out_ << jsonio::dump(Json{{"error", {{"code", std::string(code_name(code))}, {"exit", code}, {"message", message}}}});
    } else {
      err_ << "error: " << message << "\n";
    }
    return code;
  }

  void emit(const Json& j, const std::string& text) {
    if (g_.json) {
      out_ << jsonio::dump(j);
    } else {
      out_ << text;
    }
  }

  int cmd_ingest(const std::string& file, bool fixture_set) {
    std::vector<ToolCandidate> incoming;
    if (fixture_set) {
      incoming = fixture::fixture_candidates();
    } else if (file.empty()) {
      throw CliError{kExitUsage, "give a candidates file or --fixture"};
    } else {
      try {
        incoming = parse_candidates(read_file(file));
      } catch (const MalformedCandidates& e) {
        throw CliError{kExitInvalidInput, e.what()};
      } catch (const DuplicateName& e) {
        throw CliError{kExitInvalidInput, e.what()};
      }
    }
    auto stored = workspace_candidates(g_);
    for (auto& c : incoming) {
      auto it = std::find_if(stored.begin(), stored.end(), [&](const ToolCandidate& s) { return s.name == c.name; });
      if (it != stored.end()) {
        *it = c;
      } else {
        stored.push_back(c);
      }
    }
    write_file(g_.candidates_file(), serialize_candidates(stored));
    Json names = Json::array();
    std::string text;
    for (const auto& c : incoming) {
      names.push_back(c.name);
      text += "ingested " + c.name + "\n";
    }
    emit(Json{{"ingested", names}, {"total", stored.size()}}, text);
    return kExitOk;
  }

  int cmd_demo(const std::string& name, int variant, const std::string& out_path) {
    fixture::FixtureBackend backend(g_.fixture());
    ExecutionTrace trace;
    try {
      trace = fixture::scripted_demo(name, backend, variant);
    } catch (const UnknownDemo& e) {
      throw CliError{kExitNotFound, e.what()};
    }
    fs::path path = out_path.empty() ? g_.traces_dir() / (name + ".s" + std::to_string(g_.seed) + ".v" +
                                                          std::to_string(variant) + ".trace.json")
                                     : fs::path(out_path);
    write_file(path, serialize_trace(trace));
    emit(Json{{"demo", name}, {"variant", variant}, {"steps", trace.steps.size()}, {"trace", path.string()}},
         "recorded " + name + " variant " + std::to_string(variant) + " (" + std::to_string(trace.steps.size()) +
             " steps) to " + path.string() + "\n");
    return kExitOk;
  }

  int cmd_build(const std::string& name, int max_attempts, bool no_promotion, const std::string& trace_file) {
    auto candidate = find_candidate(g_, name);
    auto options = g_.fixture();
    TraceSource source = fixture::trace_source(options);
    if (!trace_file.empty()) {
      ExecutionTrace trace;
      try {
        trace = parse_trace(read_file(trace_file));
      } catch (const MalformedTrace& e) {
        throw CliError{kExitInvalidInput, e.what()};
      }
      source = [trace](const ToolCandidate&, int) { return trace; };
    }
    auto reasoner = g_.make_reasoner();
    BuildOptions build_options;
    build_options.allow_promotion = !no_promotion;
    auto staging = Registry::staging();
    auto result = build_tool(candidate, source, {max_attempts}, fixture::backend_factory(options), reasoner.get(),
                             &staging, build_options);

    Json history = Json::array();
    std::string text;
    for (const auto& a : result.history) {
      Json h{{"attempt", a.attempt}, {"outcome", a.outcome}, {"promoted", a.promoted}};
      if (!a.error.empty()) h["error"] = a.error;
      if (a.objective) h["fail_rate"] = ratio_json(a.objective->fail_rate);
      Json fb = Json::array();
      for (const auto& f : a.feedback) fb.push_back(std::string(to_string(kind_of(f))) + ": " + describe(f));
      h["feedback"] = std::move(fb);
      history.push_back(std::move(h));
      text += "attempt " + std::to_string(a.attempt) + ": " + a.outcome;
      if (!a.error.empty()) text += " (" + a.error + ")";
      if (a.objective) text += " fail_rate=" + a.objective->fail_rate.to_string();
      text += "\n";
      for (const auto& f : a.feedback) text += "  " + std::string(to_string(kind_of(f))) + ": " + describe(f) + "\n";
      for (const auto& u : a.unclassified) text += "  unclassified: " + u + "\n";
    }
    if (!result.success) {
      emit(Json{{"candidate", name}, {"success", false}, {"attempts", result.attempts()}, {"history", history}},
           text + "build failed after " + std::to_string(result.attempts()) + " attempts\n");
      return kExitBuildFailed;
    }
    Registry registry(g_.tools_dir());
    const auto& record = registry.register_tool(make_record(candidate, result));
    auto path = g_.tools_dir() / record_file_name(record.tool.name, record.version);
    emit(Json{{"candidate", name},
              {"success", true},
              {"tool", record.tool.name},
              {"version", record.version},
              {"attempts", result.attempts()},
              {"promoted", record.tool.promoted()},
              {"steps", record.tool.script.steps.size()},
              {"file", path.string()},
              {"history", history}},
         text + "registered " + record.tool.name + " v" + std::to_string(record.version) + " (" +
             std::to_string(record.tool.script.steps.size()) + " steps" + (record.tool.promoted() ? ", promoted" : "") +
             ") attempts=" + std::to_string(result.attempts()) + " -> " + path.string() + "\n");
    return kExitOk;
  }

  Registry open_registry() {
    auto loaded = load_registry(g_.tools_dir());
    for (const auto& d : loaded.diagnostics) err_ << "warning: skipped " << d.file << ": " << d.message << "\n";
    return std::move(loaded.registry);
  }

  int cmd_validate(const std::string& name, int version) {
    auto registry = open_registry();
    const auto& record = find_record(registry, name, version);
    auto reasoner = g_.make_reasoner();
    auto report = validate_tool(record.tool, record.tool.suite, fixture::backend_factory(g_.fixture()), reasoner.get());
    std::string text = name + " v" + std::to_string(record.version) + ": fail_rate=" + report.fail_rate.to_string() +
                       " steps=" + std::to_string(report.step_count) + " agentic_ratio=" + report.agentic_ratio.to_string() + "\n";
    for (const auto& f : report.feedback) text += "  " + std::string(to_string(kind_of(f))) + ": " + describe(f) + "\n";
    for (const auto& u : report.unclassified) text += "  unclassified: " + u + "\n";
    Json j = jsonio::parse_document(serialize_report(report));
    j["tool"] = name;
    j["version"] = record.version;
    emit(j, text);
    return report.fail_rate.is_zero() ? kExitOk : kExitBuildFailed;
  }

  int cmd_run(const std::string& name, int version, const std::vector<std::string>& raw_inputs, bool no_fallback,
              int budget) {
    auto registry = open_registry();
    const auto& record = find_record(registry, name, version);
    Inputs inputs;
    for (const auto& kv : raw_inputs) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw CliError{kExitUsage, "input '" + kv + "' is not key=value"};
      inputs[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    auto violations = validate_input(record.tool.schema, inputs);
    if (!violations.empty()) {
      std::string message = "schema violation:";
      for (const auto& v : violations) message += " " + describe(v) + ";";
      throw CliError{kExitInvalidInput, message};
    }
    auto reasoner = g_.make_reasoner();
    fixture::FixtureBackend backend(g_.fixture());
    ExecutionOutcome outcome;
    try {
      outcome = no_fallback ? execute_tool(record.tool, inputs, backend, reasoner.get())
                            : execute_with_fallback(record.tool, inputs, backend, reasoner.get(), budget);
    } catch (const FallbackExhausted& e) {
      throw CliError{kExitExecutionFailed, e.what()};
    }
    std::string text;
    for (const auto& [k, v] : outcome.outputs) text += v.empty() || v.back() == '\n' ? v : v + "\n";
    if (outcome.fallback_used) err_ << "note: completed by agentic fallback\n";
    if (!outcome.succeeded()) {
      const auto& f = *outcome.failure;
      text += "failed at step " + std::to_string(f.step) + " (" + std::string(to_string(f.kind)) + "): " + f.message + "\n";
    }
    Json j = outcome_json(outcome);
    j["tool"] = name;
    j["version"] = record.version;
    emit(j, text);
    return outcome.succeeded() ? kExitOk : kExitExecutionFailed;
  }

  int cmd_list(bool descriptors) {
    auto registry = open_registry();
    if (descriptors) {
      out_ << serialize_descriptors(registry.descriptors());
      return kExitOk;
    }
    Json tools = Json::array();
    std::string text;
    for (const auto* r : registry.records()) {
      tools.push_back(Json{{"name", r->tool.name},
                           {"version", r->version},
                           {"steps", r->tool.script.steps.size()},
                           {"promoted", r->tool.promoted()},
                           {"agentic_steps", r->tool.script.agentic_count()},
                           {"params", r->tool.script.params}});
      text += pad(r->tool.name, 18) + "v" + pad(std::to_string(r->version), 4) + pad(std::to_string(r->tool.script.steps.size()) + " steps", 10) +
              (r->tool.promoted() ? "promoted " : "ui       ") + r->tool.description + "\n";
    }
    emit(Json{{"tools", tools}}, text);
    return kExitOk;
  }

  int cmd_report() {
    auto registry = open_registry();
    auto records = registry.latest_records();
    Json rows = Json::array();
    std::map<int, int> tries;
    int max_tries = 4;
    std::ostringstream text;
    text << pad("tool", 18) << pad("version", 8) << pad("attempts", 9) << pad("pass1", 6) << pad("steps", 6)
         << pad("agentic", 8) << pad("fail_rate", 10) << pad("promoted", 9) << "consistent\n";
    for (const auto* r : records) {
      const auto& p = r->provenance;
      auto recomputed = summarize(r->tool.script, p.report.cases);
      bool consistent = recomputed.fail_rate == p.report.fail_rate && recomputed.fail_rate.den == p.report.fail_rate.den &&
                        recomputed.step_count == p.report.step_count && recomputed.agentic_ratio == p.report.agentic_ratio &&
                        static_cast<int>(p.history.size()) == p.attempts;
      int pass1 = p.history.empty() ? 0 : p.history.back().pass1_step_count;
      ++tries[p.attempts];
      max_tries = std::max(max_tries, p.attempts);
      rows.push_back(Json{{"tool", r->tool.name},
                          {"version", r->version},
                          {"attempts", p.attempts},
                          {"pass1_steps", pass1},
                          {"steps", recomputed.step_count},
                          {"agentic_steps", r->tool.script.agentic_count()},
                          {"agentic_ratio", ratio_json(recomputed.agentic_ratio)},
                          {"fail_rate", ratio_json(recomputed.fail_rate)},
                          {"promoted", r->tool.promoted()},
                          {"consistent", consistent}});
      text << pad(r->tool.name, 18) << pad(std::to_string(r->version), 8) << pad(std::to_string(p.attempts), 9)
           << pad(std::to_string(pass1), 6) << pad(std::to_string(recomputed.step_count), 6)
           << pad(recomputed.agentic_ratio.to_string(), 8) << pad(recomputed.fail_rate.to_string(), 10)
           << pad(r->tool.promoted() ? "yes" : "no", 9) << (consistent ? "yes" : "NO") << "\n";
    }
    Json histogram = Json::array();
    text << "\ntries until success\n" << pad("attempts", 9) << "tools\n";
    for (int k = 1; k <= max_tries; ++k) {
      int n = tries.count(k) ? tries[k] : 0;
      histogram.push_back(Json{{"attempts", k}, {"tools", n}});
      text << pad(std::to_string(k), 9) << pad(std::to_string(n), 4) << std::string(n, '#') << "\n";
    }
    int with_agentic = 0;
    for (const auto* r : records) with_agentic += r->tool.script.agentic_count() > 0 ? 1 : 0;
    text << "\n" << with_agentic << " of " << records.size() << " tools have at least one agentic step\n";
    emit(Json{{"tools", rows}, {"tries_until_success", histogram}, {"tools_with_agentic_steps", with_agentic}}, text.str());
    return kExitOk;
  }

  int cmd_serve(int port) {
    fixture::FixtureServer server(g_.fixture());
    err_ << "serving the fixture on http://127.0.0.1:" << port << "\n";
    if (!server.listen(port)) throw CliError{kExitExecutionFailed, "cannot listen on port " + std::to_string(port)};
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  Globals g_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return Cli(out, err).run(argc, argv);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"walt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace walt
