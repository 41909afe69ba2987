#pragma once

#include <cstdint>
#include <map>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "walt/backend.hpp"
#include "walt/dom.hpp"
#include "walt/trace.hpp"
#include "walt/url.hpp"

namespace walt::fixture {

inline constexpr std::string_view kOrigin = "http://fixture.local";
inline constexpr std::string_view kHost = "fixture.local";
inline constexpr int kCatalogSize = 40;
inline const std::vector<std::string> kCategories = {"Boats", "Electronics", "Furniture"};
inline const std::vector<std::string> kSorts = {"newest", "price_asc", "price_desc"};

/// Selector drift applied to the home search form.
enum class Drift { None, RenamedId, FullRewrite };

std::string_view to_string(Drift drift);
std::optional<Drift> drift_from_string(std::string_view text);

struct FixtureOptions {
  std::uint64_t seed = 0;
  Drift drift = Drift::None;
  // Home form submits to /search-nosort, which sorts by cookie.
  bool broken_sort = false;
  // Logical ticks a freshly loaded page stays not-ready (10 ticks = 1 s).
  int render_delay_ticks = 0;
};

struct Listing {
  int id = 0;
  std::string title;
  std::string description;
  long long price_cents = 0;
  std::string category;
  std::string color;
  int created_at = 0;
  std::vector<std::string> comments;
  bool deleted = false;
  bool operator==(const Listing&) const = default;
};

struct Request {
  std::string method = "GET";
  std::string path = "/";
  QueryParams query;
  QueryParams form;
  std::map<std::string, std::string> cookies;
};

struct Response {
  int status = 200;
  dom::Document page;
  std::string location;  // set for 303
  std::map<std::string, std::string> field_errors;
};

/// Pure function of the seed.
std::vector<Listing> generate_catalog(std::uint64_t seed);

std::string format_price(long long cents);
/// "id | title | $price | category | color"
std::string format_row(const Listing& listing);

/// The classifieds site: routes, server-side validation, logical clock.
class FixtureSite {
 public:
  explicit FixtureSite(FixtureOptions options = {});

  Response handle(const Request& request);

  const FixtureOptions& options() const { return options_; }
  const std::vector<Listing>& listings() const { return listings_; }
  const Listing* listing(int id) const;
  int clock() const { return clock_; }

 private:
  Response home();
  Response search(const Request& request, bool cookie_sort);
  Response listing_page(int id);
  Response new_form(const QueryParams& values, const std::map<std::string, std::string>& errors, int status);
  Response create(const QueryParams& form);
  Response edit_form(int id, const std::map<std::string, std::string>& errors, int status);
  Response edit(int id, const QueryParams& form);
  Response remove(int id);
  Response comment(int id, const QueryParams& form);
  Response not_found();
  Listing* find(int id);

  FixtureOptions options_;
  std::vector<Listing> listings_;
  int clock_ = 0;
};

/// In-process ExecutionBackend over a FixtureSite: the function-call
/// "browser" used by demos, validation and the CLI.
class FixtureBackend : public ExecutionBackend {
 public:
  explicit FixtureBackend(FixtureOptions options = {});

  BackendResult navigate(const std::string& url) override;
  BackendResult click(const std::string& selector) override;
  BackendResult input(const std::string& selector, const std::string& text) override;
  BackendResult select(const std::string& selector, const std::string& option_text) override;
  BackendResult press(const std::string& key) override;
  BackendResult scroll(int dx, int dy) override;
  BackendResult wait(double seconds) override;
  BackendResult extract(const std::string& goal) override;

  std::string current_url() const override { return url_; }
  std::string dom_snapshot() const override { return page_.serialize(); }
  std::optional<std::string> last_http_method() const override { return last_method_; }
  std::optional<std::vector<std::string>> select_options(const std::string& selector) const override;

  FixtureSite& site() { return site_; }
  const dom::Document& page() const { return page_; }
  dom::Element* find(const std::string& selector);
  /// Requests sent so far (redirect hops included).
  int requests() const { return requests_; }
  const std::map<std::string, std::string>& cookies() const { return cookies_; }

 private:
  BackendResult load(Request request);
  BackendResult submit(dom::Element& form);
  BackendResult guard(dom::Element* element, const std::string& selector) const;

  FixtureSite site_;
  dom::Document page_;
  std::string url_ = "about:blank";
  std::map<std::string, std::string> cookies_;
  std::optional<std::string> last_method_;
  std::vector<int> focused_;
  int pending_ticks_ = 0;
  int requests_ = 0;
};

BackendFactory backend_factory(FixtureOptions options);

// -- scripted demonstrations --------------------------------------------------

enum class Demo { Search, CreateListing, PostComment, EditListing, SortResults };

std::string_view to_string(Demo demo);
/// Throws UnknownDemo.
Demo demo_from_string(std::string_view name);

/// Drives the backend through the demo and records the trace.
ExecutionTrace scripted_demo(Demo demo, FixtureBackend& backend, int variant = 0);
/// Throws UnknownDemo.
ExecutionTrace scripted_demo(std::string_view name, FixtureBackend& backend, int variant = 0);

/// Opens the candidate's start URL and extracts the page; used for candidates
/// no scripted demo covers.
ExecutionTrace exploratory_demo(const ToolCandidate& candidate, FixtureBackend& backend);

/// Trace source for build_tool: attempt k demonstrates variant k-1 on a fresh
/// backend built from `options`; candidates without a scripted demo get an
/// exploratory one.
std::function<ExecutionTrace(const ToolCandidate&, int)> trace_source(FixtureOptions options);

/// Captures an element the way the recorder does.
InteractedElement capture_element(const dom::Element& element);

/// The five fixture tool candidates.
std::vector<ToolCandidate> fixture_candidates();
/// Demo that demonstrates the named candidate, if any.
std::optional<Demo> demo_for_candidate(std::string_view candidate_name);

// -- HTTP binding -------------------------------------------------------------

/// Serves a FixtureSite over HTTP on 127.0.0.1. Requests are serialized.
class FixtureServer {
 public:
  explicit FixtureServer(FixtureOptions options = {});
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(int port = 0);
  /// Serves on the calling thread until stop().
  bool listen(int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace walt::fixture
