#include <algorithm>

#include "walt/errors.hpp"
#include "walt/fixture.hpp"
#include "walt/stabilizer.hpp"

namespace walt::fixture {

namespace {

constexpr std::string_view kDemoNames[] = {"search", "create_listing", "post_comment", "edit_listing",
                                           "sort_results"};

class Recorder {
 public:
  explicit Recorder(FixtureBackend& backend, std::string candidate) : backend_(backend) {
    trace_.candidate_name = std::move(candidate);
  }

  Recorder& step(std::string evaluation, std::string next_goal) {
    TraceStep s;
    s.url = backend_.current_url();
    s.title = backend_.page().title();
    s.brain.evaluation_previous_goal = std::move(evaluation);
    s.brain.memory = memory_;
    s.brain.next_goal = std::move(next_goal);
    trace_.steps.push_back(std::move(s));
    return *this;
  }

  void remember(std::string note) { memory_ = std::move(note); }

  void go_to(const std::string& url) {
    perform(action::GoToUrl{url}, nullptr, [&] { return backend_.navigate(url); });
  }
  void click(const std::string& selector) {
    perform(action::Click{}, backend_.find(selector), [&] { return backend_.click(selector); });
  }
  void input(const std::string& selector, const std::string& text) {
    perform(action::InputText{text}, backend_.find(selector), [&] { return backend_.input(selector, text); });
  }
  void select(const std::string& selector, const std::string& option) {
    perform(action::SelectChange{option}, backend_.find(selector), [&] { return backend_.select(selector, option); });
  }
  void extract(const std::string& goal) {
    ActionRecord record;
    record.payload = action::ExtractContent{goal};
    auto r = backend_.extract(goal);
    record.success = r.ok();
    record.extracted = r.text;
    trace_.steps.back().actions.push_back(std::move(record));
  }

  ExecutionTrace finish(std::map<std::string, std::string> bindings) {
    trace_.param_bindings = std::move(bindings);
    validate_trace(trace_);
    return std::move(trace_);
  }

 private:
  template <typename Payload, typename Fn>
  void perform(Payload payload, const dom::Element* target, Fn&& act) {
    auto& current = trace_.steps.back();
    if constexpr (!std::is_same_v<Payload, action::GoToUrl>) {
      if (!target) throw Error("demo target missing on " + backend_.current_url());
      current.interacted.push_back(capture_element(*target));
    }
    int before = backend_.requests();
    auto result = act();
    ActionRecord record;
    record.payload = std::move(payload);
    record.success = result.ok();
    if (backend_.requests() != before) record.http_method = backend_.last_http_method();
    current.actions.push_back(std::move(record));
  }

  FixtureBackend& backend_;
  ExecutionTrace trace_;
  std::string memory_;
};

struct SearchSelectors {
  std::string box, category, sort, submit;
};

SearchSelectors search_selectors(Drift drift) {
  switch (drift) {
    case Drift::RenamedId: return {"#search-input-v2", "#category", "#sort", "#search-submit"};
    case Drift::FullRewrite: return {"#kw-box", "#cat-box", "#order-box", "#go-btn"};
    case Drift::None: break;
  }
  return {"#searchquery", "#category", "#sort", "#search-submit"};
}

std::string url(std::string_view path) { return std::string(kOrigin) + std::string(path); }

ExecutionTrace search_demo(FixtureBackend& b, int variant) {
  struct Values {
    const char* query;
    const char* category;
    const char* sort;
  };
  static const Values kVariants[] = {
      {"blue kayak", "Boats", "price_asc"}, {"kayak", "Boats", "newest"}, {"blue kayak", "All", "price_desc"}};
  const auto& v = kVariants[variant % 3];
  auto sel = search_selectors(b.site().options().drift);
  Recorder rec(b, "search_listings");
  rec.step("Starting the task", "Open the classifieds home page").go_to(url("/"));
  rec.remember(std::string("Looking for ") + v.query);
  rec.step("Home page loaded with a search form", "Focus the search box").click(sel.box);
  rec.step("Search box focused", "Type the search query").input(sel.box, v.query);
  rec.step("Query typed", "Choose the category").select(sel.category, v.category);
  rec.step("Category chosen", "Choose the sort order").select(sel.sort, v.sort);
  rec.step("Sort order chosen", "Submit the search").click(sel.submit);
  rec.step("Results page is showing", "Extract the result listings").extract("result listings");
  return rec.finish({{"query", v.query}, {"category", v.category}, {"sort", v.sort}});
}

ExecutionTrace sort_results_demo(FixtureBackend& b, int variant) {
  const char* query = variant % 2 == 0 ? "chair" : "table";
  const char* sort = variant % 2 == 0 ? "price_desc" : "price_asc";
  Recorder rec(b, "sort_results");
  rec.step("Starting the task", "Open the search results").go_to(url("/search?q=") + query);
  rec.step("Results are listed newest first", "Pick a different sort order").select("#results-sort", sort);
  rec.step("Sort order picked", "Apply the sort").click("#apply-sort");
  rec.step("Results re-sorted", "Extract the result listings").extract("result listings");
  return rec.finish({{"query", query}, {"sort", sort}});
}

ExecutionTrace create_listing_demo(FixtureBackend& b, int variant) {
  struct Values {
    const char* title;
    const char* price;
    const char* category;
    const char* color;
    const char* description;
  };
  static const Values kVariants[] = {
      {"Green Canoe 14ft", "450", "Boats", "green", "Lightly used canoe with two paddles"},
      {"Oak Writing Desk", "180", "Furniture", "brown", "Solid oak desk with one drawer"}};
  const auto& v = kVariants[variant % 2];
  Recorder rec(b, "create_listing");
  rec.step("Starting the task", "Open the new listing form").go_to(url("/listing/new"));
  rec.step("Form is open", "Enter the title").input("#title", v.title);
  rec.step("Title entered", "Enter the price").input("#price", v.price);
  rec.step("Price entered", "Choose the category").select("#new-category", v.category);
  rec.step("Category chosen", "Enter the color").input("#color", v.color);
  rec.step("Color entered", "Enter the description").input("#description", v.description);
  rec.step("Form filled", "Create the listing").click("#create-submit");
  rec.step("Listing page for the new item", "Extract the listing details").extract("listing details");
  return rec.finish({{"title", v.title},
                     {"price", v.price},
                     {"category", v.category},
                     {"color", v.color},
                     {"description", v.description}});
}

ExecutionTrace edit_listing_demo(FixtureBackend& b, int variant) {
  std::string id = variant % 2 == 0 ? "7" : "9";
  std::string price = variant % 2 == 0 ? "99" : "120";
  Recorder rec(b, "edit_listing");
  rec.step("Starting the task", "Open the edit form of the listing").go_to(url("/listing/" + id + "/edit"));
  rec.step("A promotional popup covers the form", "Close the promotional popup").click("[data-dismiss=modal]");
  rec.step("Popup closed", "Enter the new price").input("#edit-price", price);
  rec.step("Price entered", "Save the listing").click("#save-listing");
  rec.step("Listing page shows the change", "Extract the listing details").extract("listing details");
  return rec.finish({{"listing_id", id}, {"price", price}});
}

ExecutionTrace post_comment_demo(FixtureBackend& b, int variant) {
  std::string id = variant % 2 == 0 ? "12" : "3";
  std::string text = variant % 2 == 0 ? "Is this still available?" : "Would you take less?";
  Recorder rec(b, "post_comment");
  rec.step("Starting the task", "Open the listing").go_to(url("/listing/" + id));
  rec.step("Listing page loaded", "Focus the comment box").click("#comment-text");
  rec.step("Comment box focused", "Write the comment").input("#comment-text", text);
  rec.step("Comment written", "Post the comment").click("#post-comment");
  rec.step("Comment posted; the listing page reloaded", "Done");
  return rec.finish({{"listing_id", id}, {"comment", text}});
}

}  // namespace

InteractedElement capture_element(const dom::Element& element) {
  InteractedElement e;
  e.tag = element.tag();
  for (const auto& [k, v] : element.attributes()) e.attributes[k] = v;
  e.dom_path = element.path_from_root();
  e.css_selector = dom_path_selector(e.dom_path, e.tag);
  if (auto cls = element.attr("class"); cls && !cls->empty()) {
    auto first = cls->substr(0, cls->find(' '));
    e.alternates.push_back(e.tag + "." + first);
  }
  e.bounding_box = BoundingBox{0, 24.0 * static_cast<double>(e.dom_path.size()), 240, 24};
  e.text = element.tag() == "select" ? "" : element.text_content();
  e.parent_tag = element.parent() ? element.parent()->tag() : "";
  if (const auto* form = element.closest([](const dom::Element& x) { return x.tag() == "form"; })) {
    e.form = form->attr("id").value_or(form->attr("action").value_or(""));
  }
  if (element.tag() == "select") {
    for (auto* o : element.element_children()) {
      if (o->tag() != "option") continue;
      e.options.push_back(o->text_content());
      if (o->has_attr("selected") && !e.selected_default) e.selected_default = o->text_content();
    }
  }
  if (element.tag() == "input" || element.tag() == "select" || element.tag() == "textarea") {
    e.required = element.has_attr("required");
  }
  e.element_hash = compute_element_hash(e);
  return e;
}

std::string_view to_string(Demo demo) { return kDemoNames[static_cast<int>(demo)]; }

Demo demo_from_string(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kDemoNames[i] == name) return static_cast<Demo>(i);
  }
  throw UnknownDemo(std::string(name));
}

ExecutionTrace scripted_demo(Demo demo, FixtureBackend& backend, int variant) {
  variant = std::max(variant, 0);
  switch (demo) {
    case Demo::Search: return search_demo(backend, variant);
    case Demo::CreateListing: return create_listing_demo(backend, variant);
    case Demo::PostComment: return post_comment_demo(backend, variant);
    case Demo::EditListing: return edit_listing_demo(backend, variant);
    case Demo::SortResults: return sort_results_demo(backend, variant);
  }
  throw UnknownDemo("?");
}

ExecutionTrace scripted_demo(std::string_view name, FixtureBackend& backend, int variant) {
  return scripted_demo(demo_from_string(name), backend, variant);
}

ExecutionTrace exploratory_demo(const ToolCandidate& candidate, FixtureBackend& backend) {
  Recorder rec(backend, candidate.name);
  rec.step("Starting the task", "Open " + candidate.start_url).go_to(candidate.start_url);
  rec.step("Page loaded", "Extract the page content").extract("page content");
  return rec.finish({});
}

std::vector<ToolCandidate> fixture_candidates() {
  auto hint = [](ElementType type, std::string purpose, std::optional<std::vector<std::string>> options = {}) {
    return ElementHint{type, std::move(purpose), std::move(options)};
  };
  std::vector<ToolCandidate> out;
  out.push_back({"search_listings", url("/"), "Search listings by keyword with a category filter and sort order",
                 {hint(ElementType::Input, "Search keywords"),
                  hint(ElementType::Select, "Category filter", std::vector<std::string>{"All", "Boats", "Electronics", "Furniture"}),
                  hint(ElementType::Select, "Sort order", std::vector<std::string>{"newest", "price_asc", "price_desc"}),
                  hint(ElementType::Button, "Run the search")}});
  out.push_back({"sort_results", url("/search?q=chair"), "Re-sort search results by price or recency",
                 {hint(ElementType::Select, "Sort order", std::vector<std::string>{"newest", "price_asc", "price_desc"}),
                  hint(ElementType::Button, "Apply the sort order")}});
  out.push_back({"create_listing", url("/listing/new"), "Create a new classified listing",
                 {hint(ElementType::Input, "Listing title"), hint(ElementType::Input, "Asking price in dollars"),
                  hint(ElementType::Select, "Listing category", std::vector<std::string>{"Boats", "Electronics", "Furniture"}),
                  hint(ElementType::Input, "Item color"), hint(ElementType::Textarea, "Free-text description"),
                  hint(ElementType::Button, "Create the listing")}});
  out.push_back({"edit_listing", url("/listing/7/edit"), "Change the price of an existing listing",
                 {hint(ElementType::Input, "New asking price in dollars"), hint(ElementType::Button, "Save changes")}});
  out.push_back({"post_comment", url("/listing/12"), "Post a comment on a listing",
                 {hint(ElementType::Textarea, "Comment text"), hint(ElementType::Button, "Post the comment")}});
  return out;
}

std::optional<Demo> demo_for_candidate(std::string_view candidate_name) {
  if (candidate_name == "search_listings") return Demo::Search;
  if (candidate_name == "sort_results") return Demo::SortResults;
  if (candidate_name == "create_listing") return Demo::CreateListing;
  if (candidate_name == "edit_listing") return Demo::EditListing;
  if (candidate_name == "post_comment") return Demo::PostComment;
  return std::nullopt;
}

std::function<ExecutionTrace(const ToolCandidate&, int)> trace_source(FixtureOptions options) {
  return [options](const ToolCandidate& candidate, int attempt) {
    FixtureBackend backend(options);
    if (auto demo = demo_for_candidate(candidate.name)) return scripted_demo(*demo, backend, attempt - 1);
    return exploratory_demo(candidate, backend);
  };
}

}  // namespace walt::fixture
