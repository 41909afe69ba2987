#include <algorithm>
#include <cstdio>
#include <random>

#include "walt/fixture.hpp"

namespace walt::fixture {

namespace {

const std::map<std::string, std::vector<std::string>> kNouns = {
    {"Boats", {"Kayak", "Canoe", "Paddle Board", "Dinghy", "Sailboat"}},
    {"Electronics", {"Laptop", "Camera", "Headphones", "Speaker", "Monitor"}},
    {"Furniture", {"Chair", "Table", "Sofa", "Bookshelf", "Desk"}},
};
const std::vector<std::string> kColors = {"Red", "Blue", "Green", "Black", "White", "Yellow"};
const std::vector<std::string> kAdjectives = {"", "Vintage", "Compact", "Sturdy", "Classic", "Lightweight"};
const std::vector<std::string> kConditions = {"Good", "Like-new", "Fair"};
const std::map<std::string, std::pair<int, int>> kPriceRange = {
    {"Boats", {150, 1500}}, {"Electronics", {20, 900}}, {"Furniture", {30, 600}}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<int> parse_id(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

// Positive dollar amount with at most two decimals, in cents.
std::optional<long long> parse_price(const std::string& s) {
  auto dot = s.find('.');
  auto whole = s.substr(0, dot);
  auto frac = dot == std::string::npos ? std::string() : s.substr(dot + 1);
  if (whole.empty() || whole.size() > 7 || frac.size() > 2) return std::nullopt;
  for (char c : whole + frac) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  long long cents = std::stoll(whole) * 100;
  if (!frac.empty()) cents += std::stoll(frac) * (frac.size() == 1 ? 10 : 1);
  if (cents <= 0) return std::nullopt;
  return cents;
}

std::optional<std::pair<std::string, std::string>> param(const QueryParams& params,
                                                         std::initializer_list<std::string_view> keys) {
  for (auto key : keys) {
    for (const auto& [k, v] : params) {
      if (k == key) return std::make_pair(k, v);
    }
  }
  return std::nullopt;
}

std::string value_of(const QueryParams& params, std::string_view key) {
  auto p = param(params, {key});
  return p ? p->second : std::string();
}

struct Page {
  dom::Document doc;
  dom::Element* main = nullptr;
};

Page layout(const std::string& title) {
  Page p;
  p.doc.head().append("title").with_text(title);
  p.doc.head().append("meta", {{"charset", "utf-8"}});
  auto& body = p.doc.body();
  auto& header = body.append("header", {{"id", "site-header"}});
  header.append("a", {{"href", "/"}, {"class", "brand"}}).with_text("Classifieds");
  header.append("a", {{"href", "/listing/new"}, {"id", "new-listing-link"}}).with_text("Post a listing");
  p.main = &body.append("main", {{"id", "content"}});
  body.append("footer").with_text("Fixture classifieds");
  return p;
}

void add_errors(dom::Element& parent, const std::map<std::string, std::string>& errors) {
  if (errors.empty()) return;
  auto& ul = parent.append("ul", {{"class", "errors"}});
  for (const auto& [field, message] : errors) {
    ul.append("li", {{"data-field", field}}).with_text(field + ": " + message);
  }
}

void add_card(dom::Element& list, const Listing& l) {
  auto& li = list.append("li", {{"class", "listing-card"}, {"data-id", std::to_string(l.id)}});
  li.append("a", {{"href", "/listing/" + std::to_string(l.id)}, {"class", "title"}}).with_text(l.title);
  li.append("span", {{"class", "price"}}).with_text(format_price(l.price_cents));
  li.append("span", {{"class", "category"}}).with_text(l.category);
  li.append("span", {{"class", "color"}}).with_text(l.color);
}

dom::Element& add_select(dom::Element& parent, dom::Attributes attrs, const std::vector<std::string>& options,
                         const std::string& selected) {
  auto& sel = parent.append("select", std::move(attrs));
  for (const auto& o : options) {
    dom::Attributes a{{"value", o}};
    if (o == selected) a.emplace_back("selected", "");
    sel.append("option", std::move(a)).with_text(o);
  }
  return sel;
}

Response respond(Page page, int status = 200) {
  Response r;
  r.status = status;
  r.page = std::move(page.doc);
  return r;
}

Response redirect(std::string location) {
  Response r;
  r.status = 303;
  r.location = std::move(location);
  return r;
}

}  // namespace

std::string_view to_string(Drift drift) {
  switch (drift) {
    case Drift::None: return "none";
    case Drift::RenamedId: return "renamed-id";
    case Drift::FullRewrite: return "full-rewrite";
  }
  return "?";
}

std::optional<Drift> drift_from_string(std::string_view text) {
  for (auto d : {Drift::None, Drift::RenamedId, Drift::FullRewrite}) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

std::vector<Listing> generate_catalog(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<Listing> out;
  for (int id = 1; id <= kCatalogSize; ++id) {
    Listing l;
    l.id = id;
    l.created_at = id;
    l.category = kCategories[pick(kCategories.size())];
    const auto& nouns = kNouns.at(l.category);
    auto noun = nouns[pick(nouns.size())];
    l.color = kColors[pick(kColors.size())];
    const auto& adjective = kAdjectives[pick(kAdjectives.size())];
    l.title = (adjective.empty() ? "" : adjective + " ") + l.color + " " + noun;
    auto [lo, hi] = kPriceRange.at(l.category);
    static const int kCents[] = {0, 50, 99};
    l.price_cents = (lo + static_cast<long long>(pick(hi - lo + 1))) * 100 + kCents[pick(3)];
    l.description = l.title + ". " + kConditions[pick(kConditions.size())] + " condition, pickup only.";
    out.push_back(std::move(l));
  }
  // Two blue kayaks at distinct prices, whatever the seed.
  long long dearer = (300 + static_cast<long long>(pick(200))) * 100;
  long long cheaper = dearer - (40 + static_cast<long long>(pick(60))) * 100 - 1;
  auto plant = [&](int id, std::string title, long long price) {
    auto& l = out[id - 1];
    l.title = std::move(title);
    l.category = "Boats";
    l.color = "Blue";
    l.price_cents = price;
    l.description = l.title + ". Good condition, pickup only.";
  };
  plant(5, "Blue Kayak", dearer);
  plant(23, "Blue Kayak with Paddle", cheaper);
  return out;
}

std::string format_price(long long cents) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "$%lld.%02lld", cents / 100, cents % 100);
  return buf;
}

std::string format_row(const Listing& l) {
  return std::to_string(l.id) + " | " + l.title + " | " + format_price(l.price_cents) + " | " + l.category +
         " | " + l.color;
}

FixtureSite::FixtureSite(FixtureOptions options)
    : options_(options), listings_(generate_catalog(options.seed)), clock_(kCatalogSize) {}

const Listing* FixtureSite::listing(int id) const {
  if (id < 1 || id > static_cast<int>(listings_.size())) return nullptr;
  const auto& l = listings_[id - 1];
  return l.deleted ? nullptr : &l;
}

Listing* FixtureSite::find(int id) { return const_cast<Listing*>(listing(id)); }

Response FixtureSite::handle(const Request& request) {
  std::vector<std::string> segments;
  {
    Url u;
    u.path = request.path;
    segments = u.path_segments();
  }
  bool get = request.method == "GET";
  bool post = request.method == "POST";
  if (segments.empty()) return get ? home() : not_found();
  if (segments.size() == 1 && segments[0] == "search" && get) return search(request, false);
  if (segments.size() == 1 && segments[0] == "search-nosort" && get) return search(request, true);
  if (segments[0] != "listing" || segments.size() < 2) return not_found();
  if (segments.size() == 2 && segments[1] == "new") {
    if (get) return new_form({}, {}, 200);
    if (post) return create(request.form);
    return not_found();
  }
  auto id = parse_id(segments[1]);
  if (!id || !listing(*id)) return not_found();
  if (segments.size() == 2 && get) return listing_page(*id);
  if (segments.size() != 3) return not_found();
  if (segments[2] == "edit") {
    if (get) return edit_form(*id, {}, 200);
    if (post) return edit(*id, request.form);
  }
  if (segments[2] == "delete" && post) return remove(*id);
  if (segments[2] == "comment" && post) return comment(*id, request.form);
  return not_found();
}

Response FixtureSite::home() {
  auto page = layout("Classifieds");
  auto& main = *page.main;
  main.append("h1").with_text("Find something");
  auto drift = options_.drift;
  auto action = options_.broken_sort ? "/search-nosort" : "/search";
  if (drift == Drift::FullRewrite) {
    auto& shell = main.append("div", {{"class", "shell"}}).append("div", {{"class", "panel"}});
    auto& form = shell.append("form", {{"id", "finder"}, {"action", action}, {"method", "get"}});
    auto& row = form.append("div", {{"class", "wrap"}}).append("div", {{"class", "inner"}});
    row.append("label", {{"for", "kw-box"}}).with_text("Keywords");
    row.append("input", {{"id", "kw-box"}, {"type", "text"}, {"name", "kw"}, {"required", ""}});
    auto& filters = form.append("div", {{"class", "filters"}});
    add_select(filters, {{"id", "cat-box"}, {"name", "cat"}}, {"All", "Boats", "Electronics", "Furniture"}, "All");
    auto& order = add_select(filters, {{"id", "order-box"}, {"name", "order"}}, kSorts, "");
    if (options_.broken_sort) order.set_attr("data-cookie", "sort_pref");
    form.append("div", {{"class", "actions"}}).append("button", {{"id", "go-btn"}, {"type", "submit"}}).with_text("Go");
  } else {
    std::string box_id = drift == Drift::RenamedId ? "search-input-v2" : "searchquery";
    auto& form = main.append("form", {{"id", "search-form"}, {"action", action}, {"method", "get"}});
    auto& f1 = form.append("div", {{"class", "field"}});
    f1.append("label", {{"for", box_id}}).with_text("Search");
    f1.append("input", {{"id", box_id}, {"type", "text"}, {"name", "q"}, {"required", ""}});
    auto& f2 = form.append("div", {{"class", "field"}});
    f2.append("label", {{"for", "category"}}).with_text("Category");
    add_select(f2, {{"id", "category"}, {"name", "category"}}, {"All", "Boats", "Electronics", "Furniture"}, "All");
    auto& f3 = form.append("div", {{"class", "field"}});
    f3.append("label", {{"for", "sort"}}).with_text("Sort by");
    auto& sort = add_select(f3, {{"id", "sort"}, {"name", "sort"}}, kSorts, "");
    if (options_.broken_sort) sort.set_attr("data-cookie", "sort_pref");
    form.append("button", {{"id", "search-submit"}, {"type", "submit"}}).with_text("Search");
  }
  auto& recent = main.append("section", {{"id", "recent"}});
  recent.append("h2").with_text("Recent listings");
  std::vector<const Listing*> live;
  for (const auto& l : listings_) {
    if (!l.deleted) live.push_back(&l);
  }
  std::stable_sort(live.begin(), live.end(), [](const Listing* a, const Listing* b) {
    return a->created_at > b->created_at;
  });
  auto& ul = recent.append("ul", {{"id", "recent-listings"}});
  for (std::size_t i = 0; i < live.size() && i < 5; ++i) add_card(ul, *live[i]);
  return respond(std::move(page));
}

Response FixtureSite::search(const Request& request, bool cookie_sort) {
  auto q = param(request.query, {"q", "kw"});
  auto category = param(request.query, {"category", "cat"});
  auto sort = param(request.query, {"sort", "order"});
  std::map<std::string, std::string> errors;
  std::string cat = category ? category->second : "";
  if (!cat.empty() && cat != "All" && std::find(kCategories.begin(), kCategories.end(), cat) == kCategories.end()) {
    errors[category->first] = "unknown category '" + cat + "'";
  }
  std::string order = sort ? sort->second : "";
  if (cookie_sort) {
    auto it = request.cookies.find("sort_pref");
    order = it == request.cookies.end() ? "" : it->second;
    if (std::find(kSorts.begin(), kSorts.end(), order) == kSorts.end()) order = "";
  } else if (!order.empty() && std::find(kSorts.begin(), kSorts.end(), order) == kSorts.end()) {
    errors[sort->first] = "unknown sort '" + order + "'";
  }
  std::string query = q ? q->second : "";
  auto page = layout("Search results");
  auto& main = *page.main;
  if (!errors.empty()) {
    main.append("h1").with_text("Invalid search");
    add_errors(main, errors);
    auto r = respond(std::move(page), 400);
    r.field_errors = std::move(errors);
    return r;
  }
  if (order.empty()) order = "newest";

  std::vector<const Listing*> hits;
  auto needle = lower(query);
  for (const auto& l : listings_) {
    if (l.deleted) continue;
    if (!cat.empty() && cat != "All" && l.category != cat) continue;
    if (!needle.empty() && lower(l.title).find(needle) == std::string::npos &&
        lower(l.description).find(needle) == std::string::npos) {
      continue;
    }
    hits.push_back(&l);
  }
  std::stable_sort(hits.begin(), hits.end(), [&](const Listing* a, const Listing* b) {
    if (order == "price_asc") return a->price_cents != b->price_cents ? a->price_cents < b->price_cents : a->id < b->id;
    if (order == "price_desc") return a->price_cents != b->price_cents ? a->price_cents > b->price_cents : a->id < b->id;
    return a->created_at != b->created_at ? a->created_at > b->created_at : a->id > b->id;
  });

  main.append("h1").with_text("Results for \"" + query + "\"");
  auto& form = main.append("form", {{"id", "sort-form"}, {"action", request.path}, {"method", "get"}});
  form.append("input", {{"type", "hidden"}, {"name", "q"}, {"value", query}});
  if (category) form.append("input", {{"type", "hidden"}, {"name", "category"}, {"value", cat}});
  form.append("label", {{"for", "results-sort"}}).with_text("Sort");
  add_select(form, {{"id", "results-sort"}, {"name", "sort"}}, kSorts, sort ? sort->second : "");
  form.append("button", {{"id", "apply-sort"}, {"type", "submit"}}).with_text("Apply");
  main.append("p", {{"id", "result-count"}}).with_text(std::to_string(hits.size()) + " listings");
  auto& ul = main.append("ul", {{"id", "results"}});
  for (const auto* l : hits) add_card(ul, *l);
  return respond(std::move(page));
}

Response FixtureSite::listing_page(int id) {
  const auto& l = *listing(id);
  auto page = layout(l.title);
  auto sid = std::to_string(id);
  auto& article = page.main->append("article", {{"id", "listing-detail"}, {"data-id", sid}});
  article.append("h1", {{"class", "title"}}).with_text(l.title);
  article.append("p", {{"class", "price"}}).with_text(format_price(l.price_cents));
  article.append("p", {{"class", "category"}}).with_text(l.category);
  article.append("p", {{"class", "color"}}).with_text(l.color);
  article.append("p", {{"class", "description"}}).with_text(l.description);
  auto& actions = article.append("div", {{"class", "actions"}});
  actions.append("a", {{"id", "edit-link"}, {"href", "/listing/" + sid + "/edit"}}).with_text("Edit");
  auto& del = actions.append("form", {{"id", "delete-form"}, {"action", "/listing/" + sid + "/delete"}, {"method", "post"}});
  del.append("button", {{"id", "delete-listing"}, {"type", "submit"}}).with_text("Delete");

  auto& section = page.main->append("section", {{"id", "comments-section"}});
  section.append("h2").with_text("Comments");
  auto& ul = section.append("ul", {{"id", "comments"}});
  for (const auto& c : l.comments) ul.append("li", {{"class", "comment"}}).with_text(c);
  auto& form = section.append("form", {{"id", "comment-form"}, {"action", "/listing/" + sid + "/comment"}, {"method", "post"}});
  form.append("label", {{"for", "comment-text"}}).with_text("Add a comment");
  form.append("textarea", {{"id", "comment-text"}, {"name", "text"}, {"required", ""}});
  form.append("button", {{"id", "post-comment"}, {"type", "submit"}}).with_text("Post comment");
  return respond(std::move(page));
}

Response FixtureSite::new_form(const QueryParams& values, const std::map<std::string, std::string>& errors,
                               int status) {
  auto page = layout("New listing");
  page.main->append("h1").with_text("Post a listing");
  add_errors(*page.main, errors);
  auto& form = page.main->append("form", {{"id", "new-listing"}, {"action", "/listing/new"}, {"method", "post"}});
  auto field = [&](const char* label, const char* id) -> dom::Element& {
    auto& div = form.append("div", {{"class", "field"}});
    div.append("label", {{"for", id}}).with_text(label);
    return div;
  };
  field("Title", "title").append("input", {{"id", "title"}, {"type", "text"}, {"name", "title"}, {"required", ""}, {"value", value_of(values, "title")}});
  field("Price", "price").append("input", {{"id", "price"}, {"type", "number"}, {"name", "price"}, {"required", ""}, {"value", value_of(values, "price")}});
  add_select(field("Category", "new-category"), {{"id", "new-category"}, {"name", "category"}, {"required", ""}},
             kCategories, value_of(values, "category"));
  field("Color", "color").append("input", {{"id", "color"}, {"type", "text"}, {"name", "color"}, {"value", value_of(values, "color")}});
  field("Description", "description").append("textarea", {{"id", "description"}, {"name", "description"}, {"value", value_of(values, "description")}});
  form.append("button", {{"id", "create-submit"}, {"type", "submit"}}).with_text("Create listing");
  auto r = respond(std::move(page), status);
  r.field_errors = errors;
  return r;
}

Response FixtureSite::create(const QueryParams& form) {
  std::map<std::string, std::string> errors;
  auto title = value_of(form, "title");
  auto price = parse_price(value_of(form, "price"));
  auto category = value_of(form, "category");
  if (title.empty()) errors["title"] = "required";
  if (!price) errors["price"] = value_of(form, "price").empty() ? "required" : "must be a positive amount";
  if (std::find(kCategories.begin(), kCategories.end(), category) == kCategories.end()) {
    errors["category"] = category.empty() ? "required" : "unknown category '" + category + "'";
  }
  if (!errors.empty()) return new_form(form, errors, 400);
  Listing l;
  l.id = static_cast<int>(listings_.size()) + 1;
  l.title = title;
  l.price_cents = *price;
  l.category = category;
  l.color = value_of(form, "color");
  l.description = value_of(form, "description");
  l.created_at = ++clock_;
  listings_.push_back(l);
  return redirect("/listing/" + std::to_string(l.id));
}

Response FixtureSite::edit_form(int id, const std::map<std::string, std::string>& errors, int status) {
  const auto& l = *listing(id);
  auto page = layout("Edit " + l.title);
  auto sid = std::to_string(id);
  // Promotional overlay; its close control sits deep in wrapper markup.
  auto* node = &page.doc.body().append("div", {{"id", "promo-modal"}, {"class", "modal-overlay"}});
  for (int depth = 0; depth < 7; ++depth) node = &node->append("div");
  node->append("p").with_text("Upgrade to a featured listing!");
  node->append("span", {{"data-dismiss", "modal"}}).with_text("×");

  page.main->append("h1").with_text("Edit listing");
  add_errors(*page.main, errors);
  auto& form = page.main->append("form", {{"id", "edit-listing"}, {"action", "/listing/" + sid + "/edit"}, {"method", "post"}});
  form.append("label", {{"for", "edit-title"}}).with_text("Title");
  form.append("input", {{"id", "edit-title"}, {"type", "text"}, {"name", "title"}, {"required", ""}, {"value", l.title}});
  form.append("label", {{"for", "edit-price"}}).with_text("Price");
  auto dollars = format_price(l.price_cents).substr(1);
  form.append("input", {{"id", "edit-price"}, {"type", "number"}, {"name", "price"}, {"required", ""}, {"value", dollars}});
  add_select(form, {{"id", "edit-category"}, {"name", "category"}}, kCategories, l.category);
  form.append("button", {{"id", "save-listing"}, {"type", "submit"}}).with_text("Save");
  auto r = respond(std::move(page), status);
  r.field_errors = errors;
  return r;
}

Response FixtureSite::edit(int id, const QueryParams& form) {
  std::map<std::string, std::string> errors;
  auto title = param(form, {"title"});
  auto price_text = param(form, {"price"});
  auto category = param(form, {"category"});
  std::optional<long long> price;
  if (title && title->second.empty()) errors["title"] = "required";
  if (price_text) {
    price = parse_price(price_text->second);
    if (!price) errors["price"] = "must be a positive amount";
  }
  if (category && std::find(kCategories.begin(), kCategories.end(), category->second) == kCategories.end()) {
    errors["category"] = "unknown category '" + category->second + "'";
  }
  if (!errors.empty()) return edit_form(id, errors, 400);
  auto* l = find(id);
  if (title) l->title = title->second;
  if (price) l->price_cents = *price;
  if (category) l->category = category->second;
  return redirect("/listing/" + std::to_string(id));
}

Response FixtureSite::remove(int id) {
  find(id)->deleted = true;
  return redirect("/");
}

Response FixtureSite::comment(int id, const QueryParams& form) {
  auto text = value_of(form, "text");
  if (text.empty()) {
    auto r = listing_page(id);
    r.status = 400;
    r.field_errors["text"] = "required";
    return r;
  }
  find(id)->comments.push_back(text);
  return redirect("/listing/" + std::to_string(id));
}

Response FixtureSite::not_found() {
  auto page = layout("Not found");
  page.main->append("h1").with_text("Page not found");
  return respond(std::move(page), 404);
}

}  // namespace walt::fixture
