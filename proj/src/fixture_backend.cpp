#include <algorithm>
#include <cmath>

#include "walt/fixture.hpp"

namespace walt::fixture {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_text_control(const dom::Element& e) {
  if (e.tag() == "textarea") return true;
  if (e.tag() != "input") return false;
  auto type = e.attr("type").value_or("text");
  return type != "hidden" && type != "submit" && type != "button" && type != "checkbox";
}

bool is_submitter(const dom::Element& e) {
  auto type = e.attr("type");
  if (e.tag() == "button") return !type || *type == "submit";
  return e.tag() == "input" && type == "submit";
}

std::string option_value(const dom::Element& option) {
  return option.attr("value").value_or(option.text_content());
}

std::vector<dom::Element*> options_of(dom::Element& select) {
  std::vector<dom::Element*> out;
  for (auto* c : select.element_children()) {
    if (c->tag() == "option") out.push_back(c);
  }
  return out;
}

std::string select_value(dom::Element& select) {
  auto options = options_of(select);
  for (auto* o : options) {
    if (o->has_attr("selected")) return option_value(*o);
  }
  return options.empty() ? "" : option_value(*options.front());
}

std::string rows_of(dom::Document& page) {
  std::string out;
  for (auto* card : page.query_all("li.listing-card")) {
    auto text = [&](const char* cls) {
      for (auto* c : card->element_children()) {
        if (c->attr("class") == cls) return c->text_content();
      }
      return std::string();
    };
    out += card->attr("data-id").value_or("") + " | " + text("title") + " | " + text("price") + " | " +
           text("category") + " | " + text("color") + "\n";
  }
  return out;
}

}  // namespace

FixtureBackend::FixtureBackend(FixtureOptions options) : site_(options) {}

BackendResult FixtureBackend::load(Request request) {
  request.cookies = cookies_;
  last_method_ = request.method;
  ++requests_;
  auto response = site_.handle(request);
  int hops = 0;
  std::string path = request.path;
  QueryParams query = request.query;
  while (response.status == 303 && hops++ < 5) {
    auto target = parse_url(std::string(kOrigin) + response.location);
    Request follow;
    follow.path = target ? target->path : "/";
    follow.query = target ? target->query : QueryParams{};
    follow.cookies = cookies_;
    path = follow.path;
    query = follow.query;
    ++requests_;
    response = site_.handle(follow);
  }
  page_ = std::move(response.page);
  Url u;
  u.scheme = "http";
  u.host = std::string(kHost);
  u.path = path;
  u.query = query;
  url_ = u.to_string();
  focused_.clear();
  pending_ticks_ = site_.options().render_delay_ticks;
  if (response.status >= 400) {
    BackendResult r = BackendResult::failure(BackendStatus::HttpError, "HTTP " + std::to_string(response.status) +
                                                                          " for " + url_);
    r.http_status = response.status;
    r.field_errors = std::move(response.field_errors);
    return r;
  }
  return BackendResult::success();
}

BackendResult FixtureBackend::navigate(const std::string& url) {
  auto parsed = parse_url(url);
  if (!parsed) return BackendResult::failure(BackendStatus::NotFound, "unparseable URL " + url);
  if (parsed->host != kHost) return BackendResult::failure(BackendStatus::NotFound, "unknown host " + parsed->host);
  Request r;
  r.path = parsed->path;
  r.query = parsed->query;
  return load(std::move(r));
}

dom::Element* FixtureBackend::find(const std::string& selector) { return page_.query(selector); }

BackendResult FixtureBackend::guard(dom::Element* element, const std::string& selector) const {
  if (!element) return BackendResult::failure(BackendStatus::NotFound, "no element matches " + selector);
  if (pending_ticks_ > 0) return BackendResult::failure(BackendStatus::NotReady, "page still rendering");
  const dom::Element* modal = nullptr;
  page_.root().visit([&](const dom::Element& e) {
    if (!modal && e.attr("id") == "promo-modal") modal = &e;
  });
  if (modal) {
    bool inside = element->closest([&](const dom::Element& e) { return &e == modal; }) != nullptr;
    if (!inside) return BackendResult::failure(BackendStatus::NotInteractable, "a modal overlay blocks " + selector);
  }
  return BackendResult::success();
}

BackendResult FixtureBackend::submit(dom::Element& form) {
  QueryParams fields;
  form.visit([&](const dom::Element& e) {
    auto name = e.attr("name");
    if (!name || name->empty()) return;
    if (e.tag() == "input") {
      auto type = e.attr("type").value_or("text");
      if (type == "submit" || type == "button") return;
      if (type == "checkbox" && !e.has_attr("checked")) return;
      fields.emplace_back(*name, e.attr("value").value_or(type == "checkbox" ? "on" : ""));
    } else if (e.tag() == "textarea") {
      fields.emplace_back(*name, e.attr("value").value_or(""));
    } else if (e.tag() == "select") {
      fields.emplace_back(*name, select_value(const_cast<dom::Element&>(e)));
    }
  });
  auto base = parse_url(url_);
  auto action = form.attr("action").value_or("");
  auto target = base ? resolve_url(*base, action.empty() ? base->path : action) : std::nullopt;
  if (!target || target->host != kHost) return BackendResult::failure(BackendStatus::NotFound, "bad form action");
  Request r;
  r.path = target->path;
  if (lower(form.attr("method").value_or("get")) == "post") {
    r.method = "POST";
    r.form = std::move(fields);
  } else {
    r.query = std::move(fields);
  }
  return load(std::move(r));
}

BackendResult FixtureBackend::click(const std::string& selector) {
  auto* e = find(selector);
  auto g = guard(e, selector);
  if (!g.ok()) return g;
  if (e->attr("data-dismiss") == "modal") {
    auto* overlay = e->closest([](const dom::Element& x) { return x.attr("class") == "modal-overlay"; });
    if (overlay && overlay->parent()) overlay->parent()->remove_child(overlay);
    return BackendResult::success();
  }
  if (e->tag() == "a" && e->has_attr("href")) {
    auto base = parse_url(url_);
    auto target = base ? resolve_url(*base, *e->attr("href")) : parse_url(*e->attr("href"));
    if (!target) return BackendResult::failure(BackendStatus::NotFound, "bad link");
    return navigate(target->to_string());
  }
  if (is_submitter(*e)) {
    auto* form = e->closest([](const dom::Element& x) { return x.tag() == "form"; });
    if (form) return submit(*form);
  }
  focused_ = e->path_from_root();
  return BackendResult::success();
}

BackendResult FixtureBackend::input(const std::string& selector, const std::string& text) {
  auto* e = find(selector);
  auto g = guard(e, selector);
  if (!g.ok()) return g;
  if (!is_text_control(*e)) return BackendResult::failure(BackendStatus::NotInteractable, selector + " is not a text field");
  e->set_attr("value", text);
  focused_ = e->path_from_root();
  return BackendResult::success();
}

BackendResult FixtureBackend::select(const std::string& selector, const std::string& option_text) {
  auto* e = find(selector);
  auto g = guard(e, selector);
  if (!g.ok()) return g;
  if (e->tag() != "select") return BackendResult::failure(BackendStatus::NotInteractable, selector + " is not a select");
  auto options = options_of(*e);
  dom::Element* chosen = nullptr;
  for (auto* o : options) {
    if (!chosen && o->text_content() == option_text) chosen = o;
  }
  for (auto* o : options) {
    if (!chosen && o->attr("value") == option_text) chosen = o;
  }
  for (auto* o : options) {
    if (!chosen && lower(o->text_content()) == lower(option_text)) chosen = o;
  }
  if (!chosen) {
    auto r = BackendResult::failure(BackendStatus::InvalidOption, "'" + option_text + "' is not an option of " + selector);
    return r;
  }
  for (auto* o : options) o->remove_attr("selected");
  chosen->set_attr("selected", "");
  if (auto cookie = e->attr("data-cookie")) cookies_[*cookie] = option_value(*chosen);
  focused_ = e->path_from_root();
  return BackendResult::success();
}

BackendResult FixtureBackend::press(const std::string& key) {
  if (pending_ticks_ > 0) return BackendResult::failure(BackendStatus::NotReady, "page still rendering");
  if (key != "Enter" || focused_.empty()) return BackendResult::success();
  auto* e = page_.at_path(focused_);
  if (!e || e->tag() != "input") return BackendResult::success();
  auto* form = e->closest([](const dom::Element& x) { return x.tag() == "form"; });
  return form ? submit(*form) : BackendResult::success();
}

BackendResult FixtureBackend::scroll(int, int) { return BackendResult::success(); }

BackendResult FixtureBackend::wait(double seconds) {
  auto ticks = static_cast<int>(std::ceil(seconds * 10 - 1e-9));
  pending_ticks_ = std::max(0, pending_ticks_ - std::max(ticks, 0));
  return BackendResult::success();
}

BackendResult FixtureBackend::extract(const std::string& goal) {
  if (pending_ticks_ > 0) return BackendResult::failure(BackendStatus::NotReady, "page still rendering");
  auto g = lower(goal);
  if (g.find("comment") != std::string::npos) {
    std::string out;
    for (auto* c : page_.query_all("li.comment")) out += c->text_content() + "\n";
    return BackendResult::success(out);
  }
  if (page_.query("li.listing-card") || page_.query("ul#results")) return BackendResult::success(rows_of(page_));
  if (auto* detail = page_.query("#listing-detail")) {
    auto part = [&](const char* sel) {
      auto* x = page_.query(std::string("#listing-detail > ") + sel);
      return x ? x->text_content() : std::string();
    };
    return BackendResult::success(detail->attr("data-id").value_or("") + " | " + part("h1.title") + " | " +
                                  part("p.price") + " | " + part("p.category") + " | " + part("p.color") + "\n" +
                                  part("p.description") + "\n");
  }
  auto* main = page_.query("main");
  return BackendResult::success(main ? main->text_content() + "\n" : std::string());
}

std::optional<std::vector<std::string>> FixtureBackend::select_options(const std::string& selector) const {
  auto* e = page_.query(selector);
  if (!e || e->tag() != "select") return std::nullopt;
  std::vector<std::string> out;
  for (auto* o : e->element_children()) {
    if (o->tag() == "option") out.push_back(o->text_content());
  }
  return out;
}

BackendFactory backend_factory(FixtureOptions options) {
  return [options] { return std::make_unique<FixtureBackend>(options); };
}

}  // namespace walt::fixture
