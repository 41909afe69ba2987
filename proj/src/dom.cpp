#include "walt/dom.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace walt::dom {

namespace {

constexpr std::string_view kVoidElements[] = {"area", "base", "br",   "col",   "embed",
                                              "hr",   "img",  "input", "link", "meta",
                                              "source", "track", "wbr"};

bool is_void(std::string_view tag) {
  return std::find(std::begin(kVoidElements), std::end(kVoidElements), tag) !=
         std::end(kVoidElements);
}

void serialize_into(const Element& e, std::string& out) {
  if (e.is_text()) {
    out += escape_html(e.text(), false);
    return;
  }
  out += '<';
  out += e.tag();
  for (const auto& [name, value] : e.attributes()) {
    // textarea content is serialized as text, not as an attribute
    if (e.tag() == "textarea" && name == "value") continue;
    out += ' ';
    out += name;
    if (!value.empty()) {
      out += "=\"";
      out += escape_html(value, true);
      out += '"';
    }
  }
  out += '>';
  if (is_void(e.tag())) return;
  if (e.tag() == "textarea") {
    out += escape_html(e.attr("value").value_or(""), false);
  } else {
    for (const auto& child : e.children()) serialize_into(*child, out);
  }
  out += "</";
  out += e.tag();
  out += '>';
  if (e.tag() == "html" || e.tag() == "head" || e.tag() == "body" || e.tag() == "li" ||
      e.tag() == "form" || e.tag() == "section" || e.tag() == "ul" || e.tag() == "div") {
    out += '\n';
  }
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view text) : text_(text) {}

  std::optional<Selector> parse() {
    Selector sel;
    skip_ws();
    auto first = compound();
    if (!first) return std::nullopt;
    sel.compounds.push_back(std::move(*first));
    while (true) {
      bool had_ws = skip_ws();
      if (at_end()) break;
      Combinator comb = Combinator::Descendant;
      if (peek() == '>') {
        ++pos_;
        skip_ws();
        comb = Combinator::Child;
      } else if (!had_ws) {
        return std::nullopt;
      }
      auto next = compound();
      if (!next) return std::nullopt;
      sel.combinators.push_back(comb);
      sel.compounds.push_back(std::move(*next));
    }
    return sel;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  bool skip_ws() {
    bool any = false;
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      ++pos_;
      any = true;
    }
    return any;
  }

  std::string ident() {
    auto start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::optional<std::string> value() {
    if (at_end()) return std::nullopt;
    char quote = peek();
    if (quote != '"' && quote != '\'') {
      auto v = ident();
      if (v.empty()) return std::nullopt;
      return v;
    }
    ++pos_;
    std::string out;
    while (!at_end() && peek() != quote) {
      if (peek() == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += peek();
      ++pos_;
    }
    if (at_end()) return std::nullopt;
    ++pos_;
    return out;
  }

  std::optional<Compound> compound() {
    Compound c;
    bool any = false;
    if (!at_end() && peek() == '*') {
      ++pos_;
      any = true;
    } else if (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) {
      c.tag = ident();
      std::transform(c.tag.begin(), c.tag.end(), c.tag.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      any = true;
    }
    while (!at_end()) {
      char ch = peek();
      if (ch == '#') {
        ++pos_;
        c.id = ident();
        if (c.id.empty()) return std::nullopt;
      } else if (ch == '.') {
        ++pos_;
        auto cls = ident();
        if (cls.empty()) return std::nullopt;
        c.classes.push_back(std::move(cls));
      } else if (ch == '[') {
        ++pos_;
        skip_ws();
        AttributeTest test;
        test.name = ident();
        if (test.name.empty()) return std::nullopt;
        skip_ws();
        if (!at_end() && peek() == '=') {
          ++pos_;
          skip_ws();
          test.value = value();
          if (!test.value) return std::nullopt;
          skip_ws();
        }
        if (at_end() || peek() != ']') return std::nullopt;
        ++pos_;
        c.attributes.push_back(std::move(test));
      } else if (ch == ':') {
        constexpr std::string_view kNth = ":nth-child(";
        if (text_.substr(pos_, kNth.size()) != kNth) return std::nullopt;
        pos_ += kNth.size();
        auto start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        int n = 0;
        auto digits = text_.substr(start, pos_ - start);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc() || n < 1 || at_end() || peek() != ')') return std::nullopt;
        ++pos_;
        c.nth_child = n;
      } else {
        break;
      }
      any = true;
    }
    if (!any) return std::nullopt;
    return c;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool matches_compound(const Compound& c, const Element& e) {
  if (e.is_text()) return false;
  if (!c.tag.empty() && c.tag != e.tag()) return false;
  if (!c.id.empty() && e.attr("id") != c.id) return false;
  if (!c.classes.empty()) {
    auto cls = e.attr("class").value_or("");
    std::vector<std::string> have;
    std::size_t start = 0;
    while (start < cls.size()) {
      auto end = cls.find(' ', start);
      if (end == std::string::npos) end = cls.size();
      if (end > start) have.push_back(cls.substr(start, end - start));
      start = end + 1;
    }
    for (const auto& want : c.classes) {
      if (std::find(have.begin(), have.end(), want) == have.end()) return false;
    }
  }
  for (const auto& test : c.attributes) {
    auto v = e.attr(test.name);
    if (!v) return false;
    if (test.value && *v != *test.value) return false;
  }
  if (c.nth_child && e.element_index() + 1 != *c.nth_child) return false;
  return true;
}

bool matches_from(const Selector& sel, std::size_t index, const Element& e) {
  if (!matches_compound(sel.compounds[index], e)) return false;
  if (index == 0) return true;
  auto comb = sel.combinators[index - 1];
  const Element* p = e.parent();
  if (comb == Combinator::Child) return p != nullptr && matches_from(sel, index - 1, *p);
  for (; p != nullptr; p = p->parent()) {
    if (matches_from(sel, index - 1, *p)) return true;
  }
  return false;
}

}  // namespace

Element::Element(std::string tag, Attributes attributes)
    : tag_(std::move(tag)), attributes_(std::move(attributes)) {}

std::unique_ptr<Element> Element::make_text(std::string text) {
  auto node = std::make_unique<Element>("#text");
  node->text_ = std::move(text);
  return node;
}

std::optional<std::string> Element::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes_) {
    if (k == name) return v;
  }
  return std::nullopt;
}

bool Element::has_attr(std::string_view name) const { return attr(name).has_value(); }

void Element::set_attr(std::string_view name, std::string value) {
  for (auto& [k, v] : attributes_) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  attributes_.emplace_back(std::string(name), std::move(value));
}

void Element::remove_attr(std::string_view name) {
  std::erase_if(attributes_, [&](const auto& kv) { return kv.first == name; });
}

Element& Element::append(std::string tag, Attributes attributes) {
  auto child = std::make_unique<Element>(std::move(tag), std::move(attributes));
  child->parent_ = this;
  children_.push_back(std::move(child));
  return *children_.back();
}

Element& Element::append_text(std::string text) {
  auto child = make_text(std::move(text));
  child->parent_ = this;
  children_.push_back(std::move(child));
  return *children_.back();
}

Element& Element::with_text(std::string text) {
  append_text(std::move(text));
  return *this;
}

void Element::remove_child(const Element* child) {
  std::erase_if(children_, [&](const auto& c) { return c.get() == child; });
}

void Element::clear_children() { children_.clear(); }

std::vector<Element*> Element::element_children() const {
  std::vector<Element*> out;
  for (const auto& c : children_) {
    if (!c->is_text()) out.push_back(c.get());
  }
  return out;
}

int Element::element_index() const {
  if (parent_ == nullptr) return 0;
  int index = 0;
  for (const auto& c : parent_->children_) {
    if (c.get() == this) return index;
    if (!c->is_text()) ++index;
  }
  return index;
}

std::vector<int> Element::path_from_root() const {
  std::vector<int> path;
  for (const Element* e = this; e->parent_ != nullptr; e = e->parent_) {
    path.push_back(e->element_index());
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::string Element::text_content() const {
  std::string raw;
  visit([&](const Element& e) {
    if (e.is_text()) {
      raw += e.text();
      raw += ' ';
    } else if (e.tag() == "textarea") {
      raw += e.attr("value").value_or("");
      raw += ' ';
    }
  });
  return collapse_whitespace(raw);
}

Element* Element::closest(const std::function<bool(const Element&)>& pred) {
  for (Element* e = this; e != nullptr; e = e->parent_) {
    if (pred(*e)) return e;
  }
  return nullptr;
}

const Element* Element::closest(const std::function<bool(const Element&)>& pred) const {
  return const_cast<Element*>(this)->closest(pred);
}

std::unique_ptr<Element> Element::clone() const {
  auto copy = std::make_unique<Element>(tag_, attributes_);
  copy->text_ = text_;
  for (const auto& c : children_) {
    auto child = c->clone();
    child->parent_ = copy.get();
    copy->children_.push_back(std::move(child));
  }
  return copy;
}

void Element::for_each(const std::function<void(Element&)>& fn) {
  fn(*this);
  for (auto& c : children_) c->for_each(fn);
}

void Element::visit(const std::function<void(const Element&)>& fn) const {
  fn(*this);
  for (const auto& c : children_) c->visit(fn);
}

Document::Document() : root_(std::make_unique<Element>("html")) {
  root_->append("head");
  root_->append("body");
}

Document::Document(std::unique_ptr<Element> root) : root_(std::move(root)) {}

Element& Document::head() {
  for (auto* c : root_->element_children()) {
    if (c->tag() == "head") return *c;
  }
  return root_->append("head");
}

Element& Document::body() {
  for (auto* c : root_->element_children()) {
    if (c->tag() == "body") return *c;
  }
  return root_->append("body");
}

std::string Document::title() const {
  auto* t = query("title");
  return t ? t->text_content() : std::string();
}

Element* Document::by_id(std::string_view id) {
  Element* found = nullptr;
  root_->for_each([&](Element& e) {
    if (found == nullptr && e.attr("id") == id) found = &e;
  });
  return found;
}

Element* Document::query(std::string_view selector) {
  auto sel = parse_selector(selector);
  return sel ? query_first(*root_, *sel) : nullptr;
}

const Element* Document::query(std::string_view selector) const {
  return const_cast<Document*>(this)->query(selector);
}

std::vector<Element*> Document::query_all(std::string_view selector) {
  auto sel = parse_selector(selector);
  return sel ? dom::query_all(*root_, *sel) : std::vector<Element*>{};
}

Element* Document::at_path(const std::vector<int>& path) {
  Element* e = root_.get();
  for (int index : path) {
    auto kids = e->element_children();
    if (index < 0 || index >= static_cast<int>(kids.size())) return nullptr;
    e = kids[index];
  }
  return e;
}

std::string Document::serialize() const { return "<!DOCTYPE html>\n" + dom::serialize(*root_); }

Document Document::clone() const { return Document(root_->clone()); }

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

std::string escape_html(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
  return out;
}

std::string serialize(const Element& element) {
  std::string out;
  serialize_into(element, out);
  return out;
}

std::optional<Selector> parse_selector(std::string_view text) {
  return SelectorParser(text).parse();
}

bool matches(const Selector& selector, const Element& element) {
  if (selector.compounds.empty()) return false;
  return matches_from(selector, selector.compounds.size() - 1, element);
}

Element* query_first(Element& scope, const Selector& selector) {
  Element* found = nullptr;
  scope.for_each([&](Element& e) {
    if (found == nullptr && matches(selector, e)) found = &e;
  });
  return found;
}

std::vector<Element*> query_all(Element& scope, const Selector& selector) {
  std::vector<Element*> out;
  scope.for_each([&](Element& e) {
    if (matches(selector, e)) out.push_back(&e);
  });
  return out;
}

std::string selector_value(std::string_view value) {
  bool plain = !value.empty() && std::isalpha(static_cast<unsigned char>(value[0])) &&
               std::all_of(value.begin(), value.end(), is_ident_char);
  if (plain) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace walt::dom
