#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace walt::dom {

using Attributes = std::vector<std::pair<std::string, std::string>>;

/// A DOM node. Text nodes use the tag "#text" and carry their content in
/// `text()`; element nodes keep attributes in authored order.
class Element {
 public:
  explicit Element(std::string tag, Attributes attributes = {});

  static std::unique_ptr<Element> make_text(std::string text);

  Element(const Element&) = delete;
  Element& operator=(const Element&) = delete;

  const std::string& tag() const { return tag_; }
  bool is_text() const { return tag_ == "#text"; }
  const std::string& text() const { return text_; }

  const Attributes& attributes() const { return attributes_; }
  std::optional<std::string> attr(std::string_view name) const;
  bool has_attr(std::string_view name) const;
  void set_attr(std::string_view name, std::string value);
  void remove_attr(std::string_view name);

  Element& append(std::string tag, Attributes attributes = {});
  Element& append_text(std::string text);
  /// Appends `text` as a single text child and returns *this, for leaf elements.
  Element& with_text(std::string text);
  void remove_child(const Element* child);
  void clear_children();

  const std::vector<std::unique_ptr<Element>>& children() const { return children_; }
  std::vector<Element*> element_children() const;
  Element* parent() const { return parent_; }

  /// 0-based index among element siblings.
  int element_index() const;
  /// Element-child indices from the document root element down to this node.
  std::vector<int> path_from_root() const;

  /// Descendant text with runs of whitespace collapsed and trimmed.
  std::string text_content() const;

  Element* closest(const std::function<bool(const Element&)>& pred);
  const Element* closest(const std::function<bool(const Element&)>& pred) const;

  std::unique_ptr<Element> clone() const;

  void for_each(const std::function<void(Element&)>& fn);
  void visit(const std::function<void(const Element&)>& fn) const;

 private:
  std::string tag_;
  std::string text_;
  Attributes attributes_;
  std::vector<std::unique_ptr<Element>> children_;
  Element* parent_ = nullptr;
};

/// An HTML document: owns the root `html` element.
class Document {
 public:
  Document();
  explicit Document(std::unique_ptr<Element> root);

  Document(Document&&) noexcept = default;
  Document& operator=(Document&&) noexcept = default;

  Element& root() { return *root_; }
  const Element& root() const { return *root_; }
  Element& head();
  Element& body();
  std::string title() const;

  Element* by_id(std::string_view id);
  Element* query(std::string_view selector);
  const Element* query(std::string_view selector) const;
  std::vector<Element*> query_all(std::string_view selector);
  Element* at_path(const std::vector<int>& path);

  std::string serialize() const;
  Document clone() const;

 private:
  std::unique_ptr<Element> root_;
};

std::string collapse_whitespace(std::string_view text);
std::string escape_html(std::string_view text, bool attribute);
std::string serialize(const Element& element);

// -- selectors ------------------------------------------------------------

struct AttributeTest {
  std::string name;
  std::optional<std::string> value;
  bool operator==(const AttributeTest&) const = default;
};

struct Compound {
  std::string tag;  // empty means universal
  std::string id;
  std::vector<std::string> classes;
  std::vector<AttributeTest> attributes;
  std::optional<int> nth_child;  // 1-based
  bool operator==(const Compound&) const = default;
};

enum class Combinator { Descendant, Child };

/// A CSS selector subset: type, #id, .class, [attr], [attr=value],
/// :nth-child(n), joined by descendant or child combinators.
struct Selector {
  std::vector<Compound> compounds;
  std::vector<Combinator> combinators;  // combinators[i] joins compounds[i], compounds[i+1]
  bool operator==(const Selector&) const = default;
};

std::optional<Selector> parse_selector(std::string_view text);
bool matches(const Selector& selector, const Element& element);
Element* query_first(Element& scope, const Selector& selector);
std::vector<Element*> query_all(Element& scope, const Selector& selector);

/// Quotes an attribute value for use inside [attr=...] when it is not a
/// plain identifier.
std::string selector_value(std::string_view value);

}  // namespace walt::dom
