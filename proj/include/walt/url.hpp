#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace walt {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// Absolute URL split into components. Query keys and values are stored
/// decoded; `to_string` re-encodes them with form encoding.
struct Url {
  std::string scheme;
  std::string host;
  std::optional<int> port;
  std::string path = "/";
  QueryParams query;
  std::string fragment;

  std::string origin() const;
  std::string to_string() const;
  std::optional<std::string> param(std::string_view key) const;
  std::vector<std::string> path_segments() const;

  bool operator==(const Url&) const = default;
};

/// Parses an absolute URL (scheme://host[:port][/path][?query][#fragment]).
std::optional<Url> parse_url(std::string_view text);

/// Resolves `ref` (absolute, root-relative, or query-only) against `base`.
std::optional<Url> resolve_url(const Url& base, std::string_view ref);

/// application/x-www-form-urlencoded: space becomes '+', unreserved kept.
std::string form_encode(std::string_view text);
/// Percent-encodes a single path segment.
std::string encode_path_segment(std::string_view text);
/// Percent-decodes and maps '+' to space.
std::string url_decode(std::string_view text);

QueryParams parse_query(std::string_view query);
std::string encode_query(const QueryParams& params);

/// Equality after percent-decoding and '+'/space normalization, ignoring
/// the fragment.
bool same_url(std::string_view a, std::string_view b);

/// Names of `{param}` placeholders in order of first appearance.
std::vector<std::string> placeholders_in(std::string_view text);

/// Replaces `{param}` in free text (no encoding). Unknown names are left as-is.
std::string render_text(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Renders a URL template. Placeholders in the path are segment-encoded,
/// placeholders after '?' are form-encoded. Throws UnboundPlaceholder when
/// a name has no value.
std::string render_url_template(std::string_view tmpl,
                                const std::map<std::string, std::string>& values);

}  // namespace walt
