#include "walt/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "walt/errors.hpp"

namespace walt {

namespace {

bool is_unreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~';
}

char hex_digit(int v) { return "0123456789ABCDEF"[v & 0xF]; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

template <typename Fn>
void for_each_placeholder(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = text.find('}', open + 1);
    if (close == std::string_view::npos) break;
    auto name = text.substr(open + 1, close - open - 1);
    if (is_identifier(name)) {
      fn(open, close + 1, name);
      pos = close + 1;
    } else {
      pos = open + 1;
    }
  }
}

}  // namespace

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::to_string() const {
  std::string out = origin() + (path.empty() ? "/" : path);
  if (!query.empty()) out += "?" + encode_query(query);
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

std::optional<std::string> Url::param(std::string_view key) const {
  for (const auto& [k, v] : query) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<std::string> Url::path_segments() const {
  std::vector<std::string> segments;
  std::size_t start = 1;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) segments.push_back(url_decode(path.substr(start, end - start)));
    start = end + 1;
  }
  return segments;
}

std::optional<Url> parse_url(std::string_view text) {
  auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  Url url;
  url.scheme = std::string(text.substr(0, scheme_end));
  if (!std::all_of(url.scheme.begin(), url.scheme.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
      })) {
    return std::nullopt;
  }
  std::transform(url.scheme.begin(), url.scheme.end(), url.scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto rest = text.substr(scheme_end + 3);
  auto authority_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, authority_end);
  if (authority.empty()) return std::nullopt;
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    int port = 0;
    auto digits = authority.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port <= 0 || port > 65535) {
      return std::nullopt;
    }
    url.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  url.host = std::string(authority);
  std::transform(url.host.begin(), url.host.end(), url.host.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (authority_end == std::string_view::npos) return url;
  rest = rest.substr(authority_end);
  auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  auto qmark = rest.find('?');
  url.path = std::string(rest.substr(0, qmark));
  if (url.path.empty()) url.path = "/";
  if (qmark != std::string_view::npos) url.query = parse_query(rest.substr(qmark + 1));
  return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view ref) {
  if (ref.find("://") != std::string_view::npos) return parse_url(ref);
  if (ref.empty()) return base;
  std::string joined = base.origin();
  if (ref.front() == '/') {
    joined += std::string(ref);
  } else if (ref.front() == '?') {
    joined += base.path + std::string(ref);
  } else if (ref.front() == '#') {
    Url copy = base;
    copy.fragment = std::string(ref.substr(1));
    return copy;
  } else {
    auto dir = base.path.substr(0, base.path.rfind('/') + 1);
    joined += dir + std::string(ref);
  }
  return parse_url(joined);
}

std::string form_encode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (is_unreserved(c) || c == '*') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += hex_digit(c >> 4);
      out += hex_digit(c);
    }
  }
  return out;
}

std::string encode_path_segment(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (is_unreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex_digit(c >> 4);
      out += hex_digit(c);
    }
  }
  return out;
}

std::string url_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 &&
               hex_value(text[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

QueryParams parse_query(std::string_view query) {
  QueryParams params;
  std::size_t start = 0;
  while (start <= query.size()) {
    auto end = query.find('&', start);
    if (end == std::string_view::npos) end = query.size();
    auto pair = query.substr(start, end - start);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      if (eq == std::string_view::npos) {
        params.emplace_back(url_decode(pair), "");
      } else {
        params.emplace_back(url_decode(pair.substr(0, eq)), url_decode(pair.substr(eq + 1)));
      }
    }
    start = end + 1;
  }
  return params;
}

std::string encode_query(const QueryParams& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += '&';
    out += form_encode(k) + "=" + form_encode(v);
  }
  return out;
}

bool same_url(std::string_view a, std::string_view b) {
  auto ua = parse_url(a);
  auto ub = parse_url(b);
  if (!ua || !ub) return url_decode(a) == url_decode(b);
  ua->fragment.clear();
  ub->fragment.clear();
  return ua->origin() == ub->origin() && url_decode(ua->path) == url_decode(ub->path) &&
         ua->query == ub->query;
}

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> names;
  for_each_placeholder(text, [&](std::size_t, std::size_t, std::string_view name) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
  });
  return names;
}

std::string render_text(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t last = 0;
  for_each_placeholder(tmpl, [&](std::size_t begin, std::size_t end, std::string_view name) {
    auto it = values.find(std::string(name));
    if (it == values.end()) return;
    out += tmpl.substr(last, begin - last);
    out += it->second;
    last = end;
  });
  out += tmpl.substr(last);
  return out;
}

std::string render_url_template(std::string_view tmpl,
                                const std::map<std::string, std::string>& values) {
  auto query_start = tmpl.find('?');
  std::string out;
  std::size_t last = 0;
  for_each_placeholder(tmpl, [&](std::size_t begin, std::size_t end, std::string_view name) {
    auto it = values.find(std::string(name));
    if (it == values.end()) throw UnboundPlaceholder(std::string(name));
    out += tmpl.substr(last, begin - last);
    bool in_query = query_start != std::string_view::npos && begin > query_start;
    out += in_query ? form_encode(it->second) : encode_path_segment(it->second);
    last = end;
  });
  out += tmpl.substr(last);
  return out;
}

}  // namespace walt
