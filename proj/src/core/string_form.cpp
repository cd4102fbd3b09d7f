#include "xlv/string_form.hpp"

#include <algorithm>
#include <optional>

namespace xlv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

bool is_quoted(std::string_view s) {
  return s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front();
}

// Splits on `sep` at nesting depth zero, outside quotes. Returns nullopt on
// unbalanced brackets or an unterminated quote.
std::optional<std::vector<std::string_view>> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '\'':
      case '"':
        quote = c;
        break;
      case '{':
      case '[':
      case '(':
        ++depth;
        break;
      case '}':
      case ']':
      case ')':
        if (--depth < 0) return std::nullopt;
        break;
      default:
        if (c == sep && depth == 0) {
          parts.push_back(s.substr(start, i - start));
          start = i + 1;
        }
    }
  }
  if (quote || depth != 0) return std::nullopt;
  parts.push_back(s.substr(start));
  return parts;
}

// Position of the first `sep` at depth zero outside quotes.
std::optional<std::size_t> find_top_level(std::string_view s, char sep) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '{' || c == '[' || c == '(') {
      ++depth;
    } else if (c == '}' || c == ']' || c == ')') {
      --depth;
    } else if (c == sep && depth == 0) {
      return i;
    }
  }
  return std::nullopt;
}

std::string normalize_token(std::string_view token) {
  token = trim(token);
  if (is_quoted(token)) return std::string(token.substr(1, token.size() - 2));
  if (token == "None") return "null";
  if (token == "True") return "true";
  if (token == "False") return "false";
  std::vector<std::pair<std::string, std::string>> nested;
  if (parse_map_rendering(token, nested)) {
    std::string out = "{";
    for (std::size_t i = 0; i < nested.size(); ++i) {
      if (i) out += ", ";
      out += nested[i].first + "=" + nested[i].second;
    }
    return out + "}";
  }
  return std::string(token);
}

}  // namespace

bool parse_map_rendering(std::string_view text, std::vector<std::pair<std::string, std::string>>& out) {
  out.clear();
  text = trim(text);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') return false;
  std::string_view body = trim(text.substr(1, text.size() - 2));
  if (body.empty()) return true;
  auto entries = split_top_level(body, ',');
  if (!entries) return false;
  for (std::string_view entry : *entries) {
    entry = trim(entry);
    // Target style quotes its keys and separates with ':'; source style uses '='.
    std::optional<std::size_t> sep;
    if (!entry.empty() && (entry.front() == '\'' || entry.front() == '"')) {
      sep = find_top_level(entry, ':');
    }
    if (!sep) sep = find_top_level(entry, '=');
    if (!sep) sep = find_top_level(entry, ':');
    if (!sep) return false;
    out.emplace_back(normalize_token(entry.substr(0, *sep)), normalize_token(entry.substr(*sep + 1)));
  }
  std::sort(out.begin(), out.end());
  return true;
}

bool string_form_equal(std::string_view expected, std::string_view actual) {
  if (expected == actual) return true;
  std::vector<std::pair<std::string, std::string>> lhs;
  std::vector<std::pair<std::string, std::string>> rhs;
  if (!parse_map_rendering(expected, lhs) || !parse_map_rendering(actual, rhs)) return false;
  return lhs == rhs;
}

}  // namespace xlv
