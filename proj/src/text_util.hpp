#pragma once

// Helpers shared by the line-oriented readers.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stitkit/error.hpp"

namespace stitkit::detail {

struct Line {
  std::size_t number;
  std::string text;
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Non-blank lines with '#' comments removed.
inline std::vector<Line> content_lines(const std::string& text) {
  std::vector<Line> out;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++number;
    std::string line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) out.push_back({number, line});
    start = end + 1;
  }
  return out;
}

inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    std::size_t start = k;
    while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    if (k > start) out.emplace_back(s.substr(start, k - start));
  }
  return out;
}

// Splits "key rest: payload" at the first ':'.
inline bool split_colon(const std::string& line, std::string& head, std::string& payload) {
  auto colon = line.find(':');
  if (colon == std::string::npos) return false;
  head = trim(std::string_view(line).substr(0, colon));
  payload = trim(std::string_view(line).substr(colon + 1));
  return true;
}

// "{a b} {c}" -> {{a,b},{c}}
inline std::vector<std::vector<std::string>> brace_groups(const std::string& s, std::size_t line) {
  std::vector<std::vector<std::string>> out;
  std::size_t k = 0;
  while (k < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[k]))) {
      ++k;
      continue;
    }
    if (s[k] != '{') throw FormatError("expected '{' in cell list", line);
    auto close = s.find('}', k);
    if (close == std::string::npos) throw FormatError("unterminated '{'", line);
    out.push_back(words(std::string_view(s).substr(k + 1, close - k - 1)));
    k = close + 1;
  }
  return out;
}

inline std::size_t parse_natural(const std::string& s, std::size_t line, const char* what) {
  if (s.empty() || s.size() > 9) throw FormatError(std::string("bad ") + what + " '" + s + "'", line);
  std::size_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw FormatError(std::string("bad ") + what + " '" + s + "'", line);
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

}  // namespace stitkit::detail
