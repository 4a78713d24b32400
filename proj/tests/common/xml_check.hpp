#pragma once

// Minimal well-formedness check for generated SVG: balanced, properly nested
// tags, quoted attributes and only the five predefined entities.

#include <string>
#include <vector>

namespace oracle {

/// Empty when well-formed, otherwise a description of the first problem.
inline std::string xml_problem(const std::string& s) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  if (s.rfind("<?xml", 0) == 0) {
    i = s.find("?>");
    if (i == std::string::npos) return "unterminated declaration";
    i += 2;
  }
  bool root_seen = false;
  while (i < s.size()) {
    if (s[i] == '&') {
      const auto end = s.find(';', i);
      if (end == std::string::npos) return "bare ampersand";
      const std::string ent = s.substr(i, end - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;") return "entity " + ent;
      i = end + 1;
      continue;
    }
    if (s[i] == '>') return "stray '>'";
    if (s[i] != '<') {
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(s[i]))) return "text outside root";
      ++i;
      continue;
    }
    const auto end = s.find('>', i);
    if (end == std::string::npos) return "unterminated tag";
    std::string tag = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return "empty tag";
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return "mismatched </" + name + ">";
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    if (self_closing) tag.pop_back();
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
    // Attribute values must be quoted and free of '<'.
    std::size_t q = 0;
    int quotes = 0;
    while ((q = tag.find('"', q)) != std::string::npos) {
      ++quotes;
      ++q;
    }
    if (quotes % 2) return "unbalanced quotes in <" + name + ">";
    if (tag.find('<') != std::string::npos) return "'<' inside <" + name + ">";
    if (stack.empty()) {
      if (root_seen) return "second root element";
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  if (!root_seen) return "no root element";
  return {};
}

}  // namespace oracle
