#include "gtvseg/volcore/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg {

KeyValues KeyValues::parse(std::string_view text, bool allow_comments) {
  KeyValues kv;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (allow_comments && t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error("malformed key=value line " + std::to_string(line_no) + ": '" + t + "'");
    }
    kv.add(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    if (end == text.size()) break;
  }
  return kv;
}

KeyValues KeyValues::read_file(const std::filesystem::path& path, bool allow_comments) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), allow_comments);
}

void KeyValues::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_string();
  if (!out) throw Error("write failed: " + path.string());
}

std::string KeyValues::to_string() const {
  std::string s;
  for (const auto& [k, v] : entries_) {
    s += k;
    s += '=';
    s += v;
    s += '\n';
  }
  return s;
}

void KeyValues::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValues::set(const std::string& key, std::string value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  }
  add(key, std::move(value));
}

std::optional<std::string> KeyValues::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  return std::nullopt;
}

std::string KeyValues::get(std::string_view key) const {
  auto v = find(key);
  if (!v) throw Error("missing key '" + std::string(key) + "'");
  return *v;
}

std::vector<std::string> KeyValues::all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.first == key) out.push_back(e.second);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_float(float v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? s.size() - start : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw Error("not a number: '" + t + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  const std::string t = trim(s);
  long long v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw Error("not an integer: '" + t + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  const std::string t = trim(s);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw Error("not a boolean: '" + t + "'");
}

std::vector<double> parse_doubles(std::string_view s) {
  std::vector<double> out;
  for (const auto& tok : split_ws(s)) out.push_back(parse_double(tok));
  return out;
}

std::vector<int> parse_ints(std::string_view s) {
  std::vector<int> out;
  for (const auto& tok : split_ws(s)) out.push_back(static_cast<int>(parse_int(tok)));
  return out;
}

}  // namespace gtvseg
