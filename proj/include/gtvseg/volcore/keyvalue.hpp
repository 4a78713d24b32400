#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gtvseg {

/// Ordered `key=value` text records. Shared grammar for volume headers,
/// checkpoint headers, case metadata and run configs. Keys may repeat.
class KeyValues {
 public:
  using Entry = std::pair<std::string, std::string>;

  /// Parses one entry per line. Blank lines are skipped; `#` lines too when
  /// `allow_comments` is set. Throws Error on a line without '='.
  static KeyValues parse(std::string_view text, bool allow_comments = false);
  static KeyValues read_file(const std::filesystem::path& path, bool allow_comments = false);

  void write_file(const std::filesystem::path& path) const;
  std::string to_string() const;

  void add(std::string key, std::string value);
  /// Replaces the first entry with this key, or appends.
  void set(const std::string& key, std::string value);

  bool contains(std::string_view key) const { return find(key).has_value(); }
  std::optional<std::string> find(std::string_view key) const;
  /// Throws Error when the key is missing.
  std::string get(std::string_view key) const;
  std::vector<std::string> all(std::string_view key) const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
std::string format_float(float v);

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);
bool parse_bool(std::string_view s);
std::vector<double> parse_doubles(std::string_view s);
std::vector<int> parse_ints(std::string_view s);

}  // namespace gtvseg
