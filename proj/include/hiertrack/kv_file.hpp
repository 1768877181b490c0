#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hiertrack {

/// Flat `key = value` records with dotted namespaces. Blank lines and `#`
/// comments are ignored; a later duplicate key overrides an earlier one but
/// keeps the original position.
class KeyValueFile {
 public:
  using Entry = std::pair<std::string, std::string>;

  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  /// Entries whose key starts with `prefix` (prefix included), in file order.
  std::vector<Entry> with_prefix(std::string_view prefix) const;
  const std::vector<Entry>& entries() const { return entries_; }

  std::string dump() const;

 private:
  std::vector<Entry> entries_;
};

double parse_double(std::string_view text, std::string_view what);
long parse_long(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
std::vector<std::string> split_ws(std::string_view text);
std::string trim(std::string_view text);
/// Round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace hiertrack
