#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "printmon/errors.hpp"

namespace printmon {

/// Line-based `key = value` configuration dialect with dotted keys.
/// `#` starts a comment; blank lines are ignored. Later assignments to the
/// same key win, which is what the defaults < file < flags precedence uses.
class KeyValueConfig {
public:
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key) const;            // throws BadConfig
  double get_double(const std::string& key) const;                 // throws BadConfig
  std::int64_t get_int(const std::string& key) const;              // throws BadConfig
  bool get_bool(const std::string& key) const;                     // throws BadConfig

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  /// Overlays every entry of `other` on top of this config.
  void merge_from(const KeyValueConfig& other);

  /// Serializes entries sorted by key, one `key = value` per line.
  std::string serialize() const;

  /// Keys sharing a dotted prefix, e.g. prefix "tone" matches "tone.0.amp".
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

}  // namespace printmon
