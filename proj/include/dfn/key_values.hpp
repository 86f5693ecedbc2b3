// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Ordered `key=value` text used for weight-container metadata and --config
// files. '#' starts a comment line; blank lines are skipped.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dfn {

class KeyValues {
 public:
  using Entry = std::pair<std::string, std::string>;

  static KeyValues Parse(std::string_view text);
  static KeyValues LoadFile(const std::string& path);
  std::string Format() const;

  void Set(const std::string& key, std::string value);
  void Set(const std::string& key, double value);
  void Set(const std::string& key, long long value);
  void Set(const std::string& key, int value) {
    Set(key, static_cast<long long>(value));
  }

  bool Has(const std::string& key) const;
  std::optional<std::string> Get(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& def) const;
  double GetDouble(const std::string& key, double def) const;
  long long GetInt(const std::string& key, long long def) const;
  bool GetBool(const std::string& key, bool def) const;
  std::vector<int> GetIntList(const std::string& key) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const KeyValues&) const = default;

 private:
  std::vector<Entry> entries_;
};

// Shortest round-trip decimal representation.
std::string FormatNumber(double v);

}  // namespace dfn
