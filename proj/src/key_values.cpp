// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/key_values.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dfn/error.hpp"

namespace dfn {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

KeyValues KeyValues::Parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = Trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw FormatError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    kv.Set(std::string(Trim(line.substr(0, eq))),
           std::string(Trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues KeyValues::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string KeyValues::Format() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void KeyValues::Set(const std::string& key, std::string value) {
  for (auto& e : entries_)
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  entries_.emplace_back(key, std::move(value));
}

void KeyValues::Set(const std::string& key, double value) {
  Set(key, FormatNumber(value));
}

void KeyValues::Set(const std::string& key, long long value) {
  Set(key, std::to_string(value));
}

bool KeyValues::Has(const std::string& key) const {
  return Get(key).has_value();
}

std::optional<std::string> KeyValues::Get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  return std::nullopt;
}

std::string KeyValues::GetString(const std::string& key,
                                 const std::string& def) const {
  return Get(key).value_or(def);
}

double KeyValues::GetDouble(const std::string& key, double def) const {
  const auto v = Get(key);
  if (!v) return def;
  double out = 0.0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw ConfigError("config: '" + key + "' is not a number: " + *v);
  return out;
}

long long KeyValues::GetInt(const std::string& key, long long def) const {
  const auto v = Get(key);
  if (!v) return def;
  long long out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw ConfigError("config: '" + key + "' is not an integer: " + *v);
  return out;
}

bool KeyValues::GetBool(const std::string& key, bool def) const {
  const auto v = Get(key);
  if (!v) return def;
  if (*v == "1" || *v == "true" || *v == "on" || *v == "yes") return true;
  if (*v == "0" || *v == "false" || *v == "off" || *v == "no") return false;
  throw ConfigError("config: '" + key + "' is not a boolean: " + *v);
}

std::vector<int> KeyValues::GetIntList(const std::string& key) const {
  std::vector<int> out;
  const auto v = Get(key);
  if (!v || v->empty()) return out;
  std::string_view rest(*v);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = Trim(rest.substr(0, comma));
    int value = 0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw ConfigError("config: '" + key + "' is not an integer list");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

}  // namespace dfn
