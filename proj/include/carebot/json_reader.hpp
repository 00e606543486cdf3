#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "carebot/common.hpp"

namespace carebot {

using nlohmann::json;

/// Parses a JSON document; syntax errors become LoadError with `line:col`.
json parse_json_text(std::string_view text, const std::string& source);
json load_json_file(const std::filesystem::path& file);

/// Read-only cursor over a JSON value that remembers where it is, so every
/// validation failure can name the exact field.
class JsonReader {
 public:
  JsonReader(const json& value, std::string source, std::string path = "$")
      : value_(&value), source_(std::move(source)), path_(std::move(path)) {}

  const json& raw() const { return *value_; }
  const std::string& path() const { return path_; }
  const std::string& source() const { return source_; }

  bool has(std::string_view key) const;
  JsonReader at(std::string_view key) const;
  std::optional<JsonReader> find(std::string_view key) const;
  JsonReader at(std::size_t index) const;

  std::size_t size() const;
  std::vector<JsonReader> elements() const;
  std::vector<std::pair<std::string, JsonReader>> members() const;

  std::string string() const;
  double number() const;
  double number_in(double lo, double hi) const;
  std::int64_t integer() const;
  bool boolean() const;
  std::vector<std::string> strings() const;

  std::string string_or(std::string_view key, std::string fallback) const;
  double number_or(std::string_view key, double fallback) const;
  std::int64_t integer_or(std::string_view key, std::int64_t fallback) const;
  bool boolean_or(std::string_view key, bool fallback) const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  void expect_object() const;
  void expect_array() const;

  const json* value_;
  std::string source_;
  std::string path_;
};

template <class T>
void put_optional(json& out, const char* key, const std::optional<T>& value) {
  out[key] = value ? json(*value) : json(nullptr);
}

template <class T>
std::optional<T> get_optional(const json& in, const char* key) {
  auto it = in.find(key);
  if (it == in.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace carebot
