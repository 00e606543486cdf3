#include "carebot/json_reader.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace carebot {

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw LoadError(source, line_col(text, byte), "syntax error");
  }
}

json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError(file.string(), "$", "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), file.string());
}

void JsonReader::fail(const std::string& message) const {
  throw LoadError(source_, path_, message);
}

void JsonReader::expect_object() const {
  if (!value_->is_object()) fail("expected an object");
}

void JsonReader::expect_array() const {
  if (!value_->is_array()) fail("expected an array");
}

bool JsonReader::has(std::string_view key) const {
  return value_->is_object() && value_->contains(key);
}

JsonReader JsonReader::at(std::string_view key) const {
  expect_object();
  auto it = value_->find(key);
  if (it == value_->end()) fail("missing required field '" + std::string(key) + "'");
  return JsonReader(*it, source_, path_ + "." + std::string(key));
}

std::optional<JsonReader> JsonReader::find(std::string_view key) const {
  expect_object();
  auto it = value_->find(key);
  if (it == value_->end() || it->is_null()) return std::nullopt;
  return JsonReader(*it, source_, path_ + "." + std::string(key));
}

JsonReader JsonReader::at(std::size_t index) const {
  expect_array();
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return JsonReader((*value_)[index], source_, path_ + "[" + std::to_string(index) + "]");
}

std::size_t JsonReader::size() const {
  if (!value_->is_array() && !value_->is_object()) fail("expected a container");
  return value_->size();
}

std::vector<JsonReader> JsonReader::elements() const {
  expect_array();
  std::vector<JsonReader> out;
  out.reserve(value_->size());
  for (std::size_t i = 0; i < value_->size(); ++i) out.push_back(at(i));
  return out;
}

std::vector<std::pair<std::string, JsonReader>> JsonReader::members() const {
  expect_object();
  std::vector<std::pair<std::string, JsonReader>> out;
  for (auto it = value_->begin(); it != value_->end(); ++it) {
    out.emplace_back(it.key(), JsonReader(it.value(), source_, path_ + "." + it.key()));
  }
  return out;
}

std::string JsonReader::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

double JsonReader::number() const {
  if (!value_->is_number()) fail("expected a number");
  const double v = value_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double JsonReader::number_in(double lo, double hi) const {
  const double v = number();
  if (v < lo || v > hi) {
    std::ostringstream msg;
    msg << "value " << v << " outside [" << lo << ", " << hi << "]";
    fail(msg.str());
  }
  return v;
}

std::int64_t JsonReader::integer() const {
  if (!value_->is_number_integer()) fail("expected an integer");
  return value_->get<std::int64_t>();
}

bool JsonReader::boolean() const {
  if (!value_->is_boolean()) fail("expected a boolean");
  return value_->get<bool>();
}

std::vector<std::string> JsonReader::strings() const {
  std::vector<std::string> out;
  for (const auto& e : elements()) out.push_back(e.string());
  return out;
}

std::string JsonReader::string_or(std::string_view key, std::string fallback) const {
  auto r = find(key);
  return r ? r->string() : std::move(fallback);
}

double JsonReader::number_or(std::string_view key, double fallback) const {
  auto r = find(key);
  return r ? r->number() : fallback;
}

std::int64_t JsonReader::integer_or(std::string_view key, std::int64_t fallback) const {
  auto r = find(key);
  return r ? r->integer() : fallback;
}

bool JsonReader::boolean_or(std::string_view key, bool fallback) const {
  auto r = find(key);
  return r ? r->boolean() : fallback;
}

}  // namespace carebot
