#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace carebot {

/// Controller time is counted in ticks, never wall-clock.
using Tick = std::int64_t;

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// Raised by every file loader. `path` locates the offending field
/// (e.g. `$.states[2].entry.behavior`) or a `line:col` pair for syntax errors.
class LoadError : public std::runtime_error {
 public:
  LoadError(std::string source, std::string path, std::string message)
      : std::runtime_error(source + ": " + path + ": " + message),
        source_(std::move(source)),
        path_(std::move(path)),
        message_(std::move(message)) {}

  const std::string& source() const { return source_; }
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string source_;
  std::string path_;
  std::string message_;
};

// Enum <-> name tables. Each enum header declares a constexpr table and thin
// to_string / parse wrappers around these two helpers.
template <class E>
struct EnumName {
  E value;
  std::string_view name;
};

template <class E, std::size_t N>
constexpr std::string_view enum_to_string(E value, const std::array<EnumName<E>, N>& table) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

template <class E, std::size_t N>
constexpr std::optional<E> enum_from_string(std::string_view name,
                                            const std::array<EnumName<E>, N>& table) {
  for (const auto& entry : table) {
    if (entry.name == name) return entry.value;
  }
  return std::nullopt;
}

}  // namespace carebot
