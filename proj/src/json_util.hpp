#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/error.hpp"
#include "dspl/value.hpp"

namespace dspl::detail {

using nlohmann::json;

/// Parses text as JSON, reporting syntax errors with their byte offset.
json parse_json(std::string_view text);

/// Strict view over a JSON object: unknown keys are rejected up front and
/// every accessor reports failures with a JSON-pointer location.
class Fields {
 public:
  Fields(const json& object, std::string path, std::initializer_list<std::string_view> allowed);

  const std::string& path() const { return path_; }
  std::string at(std::string_view key) const { return path_ + "/" + std::string(key); }

  bool has(std::string_view key) const;
  const json& required(std::string_view key) const;
  /// Null is treated as absent.
  const json* optional(std::string_view key) const;

  std::string string(std::string_view key) const;
  std::optional<std::string> optional_string(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  bool boolean(std::string_view key, bool fallback) const;
  Value value(std::string_view key) const;
  std::vector<std::string> strings(std::string_view key) const;
  const json& array(std::string_view key) const;

 private:
  const json& object_;
  std::string path_;
};

std::string item_path(const std::string& base, std::size_t index);

}  // namespace dspl::detail
