#include "json_util.hpp"

namespace dspl::detail {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

Fields::Fields(const json& object, std::string path, std::initializer_list<std::string_view> allowed)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) throw FormatError(path_.empty() ? "/" : path_, "expected an object");
  for (const auto& [key, _] : object_.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw FormatError(at(key), "unknown key `" + key + "`");
  }
}

bool Fields::has(std::string_view key) const { return optional(key) != nullptr; }

const json& Fields::required(std::string_view key) const {
  const json* j = optional(key);
  if (j == nullptr) throw FormatError(at(key), "missing required key");
  return *j;
}

const json* Fields::optional(std::string_view key) const {
  auto it = object_.find(std::string(key));
  if (it == object_.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string Fields::string(std::string_view key) const {
  const json& j = required(key);
  if (!j.is_string()) throw FormatError(at(key), "expected a string");
  return j.get<std::string>();
}

std::optional<std::string> Fields::optional_string(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return string(key);
}

std::int64_t Fields::integer(std::string_view key) const {
  const json& j = required(key);
  if (!j.is_number_integer()) throw FormatError(at(key), "expected an integer");
  return j.get<std::int64_t>();
}

bool Fields::boolean(std::string_view key, bool fallback) const {
  const json* j = optional(key);
  if (j == nullptr) return fallback;
  if (!j->is_boolean()) throw FormatError(at(key), "expected a boolean");
  return j->get<bool>();
}

Value Fields::value(std::string_view key) const { return value_from_json(required(key), at(key)); }

std::vector<std::string> Fields::strings(std::string_view key) const {
  std::vector<std::string> out;
  const json* j = optional(key);
  if (j == nullptr) return out;
  if (!j->is_array()) throw FormatError(at(key), "expected an array of strings");
  for (std::size_t i = 0; i < j->size(); ++i) {
    if (!(*j)[i].is_string()) throw FormatError(item_path(at(key), i), "expected a string");
    out.push_back((*j)[i].get<std::string>());
  }
  return out;
}

const json& Fields::array(std::string_view key) const {
  static const json empty = json::array();
  const json* j = optional(key);
  if (j == nullptr) return empty;
  if (!j->is_array()) throw FormatError(at(key), "expected an array");
  return *j;
}

std::string item_path(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

}  // namespace dspl::detail
