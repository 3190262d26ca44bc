#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

namespace dspl {

/// Attribute bindings, context dimensions and literals. Integers order before
/// strings, which keeps every sort over values total and deterministic.
using Value = std::variant<std::int64_t, std::string>;

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

std::string to_string(const Value& value);
std::string_view to_string(Comparator op);

std::optional<Comparator> parse_comparator(std::string_view token);

/// True for <, <=, >, >= which only make sense on integers.
bool is_ordering(Comparator op);

/// Integer-looking tokens become integers, anything else stays a string.
Value parse_literal(std::string_view token);

/// Ordering comparators are false whenever either side is not an integer.
bool compare(const Value& lhs, Comparator op, const Value& rhs);

nlohmann::json to_json(const Value& value);
/// Accepts JSON integers and strings; `where` names the location for errors.
Value value_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace dspl
