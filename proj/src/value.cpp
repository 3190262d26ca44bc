#include "dspl/value.hpp"

#include <charconv>

#include "dspl/error.hpp"

namespace dspl {

std::string to_string(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  return std::get<std::string>(value);
}

std::string_view to_string(Comparator op) {
  switch (op) {
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view token) {
  if (token == "==") return Comparator::Eq;
  if (token == "!=") return Comparator::Ne;
  if (token == "<") return Comparator::Lt;
  if (token == "<=") return Comparator::Le;
  if (token == ">") return Comparator::Gt;
  if (token == ">=") return Comparator::Ge;
  return std::nullopt;
}

bool is_ordering(Comparator op) { return op != Comparator::Eq && op != Comparator::Ne; }

Value parse_literal(std::string_view token) {
  std::int64_t parsed = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') return std::string(token);
  auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (ec == std::errc() && ptr == last) return parsed;
  return std::string(token);
}

bool compare(const Value& lhs, Comparator op, const Value& rhs) {
  switch (op) {
    case Comparator::Eq: return lhs == rhs;
    case Comparator::Ne: return lhs != rhs;
    default: break;
  }
  const auto* l = std::get_if<std::int64_t>(&lhs);
  const auto* r = std::get_if<std::int64_t>(&rhs);
  if (l == nullptr || r == nullptr) return false;
  switch (op) {
    case Comparator::Lt: return *l < *r;
    case Comparator::Le: return *l <= *r;
    case Comparator::Gt: return *l > *r;
    case Comparator::Ge: return *l >= *r;
    default: return false;
  }
}

nlohmann::json to_json(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  return std::get<std::string>(value);
}

Value value_from_json(const nlohmann::json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw FormatError(where, "expected an integer or a string");
}

}  // namespace dspl
