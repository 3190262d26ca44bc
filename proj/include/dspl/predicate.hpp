#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dspl/value.hpp"

namespace dspl {

struct Atom {
  std::string path;
  Comparator op = Comparator::Eq;
  Value literal;

  bool operator==(const Atom&) const = default;
};

/// Conjunction of comparator atoms over dotted paths, written
/// `path OP literal [AND path OP literal]*`.
class ContextPredicate {
 public:
  /// Throws FormatError on empty atom lists or ordering comparators with
  /// non-integer literals.
  explicit ContextPredicate(std::vector<Atom> atoms);

  static ContextPredicate parse(std::string_view text);

  const std::vector<Atom>& atoms() const { return atoms_; }

  /// Atoms over paths missing from `dimensions` evaluate to false.
  bool holds(const std::map<std::string, Value>& dimensions) const;
  bool mentions(std::string_view path) const;

  std::string str() const;

  bool operator==(const ContextPredicate&) const = default;

 private:
  std::vector<Atom> atoms_;
};

/// Renders a literal so that ContextPredicate::parse reads it back unchanged.
std::string literal_text(const Value& value);

}  // namespace dspl
