#include "dspl/predicate.hpp"

#include <cctype>

#include "dspl/error.hpp"

namespace dspl {
namespace {

struct Token {
  std::string text;
  bool quoted = false;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    Token token;
    if (text[i] == '"') {
      token.quoted = true;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        char c = text[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\') {
          if (i == text.size()) break;
          c = text[i++];
        }
        token.text.push_back(c);
      }
      if (!closed) throw FormatError("predicate", "unterminated string literal");
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) token.text.push_back(text[i++]);
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace

ContextPredicate::ContextPredicate(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw FormatError("predicate", "empty predicate");
  for (const auto& atom : atoms_) {
    if (atom.path.empty()) throw FormatError("predicate", "empty path");
    if (is_ordering(atom.op) && !std::holds_alternative<std::int64_t>(atom.literal)) {
      throw FormatError("predicate", "comparator " + std::string(to_string(atom.op)) + " on " + atom.path +
                                         " needs an integer literal");
    }
  }
}

ContextPredicate ContextPredicate::parse(std::string_view text) {
  auto tokens = tokenize(text);
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (true) {
    if (i + 3 > tokens.size()) throw FormatError("predicate", "expected `path OP literal` in `" + std::string(text) + "`");
    Atom atom;
    if (tokens[i].quoted) throw FormatError("predicate", "path must not be quoted");
    atom.path = tokens[i].text;
    auto op = tokens[i + 1].quoted ? std::nullopt : parse_comparator(tokens[i + 1].text);
    if (!op) throw FormatError("predicate", "unknown comparator `" + tokens[i + 1].text + "`");
    atom.op = *op;
    atom.literal = tokens[i + 2].quoted ? Value(tokens[i + 2].text) : parse_literal(tokens[i + 2].text);
    atoms.push_back(std::move(atom));
    i += 3;
    if (i == tokens.size()) break;
    if (tokens[i].quoted || tokens[i].text != "AND") {
      throw FormatError("predicate", "expected AND, found `" + tokens[i].text + "`");
    }
    ++i;
  }
  return ContextPredicate(std::move(atoms));
}

bool ContextPredicate::holds(const std::map<std::string, Value>& dimensions) const {
  for (const auto& atom : atoms_) {
    auto it = dimensions.find(atom.path);
    if (it == dimensions.end() || !compare(it->second, atom.op, atom.literal)) return false;
  }
  return true;
}

bool ContextPredicate::mentions(std::string_view path) const {
  for (const auto& atom : atoms_) {
    if (atom.path == path) return true;
  }
  return false;
}

std::string ContextPredicate::str() const {
  std::string out;
  for (const auto& atom : atoms_) {
    if (!out.empty()) out += " AND ";
    out += atom.path;
    out += ' ';
    out += to_string(atom.op);
    out += ' ';
    out += literal_text(atom.literal);
  }
  return out;
}

std::string literal_text(const Value& value) {
  if (std::holds_alternative<std::int64_t>(value)) return to_string(value);
  const auto& s = std::get<std::string>(value);
  bool bare = !s.empty() && s != "AND" && !parse_comparator(s) && std::holds_alternative<std::string>(parse_literal(s));
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\\') bare = false;
  }
  if (bare) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') quoted.push_back('\\');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

}  // namespace dspl
