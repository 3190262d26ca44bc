#include "placeholder.hpp"

#include "dspl/error.hpp"

namespace dspl::detail {
namespace {

template <typename OnText, typename OnName>
void scan(std::string_view pattern, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < pattern.size()) {
    auto open = pattern.find("${", i);
    if (open == std::string_view::npos) {
      on_text(pattern.substr(i));
      return;
    }
    on_text(pattern.substr(i, open - i));
    auto close = pattern.find('}', open + 2);
    if (close == std::string_view::npos) {
      throw DerivationError("unterminated placeholder in `" + std::string(pattern) + "`");
    }
    if (close == open + 2) throw DerivationError("empty placeholder in `" + std::string(pattern) + "`");
    on_name(std::string(pattern.substr(open + 2, close - open - 2)));
    i = close + 1;
  }
}

}  // namespace

std::vector<std::string> placeholders(std::string_view pattern) {
  std::vector<std::string> names;
  scan(pattern, [](std::string_view) {}, [&](std::string name) { names.push_back(std::move(name)); });
  return names;
}

std::string substitute(std::string_view pattern, const std::function<std::string(const std::string&)>& lookup) {
  std::string out;
  scan(pattern, [&](std::string_view text) { out += text; }, [&](const std::string& name) { out += lookup(name); });
  return out;
}

}  // namespace dspl::detail
