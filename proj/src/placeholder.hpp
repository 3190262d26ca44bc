#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dspl::detail {

/// Names referenced as `${name}` in a template pattern. Throws
/// DerivationError on an unterminated or empty placeholder.
std::vector<std::string> placeholders(std::string_view pattern);

std::string substitute(std::string_view pattern, const std::function<std::string(const std::string&)>& lookup);

}  // namespace dspl::detail
