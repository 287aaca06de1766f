#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rdtu::csv {

std::string_view trim(std::string_view s);
std::vector<std::string> split_line(std::string_view line);
/// Quotes a field when it holds a comma, a quote or surrounding blanks.
std::string quote(std::string_view field);

}  // namespace rdtu::csv
