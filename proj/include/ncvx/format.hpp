#pragma once

#include <string>
#include <string_view>

namespace ncvx {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse; `what` names the field in the error message.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace ncvx
