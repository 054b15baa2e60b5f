#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wfix/core.hpp"

namespace wfix {

/// Fixed-point decimal with `digits` places. Rounds the exact binary value
/// to nearest, ties to even (glibc printf semantics).
std::string format_fixed(real v, int digits);

std::string format_sci(real v, int digits);

/// Whole-string parse; throws ConfigError on trailing junk or empty input.
real parse_real(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace wfix
