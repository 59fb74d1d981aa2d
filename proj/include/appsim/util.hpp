#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace appsim {

// Canonical number -> text used in SVG attributes, state-label keys and the
// action grammar. Integral values print without a decimal point; everything
// else prints the shortest representation that round-trips.
std::string canon_num(double v);

// Like canon_num but integral values keep a ".0" suffix (action grammar
// degrees are always written as decimals).
std::string canon_decimal(double v);

bool is_identifier(std::string_view s);

uint64_t fnv1a64(std::string_view s);

std::string trim(std::string_view s);

std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace appsim
