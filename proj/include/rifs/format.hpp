#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace rifs {

/// Shortest decimal form that parses back to the same binary64 value.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Strict parse of a decimal number or a fraction "a/b".
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

} // namespace rifs
