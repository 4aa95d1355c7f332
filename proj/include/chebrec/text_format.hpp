#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include "chebrec/errors.hpp"

namespace chebrec {

/// Renders a double with 17 significant digits, enough for an exact
/// text -> binary -> text round trip of any IEEE double.
[[nodiscard]] inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Strict string-to-double conversion; the whole token must be consumed.
[[nodiscard]] inline double parse_double(std::string_view tok) {
    const std::string s(tok);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw io_error("parse_double: malformed real '" + s + "'");
    return v;
}

/// Strict string-to-int conversion; the whole token must be consumed.
[[nodiscard]] inline long parse_long(std::string_view tok) {
    const std::string s(tok);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty())
        throw io_error("parse_long: malformed integer '" + s + "'");
    return v;
}

/// FNV-1a 64-bit digest, rendered as 16 hex digits. Used to fingerprint
/// configs in run reports; stable across platforms.
[[nodiscard]] inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace chebrec
