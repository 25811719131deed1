#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace taas::util {

/// Human-facing number rendering: "10", "12.5", "97.3". Up to six
/// significant digits, no trailing zeros.
inline std::string format_quantity(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Fixed-precision rendering for CSV output (byte-stable across runs).
inline std::string format_fixed(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

/// Shortest round-trip rendering, for values that must survive
/// serialize/parse cycles exactly.
inline std::string format_exact(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        throw std::invalid_argument("not a number: " + std::string(s));
    }
    return v;
}

} // namespace taas::util
