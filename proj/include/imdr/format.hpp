#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace imdr {

/// Full-precision, locale-independent rendering of a finite double.
/// Round-trips exactly through strtod; used for all machine-readable output.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Round half away from zero to the given number of decimals and render with
/// exactly that many digits after the point ("0.7300" style display values).
/// Built from the scaled integer so no second rounding happens at print time.
inline std::string format_display(double v, int decimals) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    const double magnitude = std::floor(std::fabs(v) * scale + 0.5);
    long long units = static_cast<long long>(magnitude);
    std::string digits = std::to_string(units);
    if (static_cast<int>(digits.size()) <= decimals)
        digits.insert(0, static_cast<size_t>(decimals) + 1 - digits.size(), '0');
    if (decimals > 0)
        digits.insert(digits.size() - static_cast<size_t>(decimals), ".");
    if (std::signbit(v) && units != 0)
        digits.insert(0, "-");
    return digits;
}

/// Compact rendering for class-break labels and log lines.
inline std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline double parse_double(const std::string& text, bool& ok) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    ok = end != begin && end && *end == '\0';
    return v;
}

} // namespace imdr
