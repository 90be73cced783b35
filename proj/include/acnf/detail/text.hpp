#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace acnf::detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Whole-string decimal parse; rejects trailing garbage, inf and nan.
inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    if (v != v || v - v != 0.0) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Parses a plain decimal and divides it by 100 by moving the decimal point,
/// so "56.39" yields the double nearest 0.5639 rather than 56.39 / 100.
inline std::optional<double> parse_percent(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.back() == '%') s = trim(s.substr(0, s.size() - 1));
    if (s.empty() || s.find_first_not_of("0123456789.") != std::string_view::npos) {
        auto v = parse_double(s);
        if (!v) return std::nullopt;
        return *v / 100.0;
    }
    const auto dot = s.find('.');
    if (dot != std::string_view::npos && s.find('.', dot + 1) != std::string_view::npos) return std::nullopt;
    std::string int_part(s.substr(0, dot));
    std::string frac_part(dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1));
    const std::string digits = int_part + frac_part;
    if (digits.empty()) return std::nullopt;
    const long point = static_cast<long>(int_part.size()) - 2;
    std::string shifted;
    if (point <= 0)
        shifted = "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    else
        shifted = digits.substr(0, static_cast<std::size_t>(point)) + "." + digits.substr(static_cast<std::size_t>(point));
    return parse_double(shifted);
}

/// Shortest text that round-trips to the same double.
inline std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

/// Fixed notation with trailing zeros dropped but at least `min_decimals` kept.
inline std::string format_trimmed(double v, int max_decimals, int min_decimals) {
    std::string s = format_fixed(v, max_decimals);
    const auto dot = s.find('.');
    if (dot == std::string::npos) return s;
    std::size_t keep = s.size();
    while (keep > dot + 1 + static_cast<std::size_t>(min_decimals) && s[keep - 1] == '0') --keep;
    if (keep == dot + 1) --keep;
    return s.substr(0, keep);
}

} // namespace acnf::detail
