#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace pathcent::text {

/// Formats a double with the given number of significant digits ("%.*g").
inline std::string format_double(double value, int significant = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, value);
    return buf;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

template <typename Range>
std::string join(const Range& parts, char sep) {
    std::string out;
    bool first = true;
    for (const auto& p : parts) {
        if (!first) out.push_back(sep);
        out += p;
        first = false;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace pathcent::text
