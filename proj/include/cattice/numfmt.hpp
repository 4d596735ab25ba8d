// Locale-independent decimal formatting for reports and checkpoints.
#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <system_error>

namespace cattice {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt_double_full(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string fmt_double_fixed(double x, int places) {
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof(buf), x,
                             std::chars_format::fixed, places);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("malformed real number: '" + s + "'");
    return x;
}

inline std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("malformed integer: '" + s + "'");
    return x;
}

} // namespace cattice
