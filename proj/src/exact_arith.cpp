#include "ppd/exact_arith.hpp"

#include <algorithm>

namespace ppd {

std::string int128_to_string(Int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    UInt128 u = neg ? UInt128(0) - static_cast<UInt128>(v) : static_cast<UInt128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

std::optional<Int128> int128_from_string(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) return std::nullopt;
    constexpr UInt128 kPosMax = (static_cast<UInt128>(-1)) >> 1; // 2^127 - 1
    const UInt128 limit = neg ? kPosMax + 1 : kPosMax;
    UInt128 u = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        const unsigned digit = static_cast<unsigned>(s[i] - '0');
        if (u > (limit - digit) / 10) return std::nullopt;
        u = u * 10 + digit;
    }
    if (!neg) return static_cast<Int128>(u);
    if (u == 0) return Int128(0);
    return -static_cast<Int128>(u - 1) - 1;
}

} // namespace ppd
