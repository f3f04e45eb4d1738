#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace zmlab::detail {

// 17 significant digits: lossless double round-trip, byte-stable output.
inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_int(long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ld", v);
    return buf;
}

}  // namespace zmlab::detail
