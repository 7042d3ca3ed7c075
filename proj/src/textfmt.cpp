#include "attrest/textfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace attrest {

std::string fmt_g6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_full(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace attrest
