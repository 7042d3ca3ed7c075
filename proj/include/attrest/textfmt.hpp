#pragma once

#include <string>

namespace attrest {

/// 6 significant digits, for text tables.
std::string fmt_g6(double v);

/// Shortest decimal form that round-trips exactly, for CSV output.
std::string fmt_full(double v);

}  // namespace attrest
