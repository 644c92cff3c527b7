#pragma once

#include "ksim/types.hpp"

#include <cstdio>
#include <string>

namespace ksim {

/// Floats for CSV/JSON output: 17 significant digits, round-trip exact.
inline std::string format_g17(Scalar v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace ksim
