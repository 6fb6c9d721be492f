#include "nmcm/format.hpp"

#include <cstdio>

namespace nmcm {

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;  // drops the sign of -0.0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace nmcm
