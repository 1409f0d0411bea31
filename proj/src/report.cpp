#include "qk/report.hpp"

#include <cstdio>

namespace qk {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace qk
