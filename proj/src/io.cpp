#include "jacobimax/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace jacobimax {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_" + suffix;
    return path.substr(0, dot) + "_" + suffix + path.substr(dot);
}

}  // namespace jacobimax
