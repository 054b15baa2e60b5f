#include "wfix/format.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace wfix {

std::string format_fixed(real v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[128];
    int len = std::snprintf(buf, sizeof buf, "%.*Lf", digits, v);
    if (len < 0) throw Error("format_fixed: snprintf failed");
    if (static_cast<std::size_t>(len) < sizeof buf) return std::string(buf, static_cast<std::size_t>(len));
    std::string big(static_cast<std::size_t>(len) + 1, '\0');
    std::snprintf(big.data(), big.size(), "%.*Lf", digits, v);
    big.resize(static_cast<std::size_t>(len));
    return big;
}

std::string format_sci(real v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*Le", digits, v);
    return buf;
}

real parse_real(std::string_view text) {
    std::string owned(text);
    if (owned.empty()) throw ConfigError("expected a number, got an empty string");
    errno = 0;
    char* end = nullptr;
    const real v = std::strtold(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size() || errno == ERANGE) {
        throw ConfigError("not a number: '" + owned + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace wfix
