#include "opgfn/util/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace opgfn::util {

std::string format_double(double v) {
    if (std::isnan(v)) { return "nan"; }
    if (std::isinf(v)) { return v > 0 ? "inf" : "-inf"; }
    std::array<char, 64> buf{};
    auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (text == "nan") { return std::nan(""); }
    if (text == "inf") { return HUGE_VAL; }
    if (text == "-inf") { return -HUGE_VAL; }
    double v = 0.0;
    auto const* first = text.data();
    if (!text.empty() && text.front() == '+') { ++first; }
    auto const res = std::from_chars(first, text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string hex64(std::uint64_t v) {
    std::array<char, 17> buf{};
    auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v, 16);
    std::string digits(buf.data(), res.ptr);
    return std::string(16 - digits.size(), '0') + digits;
}

std::string join(std::span<std::string const> parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) { out += sep; }
        out += parts[i];
    }
    return out;
}

std::string join_doubles(std::span<double const> values, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) { out += sep; }
        out += format_double(values[i]);
    }
    return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto const pos = text.find(sep, start);
        out.emplace_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) { break; }
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view text) {
    auto const first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) { return {}; }
    auto const last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

} // namespace opgfn::util
