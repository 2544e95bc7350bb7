#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opgfn::util {

// Shortest decimal that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view text);

[[nodiscard]] std::string hex64(std::uint64_t v);

[[nodiscard]] std::string join(std::span<std::string const> parts, std::string_view sep);
[[nodiscard]] std::string join_doubles(std::span<double const> values, std::string_view sep);
[[nodiscard]] std::vector<std::string> split(std::string_view text, char sep);
[[nodiscard]] std::string_view trim(std::string_view text);

} // namespace opgfn::util
