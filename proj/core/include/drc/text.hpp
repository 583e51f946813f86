#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace drc::text {

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;

/// Strips trailing whitespace from every line and drops trailing empty lines.
std::string normalize_trailing_whitespace(std::string_view s);

std::string ascii_lower(std::string_view s);

/// Byte offsets at which a UTF-8 code point starts, plus s.size().
std::vector<std::size_t> code_point_boundaries(std::string_view s);

}  // namespace drc::text
