#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace drc {

/// Lowercase hex SHA-256 of raw bytes.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace drc
